"""Experiment runner exposing the simulator as reproducible file-emitting commands.

Subcommands: thermalize | rates | fd | entangle | irreversibility | classify
| verify.  Flag values override config-file values, which override defaults;
identical config + seed produces byte-identical output.  Numbers are written
with 17 significant digits so round-trips are lossless (infinities appear as
the quoted string "inf").
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import channel, entanglement, linalg, machines, thermo, trajectories


class ConfigError(Exception):
    """Invalid configuration or command line; exits with code 1."""


@dataclass
class ExperimentConfig:
    experiment: str = ""
    phi: float = 0.3
    theta: float = 0.0
    alpha: float = 0.0
    phi2: "float | None" = None
    theta2: "float | None" = None
    alpha2: "float | None" = None
    p: "float | None" = None
    beta: "float | None" = None
    energy: "float | None" = None
    steps: int = 100
    tau0: float = 1e-3
    seed: int = 0
    mode: str = "exact"
    out: "str | None" = None
    format: "str | None" = None
    degrees: bool = False
    d0: float = 0.25
    k0: "list[float]" = None  # [re, im]
    observable: "list | None" = None
    trials: int = 100
    phi_values: "list[float] | None" = None
    theta_values: "list[float] | None" = None
    p_values: "list[float] | None" = None
    include_trials: bool = False

    def __post_init__(self):
        if self.k0 is None:
            self.k0 = [0.25, 0.0]


_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return f'"{x}"'
        return format(x, ".17g")
    return str(x)


def _dump_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{k}": {_dump_json(obj[k], indent + 1)}' for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_dump_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, float)):
        return _fmt(float(obj)) if isinstance(obj, float) else str(obj)
    return json.dumps(obj)


def _config_dict(cfg: ExperimentConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in fields(cfg)}


def _config_comment(cfg: ExperimentConfig) -> str:
    # the output path is not part of the experiment: identical configs must
    # produce byte-identical files wherever they are written
    d = {k: v for k, v in _config_dict(cfg).items() if k != "out"}
    return "# config: " + json.dumps(d, sort_keys=True, default=str)


def _emit(cfg: ExperimentConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(text)


def _write_csv(cfg: ExperimentConfig, header: "list[str]", rows) -> None:
    lines = [_config_comment(cfg), ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _emit(cfg, "\n".join(lines) + "\n")


def _write_json(cfg: ExperimentConfig, payload: dict) -> None:
    payload = dict(payload)
    payload["config"] = {
        k: v for k, v in _config_dict(cfg).items() if v is not None and k != "out"
    }
    _emit(cfg, _dump_json(payload) + "\n")


def _resolve_bath(cfg: ExperimentConfig) -> channel.BathSpec:
    if cfg.p is not None and (cfg.beta is not None or cfg.energy is not None):
        raise ConfigError("give either p or (beta, energy), not both")
    if cfg.beta is not None or cfg.energy is not None:
        if cfg.beta is None or cfg.energy is None:
            raise ConfigError("beta and energy must be given together")
        return channel.BathSpec.from_temperature(cfg.beta, cfg.energy)
    return channel.BathSpec.from_population(cfg.p if cfg.p is not None else 0.75)


def _machine(cfg: ExperimentConfig) -> machines.MachineParams:
    try:
        return machines.MachineParams(cfg.phi, cfg.theta, cfg.alpha)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _initial_state(cfg: ExperimentConfig) -> linalg.QubitState:
    try:
        return linalg.QubitState(d=cfg.d0, k=complex(cfg.k0[0], cfg.k0[1]))
    except (ValueError, TypeError, IndexError) as exc:
        raise ConfigError(f"invalid initial state: {exc}") from exc


def _parse_observable(spec) -> np.ndarray:
    if spec is None:
        return linalg.SZ.copy()
    try:
        rows = []
        for r in spec:
            row = []
            for v in r:
                if isinstance(v, (list, tuple)):
                    row.append(complex(v[0], v[1]))
                else:
                    row.append(complex(v))
            rows.append(row)
        a = np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"invalid observable: {exc}") from exc
    if a.shape != (2, 2) or np.abs(a - a.conj().T).max() > 1e-12:
        raise ConfigError("observable must be a Hermitian 2x2 matrix")
    return a


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_thermalize(cfg: ExperimentConfig) -> int:
    m = _machine(cfg)
    b = _resolve_bath(cfg)
    s0 = _initial_state(cfg)
    xi = channel.bath_state(b)
    lam = channel.decoherence_factor(b.p, m.theta, m.alpha)
    traj = channel.iterate(s0, m, b, cfg.steps)
    rows = []
    for n, s in enumerate(traj):
        rows.append(
            [
                n,
                s.d,
                s.k.real,
                s.k.imag,
                abs(s.k),
                linalg.trace_distance(s.to_matrix(), xi),
                channel.closed_form_d(s0.d, b.p, m.phi, n),
                abs(channel.closed_form_k(s0.k, lam, m.phi, n)),
            ]
        )
    header = [
        "n",
        "d",
        "re_k",
        "im_k",
        "abs_k",
        "trace_distance_to_xi",
        "closed_form_d",
        "closed_form_k_mag",
    ]
    if (cfg.format or "csv") == "json":
        _write_json(cfg, {"columns": header, "rows": [list(r) for r in rows]})
    else:
        _write_csv(cfg, header, rows)
    return 0


def cmd_rates(cfg: ExperimentConfig) -> int:
    b = _resolve_bath(cfg)
    try:
        rates = thermo.rates_from_machine(cfg.phi, cfg.theta, cfg.tau0, b.p)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    m = _machine(cfg)
    s0 = _initial_state(cfg)
    traj = channel.iterate(s0, m, b, cfg.steps)
    t1_fit, t2_fit = thermo.fit_relaxation(traj, cfg.tau0)
    saturated = math.isfinite(rates.T2) and abs(rates.T2 - 2 * rates.T1) <= 1e-9 * rates.T1
    _write_json(
        cfg,
        {
            "T1": rates.T1,
            "T2": rates.T2,
            "Tpf": rates.Tpf,
            "fitted_T1": t1_fit,
            "fitted_T2": t2_fit,
            "bound_saturated": saturated,
        },
    )
    return 0


def cmd_fd(cfg: ExperimentConfig) -> int:
    m = _machine(cfg)
    b = _resolve_bath(cfg)
    a = _parse_observable(cfg.observable)
    curve = thermo.fd_protocol_curve(m, b, a, cfg.steps)
    rows = []
    for n in range(cfg.steps + 1):
        rows.append(
            [
                n,
                float(curve[n]),
                thermo.fd_closed_form(a, b, m.phi, n),
                1.0 - math.cos(m.phi) ** (2 * n),
            ]
        )
    header = ["n", "F_simulated", "F_closed", "D"]
    if (cfg.format or "csv") == "json":
        _write_json(cfg, {"columns": header, "rows": [list(r) for r in rows]})
    else:
        _write_csv(cfg, header, rows)
    return 0


def cmd_entangle(cfg: ExperimentConfig) -> int:
    base_b = _resolve_bath(cfg)
    phis = cfg.phi_values if cfg.phi_values is not None else [cfg.phi]
    thetas = cfg.theta_values if cfg.theta_values is not None else [cfg.theta]
    ps = cfg.p_values if cfg.p_values is not None else [base_b.p]
    rows = []
    for p in ps:
        b = channel.BathSpec.from_population(p)
        for phi in phis:
            for theta in thetas:
                m = machines.MachineParams(phi, theta, cfg.alpha)
                res = entanglement.entangling_power(m, b)
                rows.append(
                    [
                        phi,
                        theta,
                        p,
                        res.value,
                        entanglement.entangling_power_closed(p, phi),
                        res.argmax_theta,
                        res.argmax_phi,
                    ]
                )
    header = [
        "phi",
        "theta",
        "p",
        "power_numeric",
        "power_closed",
        "argmax_theta_bloch",
        "argmax_phi_bloch",
    ]
    if (cfg.format or "csv") == "json":
        _write_json(cfg, {"columns": header, "rows": [list(r) for r in rows]})
    else:
        _write_csv(cfg, header, rows)
    return 0


def cmd_irreversibility(cfg: ExperimentConfig) -> int:
    m = _machine(cfg)
    b = _resolve_bath(cfg)
    rng = np.random.default_rng(cfg.seed)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi0 = v / np.linalg.norm(v)
    try:
        rep = trajectories.reconstruction_experiment(
            psi0, cfg.steps, m, b, trials=cfg.trials, seed=cfg.seed, mode=cfg.mode
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    payload = {
        "correct_fidelity": rep.correct_fidelity,
        "no_key_fidelity": rep.no_key_fidelity,
        "margin": rep.margin,
        "wrong_order": {
            "mean": rep.wrong_mean,
            "std": rep.wrong_std,
            "stderr": rep.wrong_stderr,
            "min": rep.wrong_min,
            "max": rep.wrong_max,
            "count": rep.n_wrong,
        },
    }
    if cfg.include_trials:
        payload["per_trial"] = list(rep.wrong_fidelities)
    _write_json(cfg, payload)
    return 0


def cmd_classify(cfg: ExperimentConfig) -> int:
    if cfg.phi2 is None or cfg.theta2 is None:
        raise ConfigError("classify needs --phi2 and --theta2 for the second machine")
    m1 = _machine(cfg)
    m2 = machines.MachineParams(cfg.phi2, cfg.theta2, cfg.alpha2 or 0.0)
    lu = machines.lu_equivalent(m1, m2)
    rng = np.random.default_rng(cfg.seed)
    payload = {
        "lu_equivalent": lu,
        "dynamically_equivalent": lu,  # the two notions coincide for this family
        "canonical_params": {},
        "basis_independent": {},
    }
    for name, m in (("machine1", m1), ("machine2", m2)):
        cp = machines.canonical_params(m.phi, m.theta)
        payload["canonical_params"][name] = {
            "mu_x": cp.mu_x,
            "mu_y": cp.mu_y,
            "mu_z": cp.mu_z,
        }
        payload["basis_independent"][name] = machines.is_basis_independent(
            machines.build_machine(m), trials=20, rng=rng
        )
    _write_json(cfg, payload)
    return 0


def cmd_verify(cfg: ExperimentConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    checks = []

    dev = 0.0
    for _ in range(200):
        m = machines.MachineParams(
            rng.uniform(0, math.pi / 2), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)
        )
        rep = channel.check_stationarity(m, np.linspace(0.0, 1.0, 11))
        dev = max(dev, rep.max_deviation)
    checks.append(("stationarity_grid", dev, 1e-12))

    dev = 0.0
    for _ in range(50):
        d0 = rng.uniform()
        kmax = math.sqrt(d0 * (1 - d0))
        k0 = kmax * rng.uniform() * np.exp(1j * rng.uniform(0, 2 * math.pi))
        m = machines.MachineParams(
            rng.uniform(0, math.pi / 2), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)
        )
        b = channel.BathSpec.from_population(rng.uniform())
        lam = channel.decoherence_factor(b.p, m.theta, m.alpha)
        traj = channel.iterate(linalg.QubitState(d0, k0), m, b, 40, method="matrix")
        for n in (1, 10, 40):
            dev = max(dev, abs(traj[n].d - channel.closed_form_d(d0, b.p, m.phi, n)))
            dev = max(dev, abs(traj[n].k - channel.closed_form_k(k0, lam, m.phi, n)))
    checks.append(("closed_form_agreement", dev, 1e-11))

    dev = 0.0
    for _ in range(30):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        a = g + g.conj().T
        m = machines.MachineParams(rng.uniform(0.05, math.pi / 2), rng.uniform(0, 2 * math.pi))
        b = channel.BathSpec.from_population(rng.uniform())
        n = int(rng.integers(0, 30))
        dev = max(
            dev,
            abs(
                thermo.fd_protocol_simulated(m, b, a, n)
                - thermo.fd_closed_form(a, b, m.phi, n)
            ),
        )
    checks.append(("fd_identity", dev, 1e-12))

    all_ok = True
    lines = []
    for name, got, tol in checks:
        ok = got < tol
        all_ok &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name} max_dev={got:.3e} tol={tol:g}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if cfg.out is not None:
        _write_json(
            cfg,
            {
                "checks": [
                    {"name": n, "max_deviation": g, "tolerance": t, "passed": g < t}
                    for n, g, t in checks
                ],
                "passed": all_ok,
            },
        )
    return 0 if all_ok else 2


_COMMANDS = {
    "thermalize": cmd_thermalize,
    "rates": cmd_rates,
    "fd": cmd_fd,
    "entangle": cmd_entangle,
    "irreversibility": cmd_irreversibility,
    "classify": cmd_classify,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 on any usage problem
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="collisim", description=__doc__)
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--phi", type=float)
        sp.add_argument("--theta", type=float)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--phi2", type=float)
        sp.add_argument("--theta2", type=float)
        sp.add_argument("--alpha2", type=float)
        sp.add_argument("--p", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--energy", type=float)
        sp.add_argument("--steps", type=int)
        sp.add_argument("--tau0", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--mode", choices=["exact", "sampled"])
        sp.add_argument("--out")
        sp.add_argument("--config")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--degrees", action="store_true", default=None)
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a single JSON object")
    unknown = set(data) - _FIELD_NAMES
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _merge(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(experiment=args.experiment)
    if args.config:
        file_values = _load_config_file(args.config)
        if "experiment" in file_values and file_values["experiment"] != args.experiment:
            raise ConfigError(
                f"config file is for {file_values['experiment']!r}, not {args.experiment!r}"
            )
        file_values.pop("experiment", None)
        try:
            cfg = replace(cfg, **file_values)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
    overrides = {
        k: v
        for k, v in vars(args).items()
        if k in _FIELD_NAMES and k not in ("experiment", "config") and v is not None
    }
    cfg = replace(cfg, **overrides)
    if cfg.degrees:
        rad = math.pi / 180.0
        cfg = replace(
            cfg,
            phi=cfg.phi * rad,
            theta=cfg.theta * rad,
            alpha=cfg.alpha * rad,
            phi2=None if cfg.phi2 is None else cfg.phi2 * rad,
            theta2=None if cfg.theta2 is None else cfg.theta2 * rad,
            alpha2=None if cfg.alpha2 is None else cfg.alpha2 * rad,
            phi_values=None if cfg.phi_values is None else [v * rad for v in cfg.phi_values],
            theta_values=None
            if cfg.theta_values is None
            else [v * rad for v in cfg.theta_values],
        )
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.steps < 0:
        raise ConfigError("steps must be non-negative")
    if not cfg.tau0 > 0:
        raise ConfigError("tau0 must be positive")
    if cfg.mode not in ("exact", "sampled"):
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    if cfg.format is not None and cfg.format not in ("csv", "json"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    if cfg.trials <= 0:
        raise ConfigError("trials must be positive")
    for name in ("phi_values", "theta_values", "p_values"):
        vals = getattr(cfg, name)
        if vals is not None and (
            not isinstance(vals, (list, tuple)) or not vals
        ):
            raise ConfigError(f"{name} must be a non-empty list")


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        cfg = _merge(args)
        return _COMMANDS[cfg.experiment](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
