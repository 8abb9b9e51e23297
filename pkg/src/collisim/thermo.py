"""Continuous-time limit, relaxation times, and the fluctuation-dissipation link.

Shrinking the collision interval tau0 together with the angles at fixed
rates phi^2/tau0 = 1/T1 and 2 theta^2/tau0 = 1/Tpf turns the geometric
decays into exponentials with

    1/T2 = 1/(2 T1) + p q / Tpf

The equilibrium-fluctuation protocol measures the system in the energy
basis, lets each branch re-thermalize for n collisions, and aggregates the
deviations; the result is proportional to the dissipated fraction
D = 1 - cos(phi)^{2n} times a function of temperature alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import SZ, QubitState
from .channel import BathSpec, closed_form_d, closed_form_k, decoherence_factor
from .machines import MachineParams

_FIT_SKIP = 5  # fit window drops the first points; keeps the fitter generic


@dataclass(frozen=True)
class RelaxationRates:
    """Relaxation times in the continuous-collision limit."""

    T1: float
    T2: float
    Tpf: float
    tau0: float


def rates_from_machine(phi: float, theta: float, tau0: float, p: float) -> RelaxationRates:
    """T1 = tau0/phi^2, Tpf = tau0/(2 theta^2), T2 from the combination rule.

    Meaningful for small angles (<= 0.3 recommended); theta = 0 gives
    Tpf = inf and saturates T2 = 2 T1, as does p in {0, 1}.
    """
    if not tau0 > 0:
        raise ValueError("collision interval tau0 must be positive")
    if not phi > 0:
        raise ValueError("phi must be positive to define a dissipation rate")
    t1 = tau0 / phi**2
    tpf = math.inf if theta == 0 else tau0 / (2 * theta**2)
    q = 1.0 - p
    inv_t2 = 1.0 / (2 * t1) + (p * q) / tpf
    return RelaxationRates(T1=t1, T2=1.0 / inv_t2, Tpf=tpf, tau0=tau0)


def continuous_d(t: float, d0: float, p: float, t1: float) -> float:
    """d(t) = e^{-t/T1} d0 + (1 - e^{-t/T1}) p."""
    e = math.exp(-t / t1)
    return e * d0 + (1.0 - e) * p


def continuous_k_mag(t: float, k0_mag: float, t2: float) -> float:
    """|k|(t) = e^{-t/T2} |k|(0)."""
    return math.exp(-t / t2) * k0_mag


@dataclass(frozen=True)
class LimitReport:
    """Discrete-vs-continuous comparison along a shrinking tau0 sequence."""

    T1: float
    Tpf: float
    tau0s: "tuple[float, ...]"
    d_errors: "tuple[float, ...]"
    k_errors: "tuple[float, ...]"


def discrete_limit_check(
    phi: float,
    theta: float,
    p: float,
    t: float,
    tau0_sequence,
    d0: float = 0.0,
    k0_mag: float = 0.0,
) -> LimitReport:
    """Convergence of the discrete dynamics to the exponential limit.

    (phi, theta) together with the first tau0 fix the rates; each smaller
    tau0 rescales the angles so the rates stay constant, and the report
    records |d^(n) - d(t)| and ||k^(n)| - |k|(t)| at n = t/tau0.  Errors
    shrink roughly linearly in tau0.
    """
    taus = tuple(tau0_sequence)
    if not taus:
        raise ValueError("tau0 sequence must not be empty")
    rates = rates_from_machine(phi, theta, taus[0], p)
    d_errs, k_errs = [], []
    for tau in taus:
        phi_tau = math.sqrt(tau / rates.T1)
        theta_tau = 0.0 if math.isinf(rates.Tpf) else math.sqrt(tau / (2 * rates.Tpf))
        n = int(round(t / tau))
        d_n = closed_form_d(d0, p, phi_tau, n)
        lam = decoherence_factor(p, theta_tau)
        k_n = abs(closed_form_k(k0_mag + 0j, lam, phi_tau, n))
        d_errs.append(abs(d_n - continuous_d(t, d0, p, rates.T1)))
        t2 = rates.T2
        k_errs.append(abs(k_n - continuous_k_mag(t, k0_mag, t2)))
    return LimitReport(
        T1=rates.T1,
        Tpf=rates.Tpf,
        tau0s=taus,
        d_errors=tuple(d_errs),
        k_errors=tuple(k_errs),
    )


def _require_hermitian(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2) or np.abs(a - a.conj().T).max() > 1e-12:
        raise ValueError("observable must be a Hermitian 2x2 matrix")
    return a


def fd_protocol_curve(
    m: MachineParams, b: BathSpec, observable: np.ndarray, n_max: int
) -> np.ndarray:
    """Fluctuation measure F at every collision count 0..n_max.

    Simulates the protocol: prepare xi, measure in the energy basis, let
    each branch undergo collisions (full 4x4 matrix path), and combine the
    deviations from the measured projector with weights p and q.
    """
    a = _require_hermitian(observable)
    p, q = b.p, b.q
    from .channel import apply_collision  # matrix path keeps this an oracle

    branch0 = QubitState(d=1.0)
    branch1 = QubitState(d=0.0)
    proj0 = branch0.to_matrix()
    proj1 = branch1.to_matrix()
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        if n > 0:
            branch0 = apply_collision(branch0, m, b)
            branch1 = apply_collision(branch1, m, b)
        t0 = np.real(np.trace((branch0.to_matrix() - proj0) @ a))
        t1 = np.real(np.trace((branch1.to_matrix() - proj1) @ a))
        out[n] = math.sqrt(p * t0 * t0 + q * t1 * t1)
    return out


def fd_protocol_simulated(
    m: MachineParams, b: BathSpec, observable: np.ndarray, n: int
) -> float:
    """Simulated fluctuation measure F after n collisions."""
    if n < 0:
        raise ValueError("collision count must be non-negative")
    return float(fd_protocol_curve(m, b, observable, n)[n])


def fd_closed_form(observable: np.ndarray, b: BathSpec, phi: float, n: int) -> float:
    """F = D^(n) * sqrt(p q) * |Tr(A sz)| with D^(n) = 1 - cos(phi)^{2n}.

    sqrt(p q) equals 1/(2 cosh(beta E)) on the thermal line.
    """
    a = _require_hermitian(observable)
    dn = 1.0 - math.cos(phi) ** (2 * n)
    return dn * math.sqrt(max(b.p * b.q, 0.0)) * abs(np.real(np.trace(a @ SZ)))


def fd_closed_form_continuous(
    observable: np.ndarray, b: BathSpec, t: float, t1: float
) -> float:
    """Continuous-time variant with D(t) = 1 - e^{-t/T1}."""
    a = _require_hermitian(observable)
    dt = 1.0 - math.exp(-t / t1)
    return dt * math.sqrt(max(b.p * b.q, 0.0)) * abs(np.real(np.trace(a @ SZ)))


def fit_relaxation(trajectory, tau0: float) -> "tuple[float, float]":
    """Log-linear estimates (T1, T2) from a trajectory of QubitState.

    T1 comes from successive population differences (the unknown asymptote
    cancels), T2 from the coherence magnitude.  Returns nan for a component
    with no usable signal.
    """
    ds = np.array([s.d for s in trajectory], dtype=float)
    ks = np.array([abs(s.k) for s in trajectory], dtype=float)

    def _fit(y: np.ndarray, x: np.ndarray) -> float:
        mask = y > 1e-280
        if mask.sum() < 2:
            return math.nan
        slope = np.polyfit(x[mask], np.log(y[mask]), 1)[0]
        if not slope < 0:
            return math.nan
        return -1.0 / slope

    dd = np.abs(np.diff(ds))[_FIT_SKIP:]
    t_dd = tau0 * np.arange(len(np.diff(ds)))[_FIT_SKIP:]
    kk = ks[_FIT_SKIP:]
    t_kk = tau0 * np.arange(len(ks))[_FIT_SKIP:]
    return _fit(dd, t_dd), _fit(kk, t_kk)
