"""Exact multi-qubit collision runs and collision-order reversal.

The bath is truncated to the n ancillas actually hit.  Two modes:

* ``exact``   - density matrix on 1+n qubits, ancillas start in xi
                (n <= 11);
* ``sampled`` - pure state vector, each ancilla drawn from {|0>, |1>}
                with probabilities (p, q), valid because xi is diagonal
                (n <= 20).

Undoing the collisions in the recorded order reconstructs the input
exactly; without the order key the attempt generically fails, even though
every step is unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .linalg import QubitState, fidelity, trace_distance
from .channel import BathSpec, bath_state
from .machines import MachineParams, build_machine

MAX_EXACT_ANCILLAS = 11
MAX_SAMPLED_ANCILLAS = 20


@dataclass(frozen=True)
class CollisionRecord:
    """The classical key: which ancilla was hit when, and by which machine."""

    steps: "tuple[tuple[int, MachineParams], ...]"
    ancilla_bits: "tuple[int, ...] | None" = None

    def machine_for(self, ancilla: int) -> MachineParams:
        for idx, m in self.steps:
            if idx == ancilla:
                return m
        raise KeyError(f"ancilla {ancilla} not in record")


@dataclass
class JointState:
    """System + truncated bath; density matrix or pure vector by mode."""

    mode: str
    state: np.ndarray
    n_ancillas: int
    bath: BathSpec


def _apply_gate_dm(rho_t: np.ndarray, u4: np.ndarray, i: int, j: int, m: int) -> np.ndarray:
    """U rho U^dag on qubits (i, j) of an m-qubit density tensor."""
    g = u4.reshape(2, 2, 2, 2)
    rho_t = np.moveaxis(np.tensordot(g, rho_t, axes=([2, 3], [i, j])), [0, 1], [i, j])
    gc = g.conj()
    rho_t = np.moveaxis(
        np.tensordot(gc, rho_t, axes=([2, 3], [m + i, m + j])), [0, 1], [m + i, m + j]
    )
    return rho_t


def _apply_gate_vec(psi_t: np.ndarray, u4: np.ndarray, i: int, j: int) -> np.ndarray:
    g = u4.reshape(2, 2, 2, 2)
    return np.moveaxis(np.tensordot(g, psi_t, axes=([2, 3], [i, j])), [0, 1], [i, j])


def _system_density(js: JointState) -> np.ndarray:
    return _reduced_density(js, 0)


def _reduced_density(js: JointState, qubit: int) -> np.ndarray:
    m = js.n_ancillas + 1
    if js.mode == "exact":
        t = js.state.reshape([2] * (2 * m))
        row = list(range(m))
        col = [i if i != qubit else m + i for i in range(m)]
        return np.einsum(t, row + col, [qubit, m + qubit])
    psi = np.moveaxis(js.state.reshape([2] * m), qubit, 0).reshape(2, -1)
    return psi @ psi.conj().T


def forward_run(
    rho0: np.ndarray,
    n: int,
    m: MachineParams,
    b: BathSpec,
    mode: str = "exact",
    rng: "np.random.Generator | None" = None,
) -> "tuple[JointState, CollisionRecord]":
    """Collide the system with ancillas 1..n in order; keep the joint state."""
    rho0 = np.asarray(rho0, dtype=complex)
    u4 = build_machine(m)
    if mode == "exact":
        if n > MAX_EXACT_ANCILLAS:
            raise ValueError(f"exact mode supports at most {MAX_EXACT_ANCILLAS} ancillas")
        if rho0.ndim == 1:
            rho0 = np.outer(rho0, rho0.conj())
        joint = rho0
        xi = bath_state(b)
        for _ in range(n):
            joint = np.kron(joint, xi)
        t = joint.reshape([2] * (2 * (n + 1)))
        for k in range(1, n + 1):
            t = _apply_gate_dm(t, u4, 0, k, n + 1)
        dim = 2 ** (n + 1)
        js = JointState(mode="exact", state=t.reshape(dim, dim), n_ancillas=n, bath=b)
        rec = CollisionRecord(steps=tuple((k, m) for k in range(1, n + 1)))
        return js, rec
    if mode == "sampled":
        if n > MAX_SAMPLED_ANCILLAS:
            raise ValueError(f"sampled mode supports at most {MAX_SAMPLED_ANCILLAS} ancillas")
        if rho0.ndim != 1:
            raise ValueError("sampled mode takes a pure system state vector")
        if rng is None:
            rng = np.random.default_rng(0)
        bits = tuple(int(x) for x in (rng.random(n) >= b.p).astype(int))
        psi = rho0 / np.linalg.norm(rho0)
        for bit in bits:
            psi = np.kron(psi, np.array([1.0 - bit, float(bit)], dtype=complex))
        t = psi.reshape([2] * (n + 1))
        for k in range(1, n + 1):
            t = _apply_gate_vec(t, u4, 0, k)
        js = JointState(mode="sampled", state=t.ravel(), n_ancillas=n, bath=b)
        rec = CollisionRecord(
            steps=tuple((k, m) for k in range(1, n + 1)), ancilla_bits=bits
        )
        return js, rec
    raise ValueError(f"unknown mode {mode!r}")


def reverse_run(
    js: JointState, rec: CollisionRecord, order: "tuple[int, ...] | None" = None
) -> np.ndarray:
    """Apply inverse collisions in the given ancilla order; return the system state.

    The default order is the exact reverse of the record, which reconstructs
    the initial system state up to round-off.
    """
    if order is None:
        order = tuple(idx for idx, _ in reversed(rec.steps))
    if sorted(order) != sorted(idx for idx, _ in rec.steps):
        raise ValueError("order must be a permutation of the recorded ancillas")
    mq = js.n_ancillas + 1
    if js.mode == "exact":
        t = js.state.reshape([2] * (2 * mq))
        for k in order:
            t = _apply_gate_dm(t, build_machine(rec.machine_for(k)).conj().T, 0, k, mq)
        dim = 2**mq
        out = JointState("exact", t.reshape(dim, dim), js.n_ancillas, js.bath)
    else:
        t = js.state.reshape([2] * mq)
        for k in order:
            t = _apply_gate_vec(t, build_machine(rec.machine_for(k)).conj().T, 0, k)
        out = JointState("sampled", t.ravel(), js.n_ancillas, js.bath)
    return _system_density(out)


@dataclass(frozen=True)
class ReconstructionReport:
    """Fidelity of reversal with, without, and with a scrambled order key."""

    correct_fidelity: float
    wrong_mean: float
    wrong_std: float
    wrong_min: float
    wrong_max: float
    n_wrong: int
    no_key_fidelity: float
    wrong_fidelities: "tuple[float, ...]"

    @property
    def wrong_stderr(self) -> float:
        return self.wrong_std / math.sqrt(self.n_wrong) if self.n_wrong else math.nan

    @property
    def margin(self) -> float:
        return self.correct_fidelity - self.wrong_mean


def reconstruction_experiment(
    psi0: np.ndarray,
    n: int,
    m: MachineParams,
    b: BathSpec,
    trials: int = 200,
    seed: int = 0,
    mode: str = "exact",
) -> ReconstructionReport:
    """Compare correct-order, wrong-order, and no-reversal reconstruction.

    Wrong orders are every non-correct permutation when n <= 5 (at most
    `trials` of them would be sampled anyway), otherwise `trials` seeded
    draws.
    """
    psi0 = np.asarray(psi0, dtype=complex).ravel()
    psi0 = psi0 / np.linalg.norm(psi0)
    rng = np.random.default_rng(seed)
    init = psi0 if mode == "sampled" else np.outer(psi0, psi0.conj())
    js, rec = forward_run(init, n, m, b, mode=mode, rng=rng)

    correct = tuple(range(n, 0, -1))
    f_correct = fidelity(psi0, reverse_run(js, rec, correct))
    f_nokey = fidelity(psi0, _system_density(js))

    if n <= 5 or math.factorial(n) - 1 <= trials:
        wrong_orders = [p for p in permutations(range(1, n + 1)) if p != correct]
    else:
        wrong_orders = []
        while len(wrong_orders) < trials:
            p = tuple(rng.permutation(np.arange(1, n + 1)).tolist())
            if p != correct:
                wrong_orders.append(p)
    fids = np.array([fidelity(psi0, reverse_run(js, rec, o)) for o in wrong_orders])
    return ReconstructionReport(
        correct_fidelity=f_correct,
        wrong_mean=float(fids.mean()),
        wrong_std=float(fids.std(ddof=1)) if len(fids) > 1 else 0.0,
        wrong_min=float(fids.min()),
        wrong_max=float(fids.max()),
        n_wrong=len(fids),
        no_key_fidelity=f_nokey,
        wrong_fidelities=tuple(float(f) for f in fids),
    )


@dataclass(frozen=True)
class ReducedStatesReport:
    """Trace distances of the reduced system and ancilla states from xi."""

    system_distance: float
    ancilla_distances: "tuple[float, ...]"


def reduced_states_check(js: JointState) -> ReducedStatesReport:
    xi = bath_state(js.bath)
    sys_d = trace_distance(_system_density(js), xi)
    anc = tuple(
        trace_distance(_reduced_density(js, k), xi) for k in range(1, js.n_ancillas + 1)
    )
    return ReducedStatesReport(system_distance=sys_d, ancilla_distances=anc)


def sample_reduced_trajectory(
    state0: QubitState,
    n: int,
    m: MachineParams,
    b: BathSpec,
    rng: "np.random.Generator | None" = None,
) -> "tuple[list[QubitState], tuple[int, ...]]":
    """One Monte-Carlo trajectory of the reduced system state.

    Ancilla bits are drawn from (p, q); conditioned on the draws the reduced
    system dynamics is exact (the bath is a product state, so tracing out
    past ancillas commutes with later collisions), which allows arbitrary n.
    Averaged over draws this reproduces the channel iteration.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    c = math.cos(m.phi)
    s2 = math.sin(m.phi) ** 2
    f0 = c * np.exp(1j * (m.alpha - m.theta))  # ancilla found in |0>
    f1 = c * np.exp(1j * (m.alpha + m.theta))  # ancilla found in |1>
    bits = tuple(int(x) for x in (rng.random(n) >= b.p).astype(int))
    out = [state0]
    for bit in bits:
        prev = out[-1]
        d = c * c * prev.d + s2 * (1.0 - bit)
        k = (f1 if bit else f0) * prev.k
        out.append(QubitState(d=d, k=k))
    return out, bits
