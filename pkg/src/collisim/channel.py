"""The one-collision channel, its iteration, and closed-form dynamics.

A collision couples the system qubit to a fresh bath qubit in the thermal
state xi = diag(p, q), applies the machine unitary, and discards the bath
qubit.  On the (d, k) parametrization the map is affine:

    d' = d cos^2(phi) + p sin^2(phi)
    k' = cos(phi) * lambda * k,   lambda = e^{i alpha}(p e^{-i theta} + q e^{i theta})

so populations relax to p geometrically while coherences shrink by
|lambda| cos(phi) per collision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import QubitState, partial_trace, tensor
from .machines import MachineParams, build_machine

# A trajectory is the ordered list of system states, one per collision step.
Trajectory = list[QubitState]


@dataclass(frozen=True)
class BathSpec:
    """Thermal bath qubit: ground-state population p (q = 1 - p).

    Physically p = (1 + tanh(beta*E))/2 >= 1/2 for beta >= 0; p may also be
    set directly for grid scans, including p < 1/2.
    """

    p: float
    beta: "float | None" = None
    energy: "float | None" = None

    def __post_init__(self):
        if not (-1e-12 <= self.p <= 1.0 + 1e-12):
            raise ValueError(f"population p={self.p} outside [0, 1]")

    @classmethod
    def from_temperature(cls, beta: float, energy: float) -> "BathSpec":
        """Bath at inverse temperature beta with level splitting energy > 0."""
        if not energy > 0:
            raise ValueError("level splitting must be positive")
        p = 0.5 * (1.0 + math.tanh(beta * energy))
        return cls(p=p, beta=beta, energy=energy)

    @classmethod
    def from_population(cls, p: float) -> "BathSpec":
        return cls(p=p)

    @property
    def q(self) -> float:
        return 1.0 - self.p


def bath_state(b: BathSpec) -> np.ndarray:
    """Thermal qubit state xi = diag(p, q)."""
    return np.diag([b.p, b.q]).astype(complex)


def decoherence_factor(p: float, theta: float, alpha: float = 0.0) -> complex:
    """Per-collision coherence multiplier lambda; |lambda| <= 1."""
    return np.exp(1j * alpha) * (p * np.exp(-1j * theta) + (1 - p) * np.exp(1j * theta))


def apply_collision(state: QubitState, m: MachineParams, b: BathSpec) -> QubitState:
    """One collision computed by 4x4 conjugation and partial trace."""
    u = build_machine(m)
    joint = u @ tensor(state.to_matrix(), bath_state(b)) @ u.conj().T
    return QubitState.from_matrix(partial_trace(joint, [0]))


def collision_map(state: QubitState, m: MachineParams, b: BathSpec) -> QubitState:
    """One collision via the analytic (d, k) update; equals apply_collision."""
    c = math.cos(m.phi)
    s = math.sin(m.phi)
    lam = decoherence_factor(b.p, m.theta, m.alpha)
    return QubitState(d=c * c * state.d + b.p * s * s, k=c * lam * state.k)


def iterate(
    state0: QubitState,
    m: MachineParams,
    b: BathSpec,
    n: int,
    method: str = "analytic",
) -> "list[QubitState]":
    """States after 0..n collisions.

    `method` selects the fast analytic map or the 4x4 matrix path kept as a
    cross-check route; the two agree to round-off.
    """
    if n < 0:
        raise ValueError("collision count must be non-negative")
    if method == "analytic":
        step = lambda s: collision_map(s, m, b)
    elif method == "matrix":
        u = build_machine(m)
        xi = bath_state(b)

        def step(s, _u=u, _xi=xi):
            joint = _u @ tensor(s.to_matrix(), _xi) @ _u.conj().T
            return QubitState.from_matrix(partial_trace(joint, [0]))

    else:
        raise ValueError(f"unknown method {method!r}")
    out = [state0]
    for _ in range(n):
        out.append(step(out[-1]))
    return out


def closed_form_d(d0: float, p: float, phi: float, n: int) -> float:
    """Population after n collisions: (1 - c^{2n}) p + c^{2n} d0."""
    c2n = math.cos(phi) ** (2 * n)
    return (1.0 - c2n) * p + c2n * d0


def closed_form_k(k0: complex, lam: complex, phi: float, n: int) -> complex:
    """Coherence after n collisions: k0 (lambda cos(phi))^n."""
    return k0 * (lam * math.cos(phi)) ** n


def stationarity_deviation(u4: np.ndarray, p: float) -> float:
    """Max-entry deviation of U (xi x xi) U^dag from xi x xi."""
    xi2 = np.diag([p * p, p * (1 - p), (1 - p) * p, (1 - p) * (1 - p)]).astype(complex)
    return float(np.abs(u4 @ xi2 @ u4.conj().T - xi2).max())


@dataclass(frozen=True)
class StationarityReport:
    max_deviation: float
    worst_p: float


def check_stationarity(m: MachineParams, p_grid) -> StationarityReport:
    """Largest stationarity deviation of the machine over a population grid."""
    u = build_machine(m)
    worst = (0.0, float("nan"))
    for p in p_grid:
        dev = stationarity_deviation(u, p)
        if dev >= worst[0]:
            worst = (dev, p)
    return StationarityReport(max_deviation=worst[0], worst_p=worst[1])
