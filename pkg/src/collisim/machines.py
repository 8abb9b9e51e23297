"""The family of two-qubit thermalizing machines and its equivalence structure.

A machine is parametrized by three angles (phi, theta, alpha).  It acts on
|system, ancilla> as

    |00> -> |00>
    |11> -> |11>
    |01> -> e^{i(theta+alpha)} (cos(phi)|01> + i sin(phi)|10>)
    |10> -> e^{i(theta-alpha)} (cos(phi)|10> + i sin(phi)|01>)

which leaves the spans of |00>, |11>, and {|01>, |10>} separately invariant
and therefore conserves the sum of the one-qubit energies for any splitting
along z.  Dissipation is controlled by phi, dephasing by theta; alpha only
rotates the transverse axes and drops out of every observable rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import I2, SX, SY, SZ, tensor

_HALF_PI = math.pi / 2
_ANGLE_TOL = 1e-9

# Bell vectors in the computational basis (|00>, |01>, |10>, |11>).
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2)

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass(frozen=True)
class MachineParams:
    """Machine angles: phi in [0, pi/2]; theta and alpha are periodic."""

    phi: float
    theta: float
    alpha: float = 0.0

    def __post_init__(self):
        if not all(map(math.isfinite, (self.phi, self.theta, self.alpha))):
            raise ValueError("machine angles must be finite")
        if self.phi < -1e-12 or self.phi > _HALF_PI + 1e-12:
            raise ValueError(f"phi={self.phi} outside [0, pi/2]")

    @property
    def is_thermalizing(self) -> bool:
        """phi = 0 machines never drive the population to equilibrium."""
        return self.phi > _ANGLE_TOL


@dataclass(frozen=True)
class CanonicalParams:
    """Canonical two-qubit interaction coefficients (mu_x, mu_y, mu_z).

    For this family mu_x = mu_y = phi/2 in [0, pi/4] and mu_z = -theta'/2
    with theta' range-reduced into (-pi/2, pi/2], so mu_z lies in
    [-pi/4, pi/4).
    """

    mu_x: float
    mu_y: float
    mu_z: float


def build_machine(m: MachineParams) -> np.ndarray:
    """4x4 unitary of the machine, system qubit first."""
    c, s = math.cos(m.phi), math.sin(m.phi)
    ep = np.exp(1j * (m.theta + m.alpha))
    em = np.exp(1j * (m.theta - m.alpha))
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = 1.0
    u[3, 3] = 1.0
    u[1, 1] = ep * c
    u[2, 1] = ep * 1j * s
    u[2, 2] = em * c
    u[1, 2] = em * 1j * s
    return u


def build_v(phi: float, theta: float) -> np.ndarray:
    """Representative machine with alpha = 0; diagonal in the Bell basis."""
    return build_machine(MachineParams(phi, theta, 0.0))


def hamiltonian_form(phi: float, theta: float) -> np.ndarray:
    """Hermitian generator H with e^{i theta/2} exp(iH) = build_v(phi, theta).

    H = (1/2) [phi (sx x sx + sy x sy) - theta sz x sz].
    """
    return 0.5 * (
        phi * (tensor(SX, SX) + tensor(SY, SY)) - theta * tensor(SZ, SZ)
    )


def phase_gate(x: float) -> np.ndarray:
    """Single-qubit phase gate diag(1, e^{ix})."""
    return np.diag([1.0, np.exp(1j * x)])


def gauge_transform(u4: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """Dress a machine with ancilla phase gates: (I x u(alpha)) U (I x u(beta)).

    The ancilla's thermal state is diagonal, so this leaves the induced
    channel on the system unchanged.
    """
    return tensor(I2, phase_gate(alpha)) @ u4 @ tensor(I2, phase_gate(beta))


def canonical_params(phi: float, theta: float) -> CanonicalParams:
    """Map (phi, theta) to the canonical interaction coefficients.

    theta is reduced mod pi into (-pi/2, pi/2]; a tie at the boundary
    resolves toward +pi/2.
    """
    t = math.fmod(theta, math.pi)
    if t > _HALF_PI:
        t -= math.pi
    elif t <= -_HALF_PI:
        t += math.pi
    return CanonicalParams(mu_x=phi / 2, mu_y=phi / 2, mu_z=-t / 2)


def _theta_mod_pi_distance(t1: float, t2: float) -> float:
    d = math.fmod(t1 - t2, math.pi)
    if d < 0:
        d += math.pi
    return min(d, math.pi - d)


def lu_equivalent(m1: MachineParams, m2: MachineParams, tol: float = _ANGLE_TOL) -> bool:
    """True iff the machines are equivalent under local unitaries.

    This holds iff phi matches and theta matches mod pi; alpha is free.
    Coincides with dynamical equivalence of the induced channels.
    """
    return abs(m1.phi - m2.phi) < tol and _theta_mod_pi_distance(m1.theta, m2.theta) < tol


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - |Tr(a^dag b)|/dim; zero iff the unitaries agree up to global phase."""
    d = a.shape[0]
    return 1.0 - abs(np.trace(a.conj().T @ b)) / d


def haar_qubit_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random single-qubit unitary (up to irrelevant global phase).

    Built from two uniform phases psi, chi in [0, 2pi) and a mixing angle
    t = arcsin(sqrt(u)) with u uniform in [0, 1].
    """
    u = rng.uniform()
    psi = rng.uniform(0.0, 2 * math.pi)
    chi = rng.uniform(0.0, 2 * math.pi)
    t = math.asin(math.sqrt(u))
    ct, st = math.cos(t), math.sin(t)
    return np.array(
        [
            [ct * np.exp(1j * psi), st * np.exp(1j * chi)],
            [-st * np.exp(-1j * chi), ct * np.exp(-1j * psi)],
        ]
    )


def is_basis_independent(
    u4: np.ndarray,
    trials: int = 20,
    tol: float = _ANGLE_TOL,
    rng: "np.random.Generator | None" = None,
) -> bool:
    """True iff (w x w) U (w x w)^dag = U up to phase for random bases w.

    Tests `trials` Haar-random single-qubit unitaries; a machine passing for
    all of them thermalizes along every quantization axis.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    if rng is None:
        rng = np.random.default_rng(0)
    for _ in range(trials):
        w = haar_qubit_unitary(rng)
        ww = tensor(w, w)
        if phase_distance(u4, ww @ u4 @ ww.conj().T) > tol:
            return False
    return True
