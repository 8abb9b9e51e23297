"""Dense complex linear algebra on small multi-qubit spaces.

Qubit ordering convention (fixed throughout the package): index 0 is the
system qubit, indices 1..n are ancillas in collision order, and Kronecker
factors follow the index order.  Basis states are row-major, so the basis
ket |q0 q1 ... qn> has integer index q0*2^n + q1*2^(n-1) + ... + qn.

All operations are pure functions on immutable values; nothing here keeps
shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Dimension cap: 12 qubits of dense complex matrix algebra.
MAX_DIM = 2**12

# Default tolerances for state validation.  Accumulated round-off across
# <= 1e4 collisions stays well below these.
HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def num_qubits(dim: int) -> int:
    """Number of qubits for a power-of-two dimension; raises otherwise."""
    if dim < 2 or dim & (dim - 1) != 0:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return dim.bit_length() - 1


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices on qubit spaces.

    The product dimension must not exceed 2^12.
    """
    da, db = a.shape[0], b.shape[0]
    num_qubits(da)
    num_qubits(db)
    if da * db > MAX_DIM:
        raise ValueError(f"tensor dimension {da * db} overflows the {MAX_DIM} cap")
    return np.kron(a, b)


def partial_trace(rho: np.ndarray, keep: "list[int] | tuple[int, ...]") -> np.ndarray:
    """Reduced density matrix on the kept qubits (in ascending index order).

    `keep` lists qubit indices (0 = leftmost Kronecker factor).
    """
    n = num_qubits(rho.shape[0])
    keep = sorted(keep)
    if not keep:
        raise ValueError("keep-set must not be empty")
    if len(set(keep)) != len(keep):
        raise ValueError("keep-set contains duplicate indices")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"qubit index out of range for {n}-qubit state: {keep}")
    t = rho.reshape([2] * (2 * n))
    row = list(range(n))
    col = [i if i not in keep else n + i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    d = 2 ** len(keep)
    return reduced.reshape(d, d)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace distance (1/2)*||rho - sigma||_1 for Hermitian inputs."""
    w = np.linalg.eigvalsh(rho - sigma)
    return 0.5 * float(np.sum(np.abs(w)))


def fidelity(psi: np.ndarray, sigma: np.ndarray) -> float:
    """Fidelity <psi|sigma|psi> of a pure state vector with a density matrix."""
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("fidelity of the zero vector is undefined")
    psi = psi / nrm
    f = float(np.real(psi.conj() @ sigma @ psi))
    return min(max(f, 0.0), 1.0)


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2)."""
    return float(np.real(np.trace(rho @ rho)))


def is_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    d = u.shape[0]
    if u.shape != (d, d):
        return False
    return bool(np.abs(u.conj().T @ u - np.eye(d)).max() < tol)


def validate_density(
    rho: np.ndarray,
    herm_tol: float = HERM_TOL,
    trace_tol: float = TRACE_TOL,
    psd_tol: float = PSD_TOL,
) -> bool:
    """True iff rho is Hermitian, unit-trace, and PSD within the tolerances."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if not np.all(np.isfinite(rho.view(float))):
        return False
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        return False
    if abs(np.trace(rho) - 1.0) > trace_tol:
        return False
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return bool(w.min() >= -psd_tol)


@dataclass(frozen=True)
class QubitState:
    """Single-qubit state as population d of |0> and coherence k = <0|rho|1>.

    The implied matrix is d P0 + (1-d) P1 + k |0><1| + k* |1><0| and must be
    a valid density matrix (checked at construction, never clamped).
    """

    d: float
    k: complex = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.d) and math.isfinite(abs(self.k))):
            raise ValueError("QubitState entries must be finite")
        # min eigenvalue is 1/2 - sqrt((d-1/2)^2 + |k|^2)
        r = math.hypot(self.d - 0.5, abs(self.k))
        if r > 0.5 + PSD_TOL:
            raise ValueError(
                f"invalid qubit state: d={self.d}, |k|={abs(self.k)} violates positivity"
            )

    def to_matrix(self) -> np.ndarray:
        return np.array(
            [[self.d, self.k], [np.conj(self.k), 1.0 - self.d]], dtype=complex
        )

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "QubitState":
        return cls(d=float(np.real(rho[0, 0])), k=complex(rho[0, 1]))
