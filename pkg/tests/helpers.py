"""Shared test utilities: independent oracle implementations.

Everything here deliberately avoids the library's own code paths (einsum
partial traces, Hermitian-trick concurrence, tensordot gate application) so
tests compare two genuinely different routes.
"""

import numpy as np

SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SY_SY = np.kron(SY, SY)


def rand_unitary(rng, dim):
    """Haar-ish random unitary from the QR decomposition of a Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_density(rng, dim=4, rank=None):
    """Random density matrix from a Wishart factor of the given rank."""
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def rand_pure(rng, dim=2):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def channel_conjugation(u4, rho2, p):
    """One collision by explicit 4x4 conjugation and reshape-trace."""
    xi = np.diag([p, 1.0 - p]).astype(complex)
    big = u4 @ np.kron(rho2, xi) @ u4.conj().T
    return np.trace(big.reshape(2, 2, 2, 2), axis1=1, axis2=3)


def brute_concurrence(rho):
    """Wootters concurrence by explicit spin flip and eigenvalue sort."""
    r = rho @ SY_SY @ rho.conj() @ SY_SY
    lam = np.sort(np.sqrt(np.clip(np.real(np.linalg.eigvals(r)), 0.0, None)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def embed_gate(u4, n_qubits, i, j):
    """Explicit 2^n x 2^n matrix acting as u4 on qubits (i, j), identity elsewhere."""
    dim = 2**n_qubits
    full = np.zeros((dim, dim), dtype=complex)
    for row in range(dim):
        rb = [(row >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        for col in range(dim):
            cb = [(col >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
            if any(rb[q] != cb[q] for q in range(n_qubits) if q not in (i, j)):
                continue
            full[row, col] = u4[2 * rb[i] + rb[j], 2 * cb[i] + cb[j]]
    return full
