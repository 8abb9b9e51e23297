"""Wootters concurrence and the entangling power of a machine.

The entangling power is the largest concurrence the machine can create in
one collision against the thermal ancilla, maximized over system inputs.
Restricting to pure inputs loses nothing: the post-collision state is
linear in the input and concurrence is convex, so the maximum over the
(compact, convex) state space is attained at an extreme point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .linalg import SY, tensor, validate_density
from .channel import BathSpec, bath_state
from .machines import MachineParams, build_machine

SY_SY = tensor(SY, SY)


def _concurrence_batch(rhos: np.ndarray) -> np.ndarray:
    """Concurrences of a stack of valid two-qubit density matrices.

    Uses the Hermitian square-root route: the sorted square roots of the
    eigenvalues of the spin-flipped product rho*rho_tilde equal the singular
    values of M = sqrt(rho) (sy x sy) sqrt(rho)*, since M M^dag is similar
    to the product.  Taking singular values directly keeps full precision
    for the near-zero ones; negative round-off eigenvalues of rho are
    clamped at zero before the square root.
    """
    w, v = np.linalg.eigh(rhos)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))[..., None, :]) @ np.conj(
        np.swapaxes(v, -1, -2)
    )
    m = sqrt_rho @ SY_SY @ sqrt_rho.conj()
    lam = np.linalg.svd(m, compute_uv=False)  # descending
    c = 2.0 * lam[..., 0] - lam.sum(axis=-1)
    return np.maximum(c, 0.0)


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix, in [0, 1]."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4) or not validate_density(rho):
        raise ValueError("concurrence requires a valid 4x4 density matrix")
    return float(_concurrence_batch(rho[None])[0])


def bloch_state(theta: float, phi: float) -> np.ndarray:
    """Pure qubit state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


@dataclass(frozen=True)
class EntanglingPowerResult:
    """Maximum one-collision concurrence and the maximizing input state."""

    value: float
    argmax_theta: float
    argmax_phi: float

    @property
    def argmax_state(self) -> np.ndarray:
        return bloch_state(self.argmax_theta, self.argmax_phi)


def _post_collision_batch(states: np.ndarray, u4: np.ndarray, xi: np.ndarray) -> np.ndarray:
    proj = states[:, :, None] * states.conj()[:, None, :]
    rho_in = np.einsum("nij,kl->nikjl", proj, xi).reshape(-1, 4, 4)
    return np.einsum("ab,nbc,dc->nad", u4, rho_in, u4.conj())


def entangling_power(
    m: MachineParams,
    b: BathSpec,
    grid: "tuple[int, int]" = (32, 64),
    refine_tol: float = 1e-9,
) -> EntanglingPowerResult:
    """Maximize the post-collision concurrence over pure system inputs.

    A Bloch-sphere grid (at least 32x64) locates the basin, then a
    derivative-free simplex refinement polishes the maximizer to
    `refine_tol`.  For p > q the maximum sits at the excited state |1>.
    """
    n_t, n_p = grid
    if n_t < 32 or n_p < 64:
        raise ValueError("grid resolution must be at least 32x64")
    u4 = build_machine(m)
    xi = bath_state(b)

    thetas = np.linspace(0.0, math.pi, n_t)
    phis = np.linspace(0.0, 2 * math.pi, n_p, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    states = np.stack(
        [np.cos(tt / 2), np.exp(1j * pp) * np.sin(tt / 2)], axis=-1
    ).reshape(-1, 2)
    values = _concurrence_batch(_post_collision_batch(states, u4, xi))
    best = int(np.argmax(values))
    x0 = np.array([tt.ravel()[best], pp.ravel()[best]])

    def neg(x):
        st = bloch_state(x[0], x[1])[None]
        return -float(_concurrence_batch(_post_collision_batch(st, u4, xi))[0])

    res = minimize(
        neg,
        x0,
        method="Nelder-Mead",
        options={
            "xatol": refine_tol,
            "fatol": refine_tol,
            "maxiter": 2000,
            "initial_simplex": np.array(
                [x0, x0 + [0.05, 0.0], x0 + [0.0, 0.05]]
            ),
        },
    )
    value = max(-float(res.fun), float(values[best]))
    # report canonical Bloch angles of the optimized state
    st = bloch_state(res.x[0], res.x[1])
    th = 2.0 * math.atan2(abs(st[1]), abs(st[0]))
    ph = float(np.angle(st[1] * np.conj(st[0]))) % (2 * math.pi) if abs(st[1]) > 1e-12 and abs(st[0]) > 1e-12 else 0.0
    return EntanglingPowerResult(value=value, argmax_theta=th, argmax_phi=ph)


def entangling_power_closed(p: float, phi: float) -> float:
    """Closed form max(p, q) sin(2 phi).

    p sin(2 phi) for p >= q (maximizer |1>); the p < q branch is the
    symmetric extension (maximizer |0>), confirmed numerically.
    """
    return max(p, 1.0 - p) * math.sin(2 * phi)
