"""Rank stratification of n x n matrix space.

The stratum of rank-k matrices has dimension ``n**2 - (n - k)**2``; its
closure is a linear cone with apex at the zero matrix, and the determinantal
variety is the closure of the rank ``n - 1`` stratum.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_square
from .matspace import batch_svd, svd

DEFAULT_TAU = 1e-8


@dataclass(frozen=True)
class StratumLabel:
    k: int
    tau: float


@dataclass(frozen=True)
class NormalForm:
    """Invertible ``p``, ``q`` with ``p @ A @ q == I_k (+) 0``."""

    p: np.ndarray
    q: np.ndarray
    k: int


def _count_rank(s, tau, floor):
    ref = np.maximum(s[..., 0], floor)
    return np.sum(s > tau * ref[..., None], axis=-1)


def classify_rank(A, tau=DEFAULT_TAU, floor=1.0):
    """Numerical rank: singular values above ``tau * max(sigma_1, floor)``.

    ``floor=1.0`` keeps tiny matrices from being promoted by noise; pass
    ``floor=0.0`` for a purely relative (scale-invariant) decision.
    """
    A = check_square(A)
    if not 0.0 < tau <= 1e-2:
        raise ValueError(f"tau must lie in (0, 1e-2], got {tau}")
    s = np.linalg.svd(A, compute_uv=False)
    return StratumLabel(k=int(_count_rank(s, tau, floor)), tau=tau)


def batch_rank(stack, tau=DEFAULT_TAU, floor=0.0):
    s = np.linalg.svd(np.asarray(stack, dtype=float), compute_uv=False)
    return _count_rank(s, tau, floor)


def distance_to_variety(A):
    """Frobenius distance from ``A`` to the singular matrices (smallest singular value)."""
    A = check_square(A)
    return float(np.linalg.svd(A, compute_uv=False)[-1])


def batch_project(stack, r):
    """Truncate every matrix in a stack to its top ``r`` singular components."""
    stack = np.asarray(stack, dtype=float)
    u, s, v = batch_svd(stack)
    s = s.copy()
    s[..., r:] = 0.0
    return (u * s[..., None, :]) @ np.swapaxes(v, -1, -2)


def project_to_rank(A, r):
    """Nearest matrix of rank at most ``r`` (Eckart-Young truncation)."""
    A = check_square(A)
    n = A.shape[0]
    if not 0 <= r <= n:
        raise ValueError(f"rank must lie in [0, {n}], got {r}")
    if r == n:
        return A.copy()
    return batch_project(A, r)


def rank_bump_direction(A, k):
    """Unit rank-one direction ``u_{k+1} v_{k+1}^T`` that lifts rank k to k + 1.

    Adding ``eps * D`` for small ``eps > 0`` to a rank-k matrix gives a
    matrix of rank exactly ``k + 1``. Only valid while the result stays
    singular, i.e. ``k < n - 1``; for ``k = n - 1`` push along the cofactor
    instead.
    """
    A = check_square(A)
    n = A.shape[0]
    if k >= n - 1:
        raise ValueError(
            f"k={k} >= n-1={n - 1}: a rank bump would leave the variety; "
            "use the cofactor push-out"
        )
    if k < 0:
        raise ValueError("k must be non-negative")
    f = svd(A)
    return np.outer(f.u[:, k], f.v[:, k])


def transport_bump(previous, A, k):
    """Carry a bump direction to a nearby rank-k matrix.

    ``previous`` is projected onto the left and right null spaces of ``A``,
    which keeps it rank one; this is the discrete version of following a
    constant section along a path. Falls back to the fresh SVD direction
    when the projection degenerates.
    """
    u, s, v = batch_svd(A, canonical_ties=True)
    left = u[:, k:] @ u[:, k:].T
    right = v[:, k:] @ v[:, k:].T
    D = left @ previous @ right
    norm = np.linalg.norm(D)
    if norm < 1e-3:
        D = np.outer(u[:, k], v[:, k])
        if np.sum(D * previous) < 0:
            D = -D
        return D
    return D / norm


def normalize_stratum_point(A, tau=DEFAULT_TAU):
    """SVD-based ``GL x GL`` normalization of a rank-k matrix to ``I_k (+) 0``.

    Returns ``p = diag(s_1..s_k, 1..1)^{-1} U^T`` and ``q = V``.
    """
    A = check_square(A)
    k = classify_rank(A, tau=tau).k
    f = svd(A)
    scale = np.ones(A.shape[0])
    scale[:k] = f.sigma[:k]
    p = f.u.T / scale[:, None]
    return NormalForm(p=p, q=f.v.copy(), k=k)


def stratum_parametrization(L, R, k):
    """Map ``(L, R) -> L (I_k (+) 0) R``, whose image is the rank-k stratum."""
    n = L.shape[0]
    J = np.zeros((n, n))
    J[:k, :k] = np.eye(k)
    return L @ J @ R


def stratum_jacobian_spectrum(L, R, k, h=1e-6):
    """Singular values of a central-difference Jacobian of the parametrization."""
    n = L.shape[0]
    params = np.concatenate([L.ravel(), R.ravel()])

    def f(x):
        return stratum_parametrization(x[: n * n].reshape(n, n), x[n * n:].reshape(n, n), k).ravel()

    cols = []
    for i in range(params.size):
        e = np.zeros_like(params)
        e[i] = h
        cols.append((f(params + e) - f(params - e)) / (2 * h))
    return np.linalg.svd(np.column_stack(cols), compute_uv=False)
