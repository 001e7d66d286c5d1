"""Dense small-matrix linear algebra: determinants, SVD, cofactors, cone coordinates.

Every function here is pure and works on float64 ``numpy`` arrays. The
``batch_*`` helpers operate on stacks of shape ``(m, n, n)`` and are what the
path builders use internally; the scalar versions carry the public contract.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_same_size, check_square

SQRT2 = np.sqrt(2.0)
TIE_RTOL = 1e-13


class SvdConvergenceError(ArithmeticError):
    """Raised when LAPACK fails to converge on an SVD."""


@dataclass(frozen=True)
class SvdFactorization:
    """``A = u @ diag(sigma) @ v.T`` with ``sigma`` descending."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        return (self.u * self.sigma) @ self.v.T


@dataclass(frozen=True)
class ConeCoords2:
    """Rotated, isometric coordinates on the space of 2x2 matrices.

    The determinantal variety is the cone ``x**2 + y**2 == z**2 + w**2``.
    """

    x: float
    y: float
    z: float
    w: float

    def as_array(self):
        return np.array([self.x, self.y, self.z, self.w])

    @property
    def det(self):
        return 0.5 * (self.x**2 + self.y**2 - self.z**2 - self.w**2)


@dataclass(frozen=True)
class DetPolynomial:
    """Coefficients (ascending powers) of ``t -> det((1 - t) A + t B)``."""

    coeffs: np.ndarray

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1


def det(A):
    """Determinant through LU factorization with partial pivoting."""
    A = check_square(A)
    return float(np.linalg.det(A))


def batch_det(stack):
    return np.linalg.det(np.asarray(stack, dtype=float))


def frobenius_dist(A, B):
    A, B = check_same_size(A, B)
    D = A - B
    m = np.max(np.abs(D))
    # rescale first so tiny differences do not underflow to zero
    return float(m * np.linalg.norm(D / m)) if m > 0 else 0.0


def _sign_fix(u, v):
    # Flip each singular pair so the first non-negligible entry of u is >= 0.
    # Works on stacks: u, v have shape (..., n, n) with singular vectors as columns.
    mag = np.abs(u)
    thresh = 1e-12 * np.max(mag, axis=-2, keepdims=True)
    first = np.argmax(mag > thresh, axis=-2)
    lead = np.take_along_axis(u, first[..., None, :], axis=-2)
    flip = np.where(lead < 0, -1.0, 1.0)
    return u * flip, v * flip


def batch_svd(stack, canonical_ties=False):
    """SVD of a stack with the deterministic sign convention.

    Returns ``(u, s, v)`` where ``u``/``v`` hold singular vectors as columns.
    With ``canonical_ties`` the basis inside repeated singular values is
    also fixed (slower; the internal callers only need basis-free results).
    """
    stack = np.asarray(stack, dtype=float)
    try:
        u, s, vt = np.linalg.svd(stack)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(
            f"SVD failed to converge ({exc}); max |entry| = {np.max(np.abs(stack)):.3e}"
        ) from exc
    v = np.swapaxes(vt, -1, -2)
    if canonical_ties:
        u, v = _canonical_ties(u, s, v)
    u, v = _sign_fix(u, v)
    return u, s, v


def _echelon(block):
    # orthogonal Q with block @ Q the lexicographically first basis of its span:
    # Gram-Schmidt on the projections of e_1, e_2, ... onto the span
    P = block @ block.T
    basis = []
    for i in range(P.shape[0]):
        w = P[:, i].copy()
        for b in basis:
            w -= (b @ w) * b
        nw = np.linalg.norm(w)
        if nw > 1e-8:
            basis.append(w / nw)
            if len(basis) == block.shape[1]:
                break
    return block.T @ np.stack(basis, axis=1)


def _canonical_ties(u, s, v, rtol=TIE_RTOL):
    """Fix the basis inside clusters of repeated singular values.

    LAPACK returns an arbitrary orthonormal basis for a repeated singular
    value. Equal positive values get the echelon basis of their left block,
    rotated jointly; the null block is put in echelon form on each side.
    """
    if s.shape[-1] < 2:
        return u, v
    ref = s[..., :1]
    tied = np.abs(np.diff(s, axis=-1)) <= rtol * ref
    if not np.any(tied):
        return u, v
    u, v = u.copy(), v.copy()
    flat_u = u.reshape((-1,) + u.shape[-2:])
    flat_v = v.reshape((-1,) + v.shape[-2:])
    flat_s = s.reshape(-1, s.shape[-1])
    for idx in np.nonzero(np.any(tied.reshape(len(flat_s), -1), axis=1))[0]:
        sv = flat_s[idx]
        n = sv.size
        i = 0
        while i < n:
            j = i + 1
            while j < n and abs(sv[j - 1] - sv[j]) <= rtol * sv[0]:
                j += 1
            if j - i > 1:
                U, V = flat_u[idx][:, i:j], flat_v[idx][:, i:j]
                if sv[i] <= rtol * sv[0]:
                    flat_u[idx][:, i:j] = U @ _echelon(U)
                    flat_v[idx][:, i:j] = V @ _echelon(V)
                else:
                    Q = _echelon(U)
                    flat_u[idx][:, i:j] = U @ Q
                    flat_v[idx][:, i:j] = V @ Q
            i = j
    return flat_u.reshape(u.shape), flat_v.reshape(v.shape)


def svd(A):
    """Full SVD with singular values descending and fixed signs.

    Raises
    ------
    SvdConvergenceError
        If LAPACK does not converge. The message reports the entry scale
        and, when computable, the condition number.
    """
    A = check_square(A)
    try:
        u, s, v = batch_svd(A, canonical_ties=True)
    except SvdConvergenceError as exc:
        try:
            cond = np.linalg.cond(A)
        except np.linalg.LinAlgError:
            cond = float("nan")
        raise SvdConvergenceError(f"{exc}; cond = {cond:.3e}") from exc
    return SvdFactorization(u=u, sigma=s, v=v)


def _prod_except(s):
    # prod_{j != i} s_j for every i, without dividing by s_i.
    n = s.shape[-1]
    left = np.ones_like(s)
    right = np.ones_like(s)
    for i in range(1, n):
        left[..., i] = left[..., i - 1] * s[..., i - 1]
        right[..., n - 1 - i] = right[..., n - i] * s[..., n - i]
    return left * right


def batch_cofactor(stack):
    """Cofactor matrices (gradients of det) of a stack, via the SVD."""
    stack = np.asarray(stack, dtype=float)
    u, s, v = batch_svd(stack)
    orient = np.linalg.det(u) * np.linalg.det(v)
    core = (u * _prod_except(s)[..., None, :]) @ np.swapaxes(v, -1, -2)
    return core * orient[..., None, None]


def cofactor_matrix(A):
    """Matrix of cofactors ``C[i, j] = d det / d A[i, j]``.

    Computed from the SVD as ``det(U) det(V) U diag(prod_{j!=i} s_j) V^T`` so it
    stays accurate on the singular locus; for rank <= n-2 it is zero up to
    roundoff.
    """
    A = check_square(A)
    return batch_cofactor(A)


def to_cone_coords(A):
    A = check_square(A)
    if A.shape != (2, 2):
        raise ValueError("cone coordinates are defined for 2x2 matrices only")
    (a, b), (c, d) = A
    return ConeCoords2(
        x=(a + d) / SQRT2, y=(b - c) / SQRT2, z=(a - d) / SQRT2, w=(b + c) / SQRT2
    )


def from_cone_coords(coords):
    if isinstance(coords, ConeCoords2):
        x, y, z, w = coords.x, coords.y, coords.z, coords.w
    else:
        x, y, z, w = np.asarray(coords, dtype=float)
    return np.array([[x + z, y + w], [w - y, x - z]]) / SQRT2


def chebyshev_nodes(count):
    j = np.arange(count)
    return 0.5 * (1.0 - np.cos((2 * j + 1) * np.pi / (2 * count)))


def chord_points(A, B, t):
    t = np.asarray(t, dtype=float)[:, None, None]
    return (1.0 - t) * A + t * B


def det_along_segment(A, B):
    """Interpolate the degree-n polynomial ``det((1 - t) A + t B)``.

    The determinant is sampled at ``n + 1`` Chebyshev nodes on [0, 1] and the
    Vandermonde system is solved for the monomial coefficients.
    """
    A, B = check_same_size(A, B)
    n = A.shape[0]
    t = chebyshev_nodes(n + 1)
    values = batch_det(chord_points(A, B, t))
    vander = np.vander(t, n + 1, increasing=True)
    return DetPolynomial(coeffs=np.linalg.solve(vander, values))
