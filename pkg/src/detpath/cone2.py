"""The 2x2 case, where the determinantal variety is a cone over a flat torus.

In the isometric coordinates of :func:`detpath.matspace.to_cone_coords` the
variety is ``x**2 + y**2 == z**2 + w**2``; its trace on the sphere of radius
``r`` is a Clifford torus with flat metric ``(r**2 / 2)(da**2 + db**2)``, so
torus geodesics are straight lines in the two angles.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_eps, check_same_size
from .matspace import SQRT2, batch_det, from_cone_coords, to_cone_coords
from .paths import PolylinePath, certify, join_nodes
from .surgery import (
    DEFAULT_EPS,
    InfeasiblePathError,
    _ApexHit,
    _assemble,
    _pushout,
    _run_with_halving,
)

NODE_SPACING = 1e-3
APEX_NORM = 1e-12


@dataclass(frozen=True)
class TorusPoint:
    """A point of the 2x2 variety in polar form: level ``r`` and two angles."""

    r: float
    alpha: float
    beta: float

    def coords(self):
        c = self.r / SQRT2
        return np.array([
            c * np.cos(self.alpha), c * np.sin(self.alpha),
            c * np.cos(self.beta), c * np.sin(self.beta),
        ])

    def matrix(self):
        return from_cone_coords(self.coords())

    @classmethod
    def from_matrix(cls, A):
        c = to_cone_coords(A)
        r = float(np.linalg.norm(A))
        alpha = float(np.arctan2(c.y, c.x) % (2 * np.pi))
        beta = float(np.arctan2(c.w, c.z) % (2 * np.pi))
        return cls(r=r, alpha=alpha, beta=beta)


def _wrap(delta):
    # shortest signed angle, in (-pi, pi]
    d = (delta + np.pi) % (2 * np.pi) - np.pi
    return np.pi if d == -np.pi else d


def torus_geodesic(p, q, r=None):
    """Flat-torus geodesic between two points at level ``r``.

    Each angle is interpolated along its shorter arc; nodes are spaced at
    most ``1e-3 * r`` apart along the curve.
    """
    r = p.r if r is None else float(r)
    if r <= 0:
        raise ValueError("torus level must be positive")
    da = _wrap(q.alpha - p.alpha)
    db = _wrap(q.beta - p.beta)
    arc = (r / SQRT2) * np.hypot(da, db)
    if arc == 0:
        return PolylinePath(TorusPoint(r, p.alpha, p.beta).matrix()[None])
    m = int(np.ceil(arc / (NODE_SPACING * r)))
    s = np.linspace(0.0, 1.0, m + 1)
    c = r / SQRT2
    a = p.alpha + s * da
    b = p.beta + s * db
    coords = np.stack([c * np.cos(a), c * np.sin(a), c * np.cos(b), c * np.sin(b)], axis=1)
    x, y, z, w = coords.T
    nodes = np.stack([np.stack([x + z, y + w], -1), np.stack([w - y, x - z], -1)], axis=1) / SQRT2
    return PolylinePath(nodes)


def _check_on_cone(M, name):
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2")
    if abs(np.linalg.det(M)) > 1e-9 * max(np.sum(M * M), 1e-300):
        raise ValueError(f"{name} is not on the 2x2 determinantal cone")
    return M


def cone_path(P, Q):
    """Path on the 2x2 variety: slide along a ray, then follow the torus.

    The farther point slides toward the apex until it reaches the level of
    the nearer one, then a flat-torus geodesic finishes the trip. If either
    point is the apex the straight segment already lies on the cone.
    """
    P = _check_on_cone(P, "P")
    Q = _check_on_cone(Q, "Q")
    rP, rQ = np.linalg.norm(P), np.linalg.norm(Q)
    if rP <= APEX_NORM or rQ <= APEX_NORM:
        if np.array_equal(P, Q):
            return PolylinePath(P[None])
        return PolylinePath(np.stack([P, Q]))
    if rP >= rQ:
        Ps = P * (rQ / rP)
        geo = torus_geodesic(TorusPoint.from_matrix(Ps), TorusPoint.from_matrix(Q), rQ).nodes
        geo[0], geo[-1] = Ps, Q
        nodes = join_nodes([P[None], geo])
    else:
        Qs = Q * (rP / rQ)
        geo = torus_geodesic(TorusPoint.from_matrix(P), TorusPoint.from_matrix(Qs), rP).nodes
        geo[0], geo[-1] = P, Qs
        nodes = join_nodes([geo, Q[None]])
    path = PolylinePath(nodes)
    bound = abs(rP - rQ) + np.pi * min(rP, rQ)
    assert path.length <= bound * (1 + 1e-12), (path.length, bound)
    return path


def _cone_arc(stats):
    def build(P, Q, eps):
        if np.array_equal(P, Q):
            nodes = P[None]
        else:
            nodes = cone_path(P, Q).nodes
        norms = np.linalg.norm(nodes.reshape(len(nodes), -1), axis=1)
        if norms.min() < eps * max(norms[0], norms[-1]):
            raise _ApexHit()
        return _pushout(nodes, eps)

    return build


def surgery2(A, B, eps=DEFAULT_EPS, seed=None):
    """Certified GL+(2) path built from cone paths on the 2x2 variety.

    Raises
    ------
    InfeasiblePathError
        If no eps in the halving schedule (20 halvings) gives a path with
        positive determinant throughout.
    """
    A, B = check_same_size(A, B)
    if A.shape != (2, 2):
        raise ValueError("surgery2 handles 2x2 matrices only")
    eps = check_eps(eps)
    if not (batch_det(A) > 0 and batch_det(B) > 0):
        raise ValueError("surgery2 needs det(A) > 0 and det(B) > 0")
    if np.array_equal(A, B):
        return certify(PolylinePath(A[None]), A, B, eps_used=eps, seed=seed)

    def assemble(A0, B0, dec, e, stats):
        return _assemble(A0, B0, dec, e, _cone_arc(stats), stats)

    return _run_with_halving(A, B, eps, assemble, seed)


__all__ = [
    "TorusPoint",
    "torus_geodesic",
    "cone_path",
    "surgery2",
    "InfeasiblePathError",
]
