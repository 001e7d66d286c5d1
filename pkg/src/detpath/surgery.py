"""Constructive paths inside GL+(n): chord surgery on the determinantal variety.

The straight chord between two positive-determinant matrices is split at the
roots of its determinant polynomial. Every stretch of the chord that leaves
GL+ is replaced by an arc on the variety (SVD projection of the chord), arcs
that dip into deeper rank strata are lifted stratum by stratum with a
transported rank-one bump, and the result is pushed into GL+ along the
cofactor normal. Arcs that run through the cone apex are replaced by a
detour over a small sphere around the origin.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, schur

from ._validation import check_eps, check_same_size, check_square
from .matspace import (
    batch_cofactor,
    batch_det,
    batch_svd,
    chord_points,
    det_along_segment,
)
from .paths import OVERSAMPLE, PolylinePath, certify, join_nodes
from .strata import DEFAULT_TAU, batch_project, batch_rank, transport_bump

log = logging.getLogger(__name__)

DEFAULT_EPS = 1e-3
DEFAULT_RESOLUTION = 0.02
MAX_HALVINGS = 20
REFINE_ROUNDS = 4
ROOT_IMAG_TOL = 1e-8
ROOT_DEDUP = 1e-8
MAX_SEGMENT_NODES = 20000


class InfeasiblePathError(RuntimeError):
    """No certified path could be built within the eps-halving budget."""


class _Retry(Exception):
    """Internal: the current eps failed a positivity or length check."""


class _ApexHit(Exception):
    """Internal: an arc reached the zero matrix and must be rerouted."""


@dataclass(frozen=True)
class SegmentDecomposition:
    """Roots of the chord determinant in (0, 1) and the sign on each interval.

    ``interval_signs`` has one more entry than ``crossings``; each sign is
    one of ``'+'``, ``'-'`` or ``'0'``.
    """

    crossings: tuple
    interval_signs: tuple

    @property
    def intervals(self):
        b = (0.0,) + tuple(self.crossings) + (1.0,)
        return list(zip(b[:-1], b[1:]))


# ---------------------------------------------------------------------------
# chord splitting


def _zero_tol(A, B):
    n = A.shape[0]
    ref = max(np.linalg.norm(A), np.linalg.norm(B), 1e-300) ** n
    return 1e-12 * ref


def split_segment(A, B):
    """Split the chord from ``A`` to ``B`` where its determinant vanishes.

    Real roots of the interpolated determinant polynomial are found from the
    eigenvalues of its companion matrix. Roots closer than ``1e-8`` (or
    separated only by a stretch where the determinant is numerically zero)
    are merged, so a tangency shows up as one crossing flanked by equal signs.
    """
    A, B = check_same_size(A, B)
    poly = det_along_segment(A, B)
    tol = _zero_tol(A, B)
    coeffs = poly.coeffs.copy()
    if np.max(np.abs(coeffs)) <= tol:
        return SegmentDecomposition(crossings=(), interval_signs=("0",))

    big = np.max(np.abs(coeffs))
    nz = np.nonzero(np.abs(coeffs) > 1e-14 * big)[0]
    coeffs = coeffs[: nz[-1] + 1]
    roots = np.polynomial.polynomial.polyroots(coeffs) if coeffs.size > 1 else np.array([])

    candidates = []
    for z in np.atleast_1d(roots):
        x = float(np.real(z))
        if not 0.0 < x < 1.0:
            continue
        if abs(np.imag(z)) <= ROOT_IMAG_TOL:
            candidates.append(x)
        elif abs(np.imag(z)) <= 1e-5:
            # near-double root split by roundoff: keep it if det really vanishes there
            if abs(batch_det(chord_points(A, B, [x]))[0]) <= tol:
                candidates.append(x)
    candidates.sort()

    def det_at(t):
        return batch_det(chord_points(A, B, np.atleast_1d(t)))

    merged = []
    for x in candidates:
        if merged:
            prev = merged[-1][-1]
            if x - prev <= ROOT_DEDUP or (
                x - prev <= 1e-5 and abs(det_at(0.5 * (x + prev))[0]) <= tol
            ):
                merged[-1].append(x)
                continue
        merged.append([x])
    crossings = tuple(float(np.mean(c)) for c in merged)

    bounds = np.array((0.0,) + crossings + (1.0,))
    mids = 0.5 * (bounds[:-1] + bounds[1:])
    vals = det_at(mids)
    signs = tuple("0" if abs(v) <= tol else ("+" if v > 0 else "-") for v in vals)
    return SegmentDecomposition(crossings=crossings, interval_signs=signs)


# ---------------------------------------------------------------------------
# arcs on the variety


def _segment_nodes(X, Y, spacing):
    d = np.linalg.norm(Y - X)
    m = int(np.ceil(d / spacing)) if spacing > 0 else 1
    m = min(max(m, 1), MAX_SEGMENT_NODES)
    return chord_points(X, Y, np.linspace(0.0, 1.0, m + 1))


def _projected_chord(P, Q, r, resolution):
    """Project a sampled chord to rank <= r, refining where the image jumps.

    Returns ``(nodes, t, jumps)`` with ``jumps`` the indices ``j`` for which the
    gap between nodes ``j`` and ``j + 1`` stayed above the continuity bound.
    """
    dist = np.linalg.norm(Q - P)
    m = max(2, int(np.ceil(1.0 / resolution)) + 1)
    t = np.linspace(0.0, 1.0, m)
    nodes = batch_project(chord_points(P, Q, t), r)
    nodes[0], nodes[-1] = P, Q
    limit = 10.0 * resolution * dist
    for _ in range(REFINE_ROUNDS):
        gaps = np.linalg.norm(np.diff(nodes, axis=0).reshape(len(t) - 1, -1), axis=1)
        bad = np.nonzero(gaps > limit)[0]
        if bad.size == 0:
            break
        new_t = 0.5 * (t[bad] + t[bad + 1])
        new_nodes = batch_project(chord_points(P, Q, new_t), r)
        order = np.argsort(np.concatenate([t, new_t]), kind="stable")
        t = np.concatenate([t, new_t])[order]
        nodes = np.concatenate([nodes, new_nodes])[order]
    gaps = np.linalg.norm(np.diff(nodes, axis=0).reshape(len(t) - 1, -1), axis=1)
    jumps = np.nonzero(gaps > limit)[0]
    return nodes, t, jumps


def _route_jumps(P, Q, r, nodes, t, jumps, resolution):
    """Replace each projection jump by a detour through the rank r-1 closure."""
    if jumps.size == 0:
        return nodes
    # a jump can be long compared to a short chord; size the detour steps
    # by the chord or a small fraction of the endpoint norms
    ref = max(np.linalg.norm(Q - P), 1e-3 * max(np.linalg.norm(P), np.linalg.norm(Q)), 1e-300)
    spacing = resolution * ref
    pieces = []
    start = 0
    for j in jumps:
        pieces.append(nodes[start: j + 1])
        lo = chord_points(P, Q, [t[j], t[j + 1]])
        low = batch_project(lo, r - 1)
        pieces.append(_segment_nodes(nodes[j], low[0], spacing)[1:])
        pieces.append(_segment_nodes(low[1], nodes[j + 1], spacing)[:-1])
        start = j + 1
    pieces.append(nodes[start:])
    return join_nodes(pieces)


def _variety_arc(P, Q, r, resolution):
    nodes, t, jumps = _projected_chord(P, Q, r, resolution)
    if jumps.size:
        log.debug("rank-%d projection discontinuous at %d place(s); routing down", r, jumps.size)
    return _route_jumps(P, Q, r, nodes, t, jumps, resolution), int(jumps.size)


def variety_arc(P, Q, resolution=DEFAULT_RESOLUTION):
    """Arc on the determinantal variety joining two of its points.

    The chord is sampled at spacing ``resolution * |P - Q|`` and each sample
    is projected to rank ``n - 1``. Where consecutive projections are more
    than ``10 * resolution * |P - Q|`` apart the sampling is refined up to
    four times; remaining discontinuities are bridged through the rank
    ``n - 2`` closure, leaving lower-rank nodes to be lifted by the caller.
    """
    P, Q = check_same_size(P, Q)
    n = P.shape[0]
    for name, M in (("P", P), ("Q", Q)):
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] > 1e-8 * (1.0 + np.linalg.norm(M)):
            raise ValueError(f"{name} is not on the determinantal variety (sigma_n={s[-1]:.3e})")
    if np.linalg.norm(P - Q) == 0:
        return PolylinePath(P[None])
    nodes, _ = _variety_arc(P, Q, n - 1, resolution)
    return PolylinePath(nodes)


# ---------------------------------------------------------------------------
# lifting through the strata


def _path_scale(nodes):
    s = float(np.max(np.linalg.norm(nodes.reshape(len(nodes), -1), axis=1)))
    return s if s > 0 else 1.0


def _bump_field(nodes, k, initial=None):
    """Rank-one bump directions along a rank-k path, carried node to node."""
    if initial is None:
        u, s, v = batch_svd(nodes[:1], canonical_ties=True)
        D = np.outer(u[0][:, k], v[0][:, k])
    else:
        D = transport_bump(initial, nodes[0], k)
    out = np.empty_like(nodes)
    out[0] = D
    for i in range(1, len(nodes)):
        D = transport_bump(D, nodes[i], k)
        out[i] = D
    return out


def _pair(M, k):
    u, s, v = batch_svd(M)
    return u[:, k], v[:, k]


def _slerp(a, b, t):
    ang = np.arccos(np.clip(a @ b, -1.0, 1.0))
    if ang < 1e-12:
        return np.outer(1 - t, a) + np.outer(t, b)
    perp = b - (a @ b) * a
    pn = np.linalg.norm(perp)
    if pn < 1e-12:
        # antipodal: any orthogonal direction works
        perp = np.linalg.svd(a[None])[2][-1]
    else:
        perp = perp / pn
    th = np.outer(t * ang, np.ones_like(a))
    return np.cos(th) * a + np.sin(th) * perp


def _fiber_rotation(L, D, target, k, rho, step=0.05):
    """Rank-(k+1) connector ``L + rho a(t) b(t)^T`` turning ``D`` toward ``target``.

    ``a`` and ``b`` follow great circles in the left and right null spaces
    of the rank-k matrix ``L``; the end direction is the (k+1)-th singular
    pair of ``target`` restricted to those null spaces.
    """
    u, s, v = batch_svd(L)
    Nl, Nr = u[:, k:], v[:, k:]
    tu, tv = _pair(target, k)
    a1, b1 = Nl @ (Nl.T @ tu), Nr @ (Nr.T @ tv)
    if min(np.linalg.norm(a1), np.linalg.norm(b1)) < 1e-3:
        return L[None] + rho * D[None]
    a1, b1 = a1 / np.linalg.norm(a1), b1 / np.linalg.norm(b1)
    a0, b0 = _pair(D, 0)
    if np.arccos(np.clip(-a0 @ a1, -1, 1)) + np.arccos(np.clip(-b0 @ b1, -1, 1)) < (
            np.arccos(np.clip(a0 @ a1, -1, 1)) + np.arccos(np.clip(b0 @ b1, -1, 1))):
        a0, b0 = -a0, -b0
    total = np.arccos(np.clip(a0 @ a1, -1, 1)) + np.arccos(np.clip(b0 @ b1, -1, 1))
    m = max(int(np.ceil(total / step)), 1)
    t = np.linspace(0.0, 1.0, m + 1)
    A, Bv = _slerp(a0, a1, t), _slerp(b0, b1, t)
    return L[None] + rho * A[:, :, None] * Bv[:, None, :]


def ascend_stratum(path, eps=DEFAULT_EPS, k=None, tau=DEFAULT_TAU, initial=None):
    """Push a path in the closure of the rank-k stratum into the rank k+1 stratum.

    Every node moves by ``eps * scale * D_i`` where ``scale`` is the largest
    node norm and ``D_i`` is a unit rank-one direction in the joint null
    spaces of the node, transported from the previous node so the field
    varies continuously. ``initial`` seeds the first direction (it is
    projected onto the null spaces of the first node).

    Raises
    ------
    ValueError
        If ``k + 1 > n - 1`` (the cofactor push-out applies instead).
    """
    eps = check_eps(eps)
    nodes = np.asarray(path.nodes if isinstance(path, PolylinePath) else path, dtype=float)
    n = nodes.shape[-1]
    if k is None:
        k = int(np.max(batch_rank(nodes, tau)))
    if k + 1 > n - 1:
        raise ValueError(f"cannot ascend from rank {k}: target {k + 1} exceeds n-1={n - 1}")
    scale = _path_scale(nodes)
    bumps = _bump_field(nodes, k, initial)
    lifted = nodes + eps * scale * bumps
    s = np.linalg.svd(lifted, compute_uv=False)
    ok_low = np.all(s[:, k] > 0.5 * eps * scale)
    ok_high = k + 1 >= n or np.all(s[:, k + 1] <= 1e-8 * s[:, 0])
    if not (ok_low and ok_high):
        raise _Retry(f"ascent to rank {k + 1} did not land in the stratum")
    before = PolylinePath(nodes).length
    after = PolylinePath(lifted).length
    terminal = np.linalg.norm(nodes[0]) + np.linalg.norm(nodes[-1])
    if after > before + 4 * eps * (before + terminal) + 1e-12 * scale:
        raise _Retry("ascent length budget exceeded")
    return PolylinePath(lifted)


def _bridge(X, Y, r, spacing):
    seg = _segment_nodes(X, Y, spacing)
    if len(seg) > 2:
        seg[1:-1] = batch_project(seg[1:-1], r)
    return seg


def _rank_one_arc(P, Q, spacing):
    """Rank-one path ``rho(t) a(t) b(t)^T``: great circles for ``a``, ``b``, linear ``rho``.

    Unlike a projected chord it never passes through the zero matrix.
    """
    up, sp, vp = batch_svd(P)
    uq, sq, vq = batch_svd(Q)
    a0, b0, a1, b1 = up[:, 0], vp[:, 0], uq[:, 0], vq[:, 0]

    def turn(x, y):
        return np.arccos(np.clip(x @ y, -1.0, 1.0))

    if turn(a0, -a1) + turn(b0, -b1) < turn(a0, a1) + turn(b0, b1):
        a1, b1 = -a1, -b1
    r0, r1 = sp[0], sq[0]
    est = abs(r1 - r0) + max(r0, r1) * (turn(a0, a1) + turn(b0, b1))
    m = min(max(int(np.ceil(est / spacing)), 1), MAX_SEGMENT_NODES)
    t = np.linspace(0.0, 1.0, m + 1)
    rho = (1 - t) * r0 + t * r1
    nodes = rho[:, None, None] * _slerp(a0, a1, t)[:, :, None] * _slerp(b0, b1, t)[:, None, :]
    nodes[0], nodes[-1] = P, Q
    return nodes


def _stratum_arc(P, Q, k, eps, resolution, depth=0):
    """Path from P to Q (both rank k) whose nodes all have rank exactly k."""
    if k == 0 or np.linalg.norm(P - Q) == 0:
        return np.stack([P, Q]) if np.linalg.norm(P - Q) > 0 else P[None]
    if k == 1:
        ref = max(np.linalg.norm(P), np.linalg.norm(Q))
        return _rank_one_arc(P, Q, resolution * ref)
    nodes, _ = _variety_arc(P, Q, k, resolution)
    return _ascend_all(nodes, k, eps, resolution, depth + 1)


def _ascend_all(nodes, r, eps, resolution, depth=0):
    """Lift every node of a rank<=r path to rank exactly r (least rank first)."""
    if depth > 32:
        raise _Retry("stratum recursion too deep")
    n = nodes.shape[-1]
    for _ in range(4 * n + 4):
        ranks = batch_rank(nodes)
        k = int(ranks.min())
        if k >= r:
            return nodes
        if k == 0:
            raise _ApexHit()
        where = np.nonzero(ranks == k)[0]
        a, b = int(where[0]), int(where[-1])
        sub = _stratum_arc(nodes[a], nodes[b], k, eps, resolution, depth)
        init = None
        if a > 0:
            uu, vv = _pair(nodes[a - 1], k)
            init = np.outer(uu, vv)
        lifted = ascend_stratum(PolylinePath(sub), eps, k=k, initial=init).nodes
        spacing = resolution * max(_path_scale(nodes), 1e-300)
        pieces = [nodes[:a]]
        if a > 0:
            pieces.append(_bridge(nodes[a - 1], lifted[0], r, spacing)[1:-1])
        pieces.append(lifted)
        if b < len(nodes) - 1:
            rho = eps * _path_scale(sub)
            turn = _fiber_rotation(sub[-1], (lifted[-1] - sub[-1]) / rho, nodes[b + 1], k, rho)
            pieces.append(turn[1:])
            pieces.append(_bridge(turn[-1], nodes[b + 1], r, spacing)[1:-1])
        pieces.append(nodes[b + 1:])
        nodes = join_nodes(pieces)
    raise _Retry("stratum ascent did not terminate")


def _push_nodes(nodes, eps, scale):
    C = batch_cofactor(nodes)
    norms = np.linalg.norm(C.reshape(len(C), -1), axis=1)
    n = nodes.shape[-1]
    if np.any(norms <= 1e-12 * scale ** (n - 1)):
        raise ValueError("cofactor vanishes at a node of rank < n-1; ascend the path first")
    return nodes + eps * scale * C / norms[:, None, None]


def _segment_min_det(nodes, factor=OVERSAMPLE):
    if len(nodes) == 1:
        return batch_det(nodes)
    s = np.arange(1, factor) / factor
    a, b = nodes[:-1], nodes[1:]
    pts = a[:, None] + s[None, :, None, None] * (b - a)[:, None]
    return np.min(batch_det(pts.reshape(-1, *nodes.shape[1:])).reshape(len(a), -1), axis=1)


def _pushout(nodes, eps, scale=None):
    """Cofactor push-out with local refinement where a segment dips below det 0."""
    n = nodes.shape[-1]
    scale = _path_scale(nodes) if scale is None else scale
    for _ in range(REFINE_ROUNDS + 1):
        pushed = _push_nodes(nodes, eps, scale)
        if np.any(batch_det(pushed) <= 0):
            raise _Retry("pushed node not in GL+")
        if len(nodes) == 1:
            return pushed
        bad = np.nonzero(_segment_min_det(pushed) <= 0)[0]
        if bad.size == 0:
            return pushed
        mids = batch_project(0.5 * (nodes[bad] + nodes[bad + 1]), n - 1)
        nodes = np.insert(nodes, bad + 1, mids, axis=0)
    raise _Retry("push-out segments stay non-positive after refinement")


def pushout_to_glplus(path, eps=DEFAULT_EPS):
    """Push a path on the smooth part of the variety into GL+ along the cofactor.

    Node ``A_i`` becomes ``A_i + eps * scale * C_i / |C_i|``; since
    ``<grad det, C> = |C|**2`` this raises the determinant. Nodes and
    segments are checked for positivity; failing segments are refined and,
    if that does not help, eps is halved (at most 20 times).
    """
    eps = check_eps(eps)
    nodes = np.asarray(path.nodes, dtype=float)
    e = eps
    for _ in range(MAX_HALVINGS + 1):
        try:
            return PolylinePath(_pushout(nodes, e))
        except _Retry:
            e *= 0.5
    raise InfeasiblePathError("push-out failed after 20 eps halvings")


# ---------------------------------------------------------------------------
# sphere connector


def _polar(P):
    u, s, v = batch_svd(P)
    R = u @ v.T
    return R, v, s


def _so_log(R):
    """Real logarithm of a special orthogonal matrix (skew-symmetric)."""
    n = R.shape[0]
    T, Z = schur(R, output="real")
    K = np.zeros_like(T)
    i = 0
    minus = []
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > 1e-12:
            block = T[i: i + 2, i: i + 2]
            theta = np.arctan2(block[1, 0], block[0, 0])
            skew = 0.5 * (block - block.T)
            sin = np.sin(theta)
            K[i: i + 2, i: i + 2] = skew * (theta / sin if abs(sin) > 1e-15 else 1.0)
            i += 2
        else:
            if T[i, i] < 0:
                minus.append(i)
            i += 1
    for a, b in zip(minus[::2], minus[1::2]):
        K[a, b], K[b, a] = -np.pi, np.pi
    K = Z @ K @ Z.T
    return 0.5 * (K - K.T)


def _rescale(stack, radius):
    norms = np.linalg.norm(stack.reshape(len(stack), -1), axis=1)
    return stack * (radius / norms)[:, None, None]


def _adaptive_curve(f, radius, max_gap=0.05, start=16, cap=4096):
    m = start
    while True:
        pts = _rescale(f(np.linspace(0.0, 1.0, m + 1)), radius)
        gaps = np.linalg.norm(np.diff(pts, axis=0).reshape(m, -1), axis=1)
        if gaps.max() <= max_gap * radius or m >= cap:
            return pts
        m *= 2


def sphere_connect(P, Q, radius):
    """Path inside GL+ from ``P`` to ``Q`` that crosses over at norm ``radius``.

    Each endpoint first moves along its ray to the sphere of the given radius;
    there it is retracted onto its rotation polar factor through
    ``R S**(1 - t)``; the two rotations are then joined by the one-parameter
    subgroup ``R_P expm(t log(R_P^T R_Q))``. Every intermediate matrix is a
    positive multiple of a positive-determinant matrix.
    """
    P, Q = check_same_size(P, Q)
    if not (np.linalg.det(P) > 0 and np.linalg.det(Q) > 0):
        raise ValueError("sphere_connect needs endpoints with positive determinant")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if np.array_equal(P, Q):
        return PolylinePath(P[None])
    RP, VP, sP = _polar(P)
    RQ, VQ, sQ = _polar(Q)

    def polar_leg(R, V, s):
        def f(t):
            powers = s[None, :] ** (1.0 - t[:, None])
            return R[None] @ (V[None] * powers[:, None, :]) @ V.T[None]
        return _adaptive_curve(f, radius)

    K = _so_log(RP.T @ RQ)

    def rot_leg(t):
        return np.stack([RP @ expm(ti * K) for ti in t])

    leg1 = polar_leg(RP, VP, sP)
    leg2 = _adaptive_curve(rot_leg, radius)
    leg3 = polar_leg(RQ, VQ, sQ)[::-1]
    ray_in = np.stack([P, leg1[0]])
    ray_out = np.stack([leg3[-1], Q])
    nodes = join_nodes([ray_in, leg1, leg2, leg3, ray_out], tol=1e-14 * radius)
    nodes[0], nodes[-1] = P, Q
    return PolylinePath(nodes)


# ---------------------------------------------------------------------------
# assembly


def _bad_zones(dec):
    zones = []
    bounds = (0.0,) + tuple(dec.crossings) + (1.0,)
    for i, sign in enumerate(dec.interval_signs):
        if sign != "+":
            zones.append([bounds[i], bounds[i + 1]])
    for j, t in enumerate(dec.crossings):
        if dec.interval_signs[j] == "+" and dec.interval_signs[j + 1] == "+":
            zones.append([t, t])
    zones.sort()
    merged = []
    for z in zones:
        if merged and z[0] <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], z[1])
        else:
            merged.append(list(z))
    return merged


def _assemble(A, B, dec, eps, arc_builder, stats):
    """Join chord pieces in GL+ with pushed arcs (or apex detours) in between.

    ``arc_builder(P, Q, eps)`` returns the pushed node array for the zone
    between chord points P and Q, or raises ``_ApexHit``.
    """
    n = A.shape[0]
    chord_len = np.linalg.norm(B - A)
    zones = _bad_zones(dec)
    if not zones:
        return np.stack([A, B])

    # Each zone keeps a margin of chord length on either side for its bridges.
    def margin(z):
        ends = chord_points(A, B, z)
        return eps * max(np.linalg.norm(ends[0]), np.linalg.norm(ends[1])) / chord_len

    changed = True
    while changed and len(zones) > 1:
        changed = False
        for i in range(len(zones) - 1):
            gap = zones[i + 1][0] - zones[i][1]
            if gap <= margin(zones[i]) + margin(zones[i + 1]):
                zones[i] = [zones[i][0], zones[i + 1][1]]
                del zones[i + 1]
                changed = True
                break

    pieces = [A[None]]
    last_t = 0.0
    for z in zones:
        ta, tb = z
        h = margin(z)
        t_in = max(ta - h, last_t)
        t_out = min(tb + h, 1.0)
        left, right = chord_points(A, B, [t_in, t_out])
        if ta < tb:
            P, Q = batch_project(chord_points(A, B, [ta, tb]), n - 1)
        else:
            # a merged near-double root may hide a real double crossing, so
            # span the whole margin rather than a single touching point
            P, Q = batch_project(np.stack([left, right]), n - 1)
        try:
            arc = arc_builder(P, Q, eps)
            pieces.append(left[None])
            pieces.append(arc)
            pieces.append(right[None])
        except _ApexHit:
            stats["apex_reroutes"] = stats.get("apex_reroutes", 0) + 1
            scale = max(np.linalg.norm(A), np.linalg.norm(B))
            pieces.append(sphere_connect(left, right, eps * scale).nodes)
        last_t = t_out
    pieces.append(B[None])
    return join_nodes(pieces)


def _general_arc(resolution, stats):
    def build(P, Q, eps):
        n = P.shape[0]
        if np.linalg.norm(P - Q) == 0:
            nodes = P[None]
        else:
            nodes, routed = _variety_arc(P, Q, n - 1, resolution)
            stats["routed_jumps"] = stats.get("routed_jumps", 0) + routed
        scale = _path_scale(nodes)
        norms = np.linalg.norm(nodes.reshape(len(nodes), -1), axis=1)
        # inputs are normalized so the larger endpoint has unit norm
        if norms.min() < eps:
            raise _ApexHit()
        ranks = batch_rank(nodes)
        if ranks.min() < n - 1:
            stats["ascents"] = stats.get("ascents", 0) + 1
            nodes = _ascend_all(nodes, n - 1, eps, resolution)
        return _pushout(nodes, eps, scale)

    return build


def _run_with_halving(A, B, eps, assemble, seed=None):
    """Rebuild with eps halved until the certificate is feasible."""
    A = check_square(A, "A")
    B = check_square(B, "B")
    scale = max(np.linalg.norm(A), np.linalg.norm(B))
    A0, B0 = A / scale, B / scale
    dec = split_segment(A0, B0)
    e = eps
    last_error = None
    for halving in range(MAX_HALVINGS + 1):
        stats = {}
        try:
            nodes = assemble(A0, B0, dec, e, stats) * scale
        except (_Retry, ValueError, ArithmeticError) as exc:
            last_error = str(exc) or type(exc).__name__
            e *= 0.5
            continue
        nodes[0], nodes[-1] = A, B
        stats.update(halvings=halving, crossings=len(dec.crossings))
        cert = certify(PolylinePath(nodes), A, B, eps_used=e, seed=seed, diagnostics=stats)
        if cert.feasible and cert.ratio >= 1 - 1e-6:
            return cert
        last_error = f"min_det={cert.min_det:.3e}"
        e *= 0.5
    raise InfeasiblePathError(last_error)


def build_path(A, B, eps=DEFAULT_EPS, resolution=DEFAULT_RESOLUTION, seed=None):
    """Certified path in GL+(n) from ``A`` to ``B`` (both with det > 0).

    Returns a :class:`PathCertificate`. When no eps in the halving schedule
    yields a certified path, the certificate has ``feasible=False``, carries
    the straight chord as its path and reports the failure in
    ``diagnostics``; it is never silently wrong.
    """
    A, B = check_same_size(A, B)
    eps = check_eps(eps)
    if not (np.linalg.det(A) > 0 and np.linalg.det(B) > 0):
        raise ValueError("build_path needs det(A) > 0 and det(B) > 0")
    if np.array_equal(A, B):
        return certify(PolylinePath(A[None]), A, B, eps_used=eps, seed=seed)

    def assemble(A0, B0, dec, e, stats):
        return _assemble(A0, B0, dec, e, _general_arc(resolution, stats), stats)

    try:
        return _run_with_halving(A, B, eps, assemble, seed)
    except InfeasiblePathError as exc:
        reason = str(exc)
    log.warning("build_path infeasible after %d halvings: %s", MAX_HALVINGS, reason)
    chord = PolylinePath(np.stack([A, B]))
    return certify(
        chord, A, B, eps_used=eps * 0.5**MAX_HALVINGS, seed=seed,
        diagnostics={"error": reason, "halvings": MAX_HALVINGS}, feasible=False,
    )
