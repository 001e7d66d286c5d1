"""Intrinsic-distance estimates that do not rely on the surgery construction.

``shorten_path`` tightens an existing feasible path (an upper bound on the
intrinsic distance); ``grid_intrinsic_distance`` is an 8-neighbour Dijkstra
oracle for planar regions; ``cusp_ratio`` uses it on the cusp region
``x**2 - y**3 > 0`` where intrinsic and extrinsic metrics are not
equivalent.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .matspace import batch_cofactor, batch_det
from .paths import PolylinePath

SEGMENT_SAMPLES = 4


@dataclass(frozen=True)
class RegionOracle:
    """An open region described by a margin function (inside iff margin > 0).

    ``margin`` and ``gradient`` take a stack of points ``(m, *shape)``.
    ``degree`` is the homogeneity degree used to scale feasibility floors;
    ``bounds`` optionally fixes the planar search box for the grid oracle.
    """

    dimension: int
    margin: object
    gradient: object = None
    degree: int = 1
    bounds: tuple | None = None

    def membership(self, points):
        return self.margin(points) > 0

    def grad(self, points, h=1e-7):
        if self.gradient is not None:
            return self.gradient(points)
        points = np.asarray(points, dtype=float)
        flat = points.reshape(len(points), -1)
        out = np.empty_like(flat)
        for j in range(flat.shape[1]):
            e = np.zeros(flat.shape[1])
            e[j] = h
            fp = self.margin((flat + e).reshape(points.shape))
            fm = self.margin((flat - e).reshape(points.shape))
            out[:, j] = (fp - fm) / (2 * h)
        return out.reshape(points.shape)


def glplus_oracle(n):
    """GL+(n): margin is the determinant, its gradient the cofactor matrix."""
    return RegionOracle(dimension=n * n, margin=batch_det, gradient=batch_cofactor, degree=n)


def cusp_oracle(bounds=None):
    def margin(p):
        p = np.asarray(p, dtype=float)
        return p[..., 0] ** 2 - p[..., 1] ** 3

    def gradient(p):
        p = np.asarray(p, dtype=float)
        return np.stack([2 * p[..., 0], -3 * p[..., 1] ** 2], axis=-1)

    return RegionOracle(dimension=2, margin=margin, gradient=gradient, degree=2, bounds=bounds)


def disk_complement_oracle(center, radius, bounds=None):
    center = np.asarray(center, dtype=float)

    def margin(p):
        d = np.asarray(p, dtype=float) - center
        return np.sum(d * d, axis=-1) - radius**2

    def gradient(p):
        return 2 * (np.asarray(p, dtype=float) - center)

    return RegionOracle(dimension=2, margin=margin, gradient=gradient, degree=2, bounds=bounds)


# ---------------------------------------------------------------------------
# curve shortening


def _norms(x):
    return np.linalg.norm(x.reshape(len(x), -1), axis=1)


def _segments_inside(oracle, a, b):
    s = np.arange(1, SEGMENT_SAMPLES + 1) / (SEGMENT_SAMPLES + 1)
    shape = (1, -1) + (1,) * (a.ndim - 1)
    pts = a[:, None] + s.reshape(shape) * (b - a)[:, None]
    ok = oracle.membership(pts.reshape((-1,) + a.shape[1:])).reshape(len(a), -1)
    return np.all(ok, axis=1)


def _restore(oracle, cand, floor):
    """Push candidates along the margin gradient until margin >= floor."""
    m = oracle.margin(cand)
    need = m < floor
    if not np.any(need):
        return cand, np.ones(len(cand), dtype=bool)
    out = cand.copy()
    ok = ~need
    idx = np.nonzero(need)[0]
    g = oracle.grad(cand[idx])
    gn = _norms(g)
    good = gn > 0
    idx, g, gn = idx[good], g[good], gn[good]
    unit = g / gn.reshape((-1,) + (1,) * (g.ndim - 1))
    base = np.maximum((floor[idx] - m[idx]) / gn, 1e-300)
    lo = np.zeros_like(base)
    hi = np.full_like(base, np.nan)
    step = base.copy()
    for _ in range(40):
        pending = np.isnan(hi)
        if not np.any(pending):
            break
        trial = cand[idx] + step.reshape((-1,) + (1,) * (g.ndim - 1)) * unit
        fine = oracle.margin(trial) >= floor[idx]
        newly = pending & fine
        hi[newly] = step[newly]
        lo[pending & ~fine] = step[pending & ~fine]
        step = np.where(pending & ~fine, step * 2, step)
    found = ~np.isnan(hi)
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        trial = cand[idx] + mid.reshape((-1,) + (1,) * (g.ndim - 1)) * unit
        fine = (oracle.margin(trial) >= floor[idx]) & found
        hi = np.where(fine, mid, hi)
        lo = np.where(fine | ~found, lo, mid)
    pushed = cand[idx] + np.where(found, hi, 0.0).reshape((-1,) + (1,) * (g.ndim - 1)) * unit
    out[idx[found]] = pushed[found]
    ok[idx[found]] = True
    return out, ok


def _straight_ok(oracle, a, b, floor, count):
    s = np.linspace(0.0, 1.0, count + 1)[1:-1]
    pts = a[None] + s.reshape((-1,) + (1,) * a.ndim) * (b - a)[None]
    return bool(np.all(oracle.margin(pts) >= floor))


def _shortcut(oracle, nodes, floor):
    """Replace runs of nodes by straight pieces where the straight piece stays inside.

    From each node the stride doubles while the chord to the node that far
    ahead is inside, sampled at ``SEGMENT_SAMPLES`` points per skipped
    segment with margin at least the smallest floor of the run. Skipped
    nodes move onto the chord at their old arclength fractions, so the path
    never gets longer.
    """
    m = len(nodes)
    shape = (-1,) + (1,) * (nodes.ndim - 1)
    i = 0
    while i < m - 2:
        best = 1
        stride = 2
        while i + stride <= m - 1:
            j = i + stride
            f = float(np.min(floor[i:j + 1]))
            if not _straight_ok(oracle, nodes[i], nodes[j], f, stride * (SEGMENT_SAMPLES + 1)):
                break
            best = stride
            stride *= 2
        if best > 1:
            j = i + best
            seg = _norms(np.diff(nodes[i:j + 1], axis=0))
            total = seg.sum()
            if total > 0:
                frac = np.cumsum(seg)[:-1] / total
                nodes[i + 1:j] = nodes[i] + frac.reshape(shape) * (nodes[j] - nodes[i])
        i += best
    return nodes


def shorten_path(path, oracle, iters=1000, delta=1e-6, shortcut_every=10):
    """Shorten a path inside a region, keeping it inside.

    Alternating (odd/even) midpoint smoothing moves each interior node to
    the average of its neighbours; a node whose margin falls below
    ``delta * scale`` is pushed back along the margin gradient with a
    bisected step. An update is accepted only if both adjacent segments stay
    inside and the local length does not grow, so the total length is
    non-increasing. Every ``shortcut_every`` sweeps, runs of nodes whose
    chord stays inside are straightened, which removes the slow diffusion of
    pure smoothing on long paths. Endpoints never move.

    Raises
    ------
    ValueError
        If an input node is not strictly inside the region.
    """
    nodes = np.array(path.nodes if isinstance(path, PolylinePath) else path, dtype=float)
    m0 = oracle.margin(nodes)
    if np.any(m0 <= 0):
        raise ValueError(f"path node {int(np.argmin(m0))} is outside the region")
    if len(nodes) < 3:
        return PolylinePath(nodes)
    scale = float(np.max(_norms(nodes))) ** oracle.degree
    floor = np.minimum(delta * scale, m0)
    interior = np.arange(1, len(nodes) - 1)
    for it in range(iters):
        if shortcut_every and it % shortcut_every == 0:
            nodes = _shortcut(oracle, nodes, floor)
        moved = 0.0
        for parity in (1, 0):
            idx = interior[interior % 2 == parity]
            if idx.size == 0:
                continue
            prev, nxt, cur = nodes[idx - 1], nodes[idx + 1], nodes[idx]
            cand = 0.5 * (prev + nxt)
            cand, ok = _restore(oracle, cand, floor[idx])
            ok &= _segments_inside(oracle, prev, cand) & _segments_inside(oracle, cand, nxt)
            old = _norms(prev - cur) + _norms(cur - nxt)
            new = _norms(prev - cand) + _norms(cand - nxt)
            ok &= new <= old
            if np.any(ok):
                moved = max(moved, float(np.max(_norms(cand[ok] - cur[ok]))))
                nodes[idx[ok]] = cand[ok]
        if moved <= 1e-15 * max(scale, 1.0):
            break
    return PolylinePath(nodes)


# ---------------------------------------------------------------------------
# grid oracle


@dataclass(frozen=True)
class GridPathResult:
    length: float
    resolution: float
    reachable: bool


_STEPS = ((1, 0), (0, 1), (1, 1), (1, -1))


def grid_intrinsic_distance(oracle, p, q, resolution, bounds=None):
    """Shortest 8-neighbour grid path between ``p`` and ``q`` inside a planar region.

    Grid nodes sit on the lattice ``p + resolution * Z**2`` clipped to the
    search box; an edge is usable when its endpoints and a few interior
    samples are inside. Axis steps cost ``resolution`` and diagonal steps
    ``sqrt(2) * resolution``, so straight runs are overestimated by at most
    about 8%. The snapped target is joined to ``q`` by a straight piece.
    """
    if oracle.dimension != 2:
        raise ValueError("the grid oracle is planar only")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if not (oracle.membership(p[None])[0] and oracle.membership(q[None])[0]):
        raise ValueError("grid endpoints must lie inside the region")
    if np.array_equal(p, q):
        return GridPathResult(length=0.0, resolution=resolution, reachable=True)
    bounds = bounds or oracle.bounds
    if bounds is None:
        pad = max(np.linalg.norm(q - p), 20 * resolution)
        lo = np.minimum(p, q) - pad
        hi = np.maximum(p, q) + pad
    else:
        (x0, x1), (y0, y1) = bounds
        lo, hi = np.array([x0, y0]), np.array([x1, y1])
    i_lo = np.floor((lo - p) / resolution).astype(int)
    i_hi = np.ceil((hi - p) / resolution).astype(int)
    nx, ny = i_hi - i_lo + 1
    xs = p[0] + (np.arange(nx) + i_lo[0]) * resolution
    ys = p[1] + (np.arange(ny) + i_lo[1]) * resolution
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X, Y], axis=-1)
    inside = oracle.membership(pts.reshape(-1, 2)).reshape(nx, ny)
    ids = np.arange(nx * ny).reshape(nx, ny)

    rows, cols, weights = [], [], []
    for dx, dy in _STEPS:
        xa = slice(max(0, -dx), nx - max(0, dx))
        xb = slice(max(0, dx), nx - max(0, -dx) if dx < 0 else nx)
        ya = slice(max(0, -dy), ny - max(0, dy))
        yb = slice(max(0, dy), ny - max(0, -dy) if dy < 0 else ny)
        ok = inside[xa, ya] & inside[xb, yb]
        a = pts[xa, ya][ok]
        b = pts[xb, yb][ok]
        if a.size:
            ok_seg = _segments_inside(oracle, a, b)
            src = ids[xa, ya][ok][ok_seg]
            dst = ids[xb, yb][ok][ok_seg]
            w = resolution * np.hypot(dx, dy)
            rows.append(src)
            cols.append(dst)
            weights.append(np.full(src.size, w))
    if not rows:
        return GridPathResult(length=float("inf"), resolution=resolution, reachable=False)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    weights = np.concatenate(weights)
    graph = coo_matrix((weights, (rows, cols)), shape=(nx * ny, nx * ny)).tocsr()
    start = ids[-i_lo[0], -i_lo[1]]
    jq = np.rint((q - p) / resolution).astype(int) - i_lo
    jq = np.clip(jq, 0, [nx - 1, ny - 1])
    target = ids[jq[0], jq[1]]
    if not inside[jq[0], jq[1]]:
        raise ValueError("target grid cell is outside the region; refine the resolution")
    dist = dijkstra(graph, directed=False, indices=start)
    d = float(dist[target])
    if not np.isfinite(d):
        return GridPathResult(length=float("inf"), resolution=resolution, reachable=False)
    d += float(np.linalg.norm(q - pts[jq[0], jq[1]]))
    return GridPathResult(length=d, resolution=resolution, reachable=True)


# ---------------------------------------------------------------------------
# cusp


def default_cusp_resolution(h):
    return h**1.5 / 100.0


def cusp_points(h, resolution):
    a = h**1.5 + 10.0 * resolution
    return np.array([-a, h]), np.array([a, h])


def cusp_record(h, resolution=None):
    """Distances and ratio for the pair straddling the cusp at height ``h``."""
    if not 0.0 < h <= 0.5:
        raise ValueError("h must lie in (0, 0.5]")
    resolution = default_cusp_resolution(h) if resolution is None else float(resolution)
    if not 0.0 < resolution <= h / 20:
        raise ValueError(f"resolution must lie in (0, h/20] = (0, {h / 20}]")
    p, q = cusp_points(h, resolution)
    oracle = cusp_oracle()
    if not (oracle.membership(p[None])[0] and oracle.membership(q[None])[0]):
        raise ValueError("cusp endpoints fall inside the excluded horn; resolution too coarse")
    pad = 20 * resolution
    bounds = ((p[0] - pad, q[0] + pad), (-pad, h + pad))
    res = grid_intrinsic_distance(oracle, p, q, resolution, bounds=bounds)
    d_ext = float(np.linalg.norm(q - p))
    return {
        "h": float(h),
        "resolution": resolution,
        "d_ext": d_ext,
        "d_int": res.length,
        "ratio": res.length / d_ext,
    }


def cusp_ratio(h, resolution=None):
    """Grid-intrinsic over extrinsic distance for points on both sides of the cusp.

    The points sit at height ``h``, ten grid cells outside the two walls
    ``|x| = h**1.5`` of the excluded horn. The ratio grows like
    ``h**-0.5`` as ``h -> 0``. ``resolution`` defaults to ``h**1.5 / 100``
    so the wall offset stays proportional to the horn width.
    """
    return cusp_record(h, resolution)["ratio"]
