"""Polyline paths in matrix space and the certificates built from them."""

from dataclasses import dataclass, field

import numpy as np

from .matspace import batch_det, batch_svd

OVERSAMPLE = 10


@dataclass(frozen=True)
class PolylinePath:
    """Ordered nodes of a piecewise-linear path.

    ``nodes`` has shape ``(m, *point_shape)``; for matrix paths the point
    shape is ``(n, n)``. Length is measured in the Frobenius/Euclidean norm.
    """

    nodes: np.ndarray
    length: float = field(init=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim < 2 or nodes.shape[0] < 1:
            raise ValueError("a path needs at least one node")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "length", polyline_length(nodes))

    def __len__(self):
        return self.nodes.shape[0]

    @property
    def start(self):
        return self.nodes[0]

    @property
    def end(self):
        return self.nodes[-1]

    def segment_lengths(self):
        flat = self.nodes.reshape(len(self), -1)
        return np.linalg.norm(np.diff(flat, axis=0), axis=1)

    def oversample(self, factor=OVERSAMPLE):
        """Points at ``factor`` equal steps along every segment, endpoints included."""
        if len(self) == 1:
            return self.nodes.copy()
        s = np.arange(factor) / factor
        a = self.nodes[:-1]
        b = self.nodes[1:]
        shape = (-1,) + (1,) * (self.nodes.ndim - 1)
        pts = a[:, None] + s.reshape((1,) + shape) * (b - a)[:, None]
        pts = pts.reshape((-1,) + self.nodes.shape[1:])
        return np.concatenate([pts, self.nodes[-1:]], axis=0)

    def reversed(self):
        return PolylinePath(self.nodes[::-1].copy())

    def scaled(self, c):
        return PolylinePath(self.nodes * c)

    def concat(self, other):
        other_nodes = other.nodes if isinstance(other, PolylinePath) else np.asarray(other)
        return PolylinePath(join_nodes([self.nodes, other_nodes]))


def polyline_length(nodes):
    nodes = np.asarray(nodes, dtype=float)
    if nodes.shape[0] < 2:
        return 0.0
    flat = nodes.reshape(nodes.shape[0], -1)
    return float(np.sum(np.linalg.norm(np.diff(flat, axis=0), axis=1)))


def join_nodes(pieces, tol=0.0):
    """Concatenate node arrays, dropping a node equal to its predecessor."""
    out = []
    for piece in pieces:
        piece = np.asarray(piece, dtype=float)
        if piece.shape[0] == 0:
            continue
        if out and np.linalg.norm(out[-1][-1] - piece[0]) <= tol:
            piece = piece[1:]
        if piece.shape[0]:
            out.append(piece)
    return np.concatenate(out, axis=0)


@dataclass(frozen=True)
class PathCertificate:
    """A constructed path together with the checks that make it a witness.

    ``ratio`` is ``length / d_ext`` (0 by convention when ``d_ext == 0``);
    ``min_det`` is taken over a ``OVERSAMPLE``-fold resampling of every
    segment and ``min_margin`` is the least smallest-singular-value over nodes.
    """

    path: PolylinePath
    d_ext: float
    length: float
    ratio: float
    min_det: float
    min_margin: float
    feasible: bool
    eps_used: float = float("nan")
    seed: int | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.path.nodes.shape[-1]

    def to_dict(self):
        A = self.path.start
        B = self.path.end
        return {
            "n": int(self.n),
            "endpoints": {
                "a": [float(x) for x in A.ravel()],
                "b": [float(x) for x in B.ravel()],
            },
            "nodes": [[float(x) for x in node.ravel()] for node in self.path.nodes],
            "d_ext": float(self.d_ext),
            "length": float(self.length),
            "ratio": float(self.ratio),
            "min_det": float(self.min_det),
            "min_margin": float(self.min_margin),
            "feasible": bool(self.feasible),
            "eps_used": float(self.eps_used),
            "seed": self.seed,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, record):
        n = int(record["n"])
        nodes = np.asarray(record["nodes"], dtype=float).reshape(-1, n, n)
        return cls(
            path=PolylinePath(nodes),
            d_ext=record["d_ext"],
            length=record["length"],
            ratio=record["ratio"],
            min_det=record["min_det"],
            min_margin=record["min_margin"],
            feasible=record["feasible"],
            eps_used=record.get("eps_used", float("nan")),
            seed=record.get("seed"),
            diagnostics=record.get("diagnostics", {}),
        )


def certify(path, A, B, eps_used=float("nan"), seed=None, diagnostics=None, feasible=True):
    """Measure a matrix path joining ``A`` to ``B`` and wrap it in a certificate."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    d_ext = float(np.linalg.norm(A - B))
    length = path.length
    ratio = length / d_ext if d_ext > 0 else 0.0
    dets = batch_det(path.oversample())
    min_det = float(np.min(dets))
    _, s, _ = batch_svd(path.nodes)
    min_margin = float(np.min(s[:, -1]))
    ends_ok = np.allclose(path.start, A, rtol=0, atol=1e-12 * (1 + np.abs(A).max())) and \
        np.allclose(path.end, B, rtol=0, atol=1e-12 * (1 + np.abs(B).max()))
    feasible = bool(feasible and min_det > 0 and ends_ok)
    return PathCertificate(
        path=path,
        d_ext=d_ext,
        length=length,
        ratio=ratio,
        min_det=min_det,
        min_margin=min_margin,
        feasible=feasible,
        eps_used=eps_used,
        seed=seed,
        diagnostics=dict(diagnostics or {}),
    )
