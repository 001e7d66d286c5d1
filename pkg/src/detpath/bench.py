"""Monte Carlo harness for the empirical bilipschitz constant of GL+(n).

All randomness flows from a 64-bit master seed. Instance ``i`` draws from
its own stream ``SeedSequence(seed, spawn_key=(i,))``, so a run with more
samples extends a shorter run and results do not depend on worker count.
"""

import csv
from dataclasses import asdict, dataclass

import numpy as np
from joblib import Parallel, delayed

from ._validation import check_eps
from .matspace import batch_svd
from .shorten import glplus_oracle, shorten_path
from .surgery import DEFAULT_EPS, build_path, split_segment

ENSEMBLES = ("gaussian", "near-singular", "adversarial")
CSV_COLUMNS = ("index", "d_ext", "length", "ratio", "feasible", "min_det")


@dataclass(frozen=True)
class ConstantEstimate:
    """Summary of one Monte Carlo run.

    Quantiles and ``max_ratio`` are over feasible instances with distinct
    endpoints; degenerate ``A == B`` pairs keep their conventional ratio 0
    in the per-instance records but are left out of the quantiles.
    """

    n: int
    samples: int
    seed: int
    max_ratio: float | None
    quantiles: tuple
    infeasible_count: int
    eps: float
    ensemble: str = "gaussian"
    counted: int = 0

    def to_dict(self):
        d = asdict(self)
        d["quantiles"] = dict(zip(("p50", "p90", "p99"), self.quantiles))
        return d


def instance_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def sample_glplus(n, rng, ensemble="gaussian", return_flipped=False):
    """Random matrix with positive determinant.

    Entries are i.i.d. standard normal; if the determinant is not positive
    the first row is negated. The ``near-singular`` ensemble also shrinks
    the smallest singular value by a factor ``1e-4`` before the sign fix.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    A = rng.standard_normal((n, n))
    if ensemble == "near-singular":
        u, s, v = batch_svd(A)
        s[-1] *= 1e-4
        A = (u * s) @ v.T
    elif ensemble != "gaussian":
        raise ValueError(f"unknown ensemble {ensemble!r}")
    flipped = not np.linalg.det(A) > 0
    if flipped:
        A[0] = -A[0]
    return (A, flipped) if return_flipped else A


def _random_rotation(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def adversarial_family(n, s, rng=None):
    """Pair ``(I, B)`` whose chord crosses the variety close to rank n-2.

    ``B = c Q diag(-(1+s), -(1-s), 1, ..., 1) Q^T`` with a rotation ``Q`` and
    a scale ``c``. Along the chord the first two eigenvalues vanish at
    nearby parameters, so the negative stretch is short and passes within
    ``O(s)`` of the rank ``n - 2`` matrices. The properties are verified
    on a dense scan before returning.
    """
    if not 0.0 < s <= 0.1:
        raise ValueError("s must lie in (0, 0.1]")
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(1000 + n) if rng is None else rng
    Q = _random_rotation(n, rng)
    c = float(rng.uniform(0.5, 2.0))
    d = np.ones(n)
    d[0], d[1] = -(1.0 + s), -(1.0 - s)
    A = np.eye(n)
    B = c * (Q * d) @ Q.T
    t = np.linspace(0.0, 1.0, 1001)
    chord = (1 - t)[:, None, None] * A + t[:, None, None] * B
    sv = np.linalg.svd(chord, compute_uv=False)
    assert np.linalg.det(A) > 0 and np.linalg.det(B) > 0
    assert np.min(sv[:, n - 2]) <= 2 * s
    assert len(split_segment(A, B).crossings) >= 1
    return A, B


def sample_pair(n, seed, index, ensemble="gaussian"):
    rng = instance_rng(seed, index)
    if ensemble == "adversarial":
        s = float(rng.uniform(1e-3, 0.1))
        return adversarial_family(n, s, rng)
    return sample_glplus(n, rng, ensemble), sample_glplus(n, rng, ensemble)


def run_instance(index, A, B, eps, shorten=False, shorten_iters=200):
    cert = build_path(A, B, eps=eps)
    ratio = cert.ratio
    length = cert.length
    if shorten and cert.feasible and cert.d_ext > 0:
        short = shorten_path(cert.path, glplus_oracle(A.shape[0]), iters=shorten_iters)
        if short.length < length:
            length = short.length
            ratio = length / cert.d_ext
    return {
        "index": int(index),
        "d_ext": float(cert.d_ext),
        "length": float(length),
        "ratio": float(ratio),
        "feasible": bool(cert.feasible),
        "min_det": float(cert.min_det),
    }


def summarize(records, n, seed, eps, ensemble="gaussian"):
    ratios = np.array([r["ratio"] for r in records if r["feasible"] and r["d_ext"] > 0])
    infeasible = sum(not r["feasible"] for r in records)
    if ratios.size:
        q = tuple(float(x) for x in np.quantile(ratios, [0.5, 0.9, 0.99]))
        max_ratio = float(ratios.max())
    else:
        q = (None, None, None)
        counted_zero = [r for r in records if r["feasible"]]
        max_ratio = 0.0 if counted_zero else None
    return ConstantEstimate(
        n=int(n), samples=len(records), seed=int(seed), max_ratio=max_ratio,
        quantiles=q, infeasible_count=int(infeasible), eps=float(eps),
        ensemble=ensemble, counted=int(ratios.size),
    )


def estimate_constant(n, samples, seed, eps=DEFAULT_EPS, shorten=False,
                      ensemble="gaussian", n_jobs=1, pairs=None, shorten_iters=200):
    """Monte Carlo estimate of the worst observed length/distance ratio.

    Returns ``(estimate, records)`` where ``records`` holds one dict per
    instance (columns of the per-instance CSV). Infeasible instances are
    counted and excluded from the ratio statistics. Passing ``pairs`` runs
    on the given ``(m, 2, n, n)`` stack instead of sampling.
    """
    eps = check_eps(eps)
    if ensemble not in ENSEMBLES:
        raise ValueError(f"ensemble must be one of {ENSEMBLES}")
    if pairs is None:
        if not 2 <= n <= 6:
            raise ValueError("n must lie in [2, 6]")
        if samples < 1:
            raise ValueError("samples must be positive")
        jobs = (delayed(_sampled_instance)(n, seed, i, ensemble, eps, shorten, shorten_iters)
                for i in range(samples))
    else:
        pairs = np.asarray(pairs, dtype=float)
        n = pairs.shape[-1]
        jobs = (delayed(run_instance)(i, P[0], P[1], eps, shorten, shorten_iters)
                for i, P in enumerate(pairs))
    records = Parallel(n_jobs=n_jobs)(jobs)
    return summarize(records, n, seed, eps, ensemble), records


def _sampled_instance(n, seed, index, ensemble, eps, shorten, shorten_iters):
    A, B = sample_pair(n, seed, index, ensemble)
    return run_instance(index, A, B, eps, shorten, shorten_iters)


def write_records_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow({k: (repr(r[k]) if isinstance(r[k], float) else r[k]) for k in CSV_COLUMNS})
