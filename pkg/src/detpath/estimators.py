"""Estimator-style wrappers over the path builder.

Inputs are stacks of matrix pairs with shape ``(m, 2, n, n)``. Nothing is
learned in ``fit`` beyond the matrix size; the wrappers exist so the
builder composes with parameter search and cloning utilities.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_eps, check_pairs
from .bench import estimate_constant
from .surgery import DEFAULT_EPS, DEFAULT_RESOLUTION, build_path

CERTIFICATE_FEATURES = ("d_ext", "length", "ratio", "min_det", "min_margin", "feasible")


class PathSurgery(TransformerMixin, BaseEstimator):
    """Map each pair ``(A, B)`` to the summary of its certified GL+ path.

    Parameters
    ----------
    eps : float
        Push-out magnitude relative to the pair scale, in ``(0, 0.1]``.
    resolution : float
        Chord sampling step for arcs on the variety, relative to the arc.

    Attributes
    ----------
    n_ : int
        Matrix size seen in ``fit``.
    certificates_ : list of PathCertificate
        Certificates from the most recent ``transform``.
    """

    def __init__(self, eps=DEFAULT_EPS, resolution=DEFAULT_RESOLUTION):
        self.eps = eps
        self.resolution = resolution

    def fit(self, X, y=None):
        X = check_pairs(X)
        check_eps(self.eps)
        if not 0 < self.resolution < 1:
            raise ValueError("resolution must lie in (0, 1)")
        self.n_ = X.shape[-1]
        return self

    def certify(self, X):
        check_is_fitted(self, "n_")
        X = check_pairs(X)
        if X.shape[-1] != self.n_:
            raise ValueError(f"fitted for n={self.n_}, got n={X.shape[-1]}")
        return [build_path(P[0], P[1], eps=self.eps, resolution=self.resolution) for P in X]

    def transform(self, X):
        """Return an ``(m, 6)`` array with columns ``CERTIFICATE_FEATURES``."""
        self.certificates_ = self.certify(X)
        return np.array([[c.d_ext, c.length, c.ratio, c.min_det, c.min_margin, float(c.feasible)]
                         for c in self.certificates_])

    def get_feature_names_out(self, input_features=None):
        return np.array(CERTIFICATE_FEATURES, dtype=object)


class BilipschitzConstantEstimator(BaseEstimator):
    """Worst observed path-length to distance ratio over a set of pairs.

    Parameters
    ----------
    eps : float
        Push-out magnitude.
    shorten : bool
        Run curve shortening on every feasible path and keep the shorter one.
    shorten_iters : int
    n_jobs : int
        Worker count; results do not depend on it.

    Attributes
    ----------
    max_ratio_ : float or None
    quantiles_ : tuple
        p50, p90, p99 over feasible instances with distinct endpoints.
    infeasible_count_ : int
    ratios_ : ndarray
        Per-pair ratio (0 for ``A == B``, nan for infeasible pairs).
    """

    def __init__(self, eps=DEFAULT_EPS, shorten=False, shorten_iters=200, n_jobs=1):
        self.eps = eps
        self.shorten = shorten
        self.shorten_iters = shorten_iters
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = check_pairs(X)
        est, records = estimate_constant(
            X.shape[-1], len(X), seed=0, eps=check_eps(self.eps), shorten=self.shorten,
            n_jobs=self.n_jobs, pairs=X, shorten_iters=self.shorten_iters,
        )
        self.estimate_ = est
        self.max_ratio_ = est.max_ratio
        self.quantiles_ = est.quantiles
        self.infeasible_count_ = est.infeasible_count
        self.ratios_ = np.array([r["ratio"] if r["feasible"] else np.nan for r in records])
        return self

    def score(self, X, y=None):
        """Negative worst ratio on ``X`` (higher is better)."""
        check_is_fitted(self, "max_ratio_")
        other = BilipschitzConstantEstimator(**self.get_params()).fit(X)
        return -float(other.max_ratio_) if other.max_ratio_ is not None else -np.inf
