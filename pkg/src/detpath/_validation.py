"""Input validation helpers shared by the functional core and the estimators."""

import numpy as np

MAX_N = 16


def check_square(A, name="A", max_n=MAX_N):
    """Return ``A`` as a float64 square matrix, raising ``ValueError`` otherwise."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if not 1 <= n <= max_n:
        raise ValueError(f"{name} has size n={n}; supported range is 1..{max_n}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return A


def check_same_size(A, B):
    A = check_square(A, "A")
    B = check_square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def check_pairs(X):
    """Validate a stack of matrix pairs with shape ``(m, 2, n, n)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 4 or X.shape[1] != 2 or X.shape[2] != X.shape[3]:
        raise ValueError(f"expected pairs of shape (m, 2, n, n), got {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("at least one pair is required")
    if not 1 <= X.shape[2] <= MAX_N:
        raise ValueError(f"matrix size {X.shape[2]} outside 1..{MAX_N}")
    if not np.all(np.isfinite(X)):
        raise ValueError("pairs contain NaN or Inf entries")
    return X


def check_eps(eps, upper=0.1):
    eps = float(eps)
    if not 0.0 < eps <= upper:
        raise ValueError(f"eps must lie in (0, {upper}], got {eps}")
    return eps
