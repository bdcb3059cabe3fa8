"""Input validation helpers shared across modules."""

import numbers

import numpy as np
from sklearn.utils.validation import check_array


def check_sample_times(X) -> np.ndarray:
    """Accept times as shape (n,) or (n, 1) and return a finite 1-D float array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single time column, got {X.shape[1]} features")
    return X[:, 0]


def check_target(y, n: int) -> np.ndarray:
    y = check_array(np.asarray(y, dtype=float), ensure_2d=False, dtype=float).ravel()
    if y.size != n:
        raise ValueError(f"y has {y.size} entries, expected {n}")
    return y


def check_count(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_hermitian(H, tol: float = 1e-12) -> np.ndarray:
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    scale = max(np.linalg.norm(H), 1.0)
    if np.linalg.norm(H - H.conj().T) > tol * scale:
        raise ValueError("matrix is not Hermitian")
    return H
