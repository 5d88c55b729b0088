"""Input validation helpers shared by the public modules."""

from __future__ import annotations

import numbers

import numpy as np


def check_n_trunc(n_trunc) -> int:
    if isinstance(n_trunc, bool) or not isinstance(n_trunc, numbers.Integral):
        raise TypeError(f"truncation order must be an integer, got {n_trunc!r}")
    if n_trunc < 1:
        raise ValueError(f"truncation order must be >= 1, got {n_trunc}")
    return int(n_trunc)


def check_grid(n_points, n_trunc: int, factor: int = 4) -> int:
    """Validate a sample-grid size against the anti-aliasing floor ``factor * N``."""
    if isinstance(n_points, bool) or not isinstance(n_points, numbers.Integral):
        raise TypeError(f"grid size must be an integer, got {n_points!r}")
    if n_points < factor * n_trunc:
        raise ValueError(
            f"grid of {n_points} points is too small for N={n_trunc}; "
            f"need at least {factor * n_trunc}"
        )
    return int(n_points)


def check_operator(A) -> tuple[np.ndarray, int]:
    """Return ``A`` as a complex square array of even size together with its N."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2:
        raise ValueError(f"expected a 2N x 2N matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains NaN or Inf")
    return A.astype(complex, copy=False), A.shape[0] // 2


def check_positive(value, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value
