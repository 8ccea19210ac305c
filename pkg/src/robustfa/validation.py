"""Input validation helpers used by the public API."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput


def as_panel(values, min_rows: int = 2) -> np.ndarray:
    """Coerce ``values`` to a finite float64 (n, p) array.

    Rows are observations, columns are series. Raises InvalidInput when the
    input is not 2-D, has fewer than ``min_rows`` rows, has no columns, or
    contains non-finite entries.
    """
    X = np.ascontiguousarray(values, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidInput(f"panel must be 2-D, got ndim={X.ndim}")
    n, p = X.shape
    if n < min_rows:
        raise InvalidInput(f"panel needs at least {min_rows} rows, got {n}")
    if p < 1:
        raise InvalidInput("panel needs at least one column")
    if not np.isfinite(X).all():
        raise InvalidInput("panel contains non-finite entries")
    return X


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite float64 2-D array without shape constraints."""
    M = np.ascontiguousarray(values, dtype=np.float64)
    if M.ndim != 2:
        raise InvalidInput(f"{name} must be 2-D, got ndim={M.ndim}")
    if not np.isfinite(M).all():
        raise InvalidInput(f"{name} contains non-finite entries")
    return M


def check_square_symmetric(values, name: str = "matrix") -> np.ndarray:
    """Validate a square matrix that is symmetric as stored.

    Exact (bitwise) symmetry is required; callers building a matrix from a
    general product should pass it through :func:`symmetrize` first.
    """
    M = as_matrix(values, name)
    if M.shape[0] != M.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {M.shape}")
    if not np.array_equal(M, M.T):
        raise InvalidInput(f"{name} is not symmetric as stored")
    return M


def symmetrize(M: np.ndarray) -> np.ndarray:
    """Return (M + M') / 2, which is exactly symmetric as stored."""
    return 0.5 * (M + M.T)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    """Validate an integer argument with a lower bound."""
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise InvalidInput(f"{name} must be an integer, got {type(value).__name__}")
    v = int(value)
    if v < minimum:
        raise InvalidInput(f"{name} must be >= {minimum}, got {v}")
    return v
