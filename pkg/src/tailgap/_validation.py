"""Exceptions and input validation helpers shared across the package."""

import math

import numpy as np
from sklearn.utils import check_array


class TailgapError(ValueError):
    """Base class for every domain or validation failure raised here."""


class InvalidParameterError(TailgapError):
    """A parameter violates a type invariant (alpha <= 0, weights not normalized, ...)."""


class DomainError(TailgapError):
    """An evaluation point lies outside the support of the law."""


class DegenerateTailError(TailgapError):
    """The tail sample carries no spread, so the estimate would be infinite."""


def check_positive(value, name):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be a finite positive number, got {value!r}")
    return value


def check_support(x, x_min):
    """Return ``x`` as float or ndarray after checking ``x >= x_min`` everywhere."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("x contains NaN")
    if np.any(arr < x_min):
        raise DomainError(f"x must be >= x_min={x_min!r}, got min(x)={float(arr.min())!r}")
    if arr.ndim == 0:
        return float(arr)
    return arr


def check_samples(samples, *, min_count=1, positive=False):
    """Coerce a 1-D sample (list, ndarray or single-column 2-D array) to float64.

    Raises ``InvalidParameterError`` on empty / short input or non-finite values.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise InvalidParameterError(f"samples must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_count:
        raise InvalidParameterError(
            f"need at least {min_count} samples, got {arr.shape[0]}"
        )
    if arr.shape[0]:
        arr = check_array(arr.reshape(-1, 1), dtype=np.float64, ensure_min_samples=1)[:, 0]
    if positive and np.any(arr <= 0):
        raise InvalidParameterError("samples must be strictly positive")
    return arr


def check_increasing_grid(grid, lower, name="grid"):
    arr = np.asarray(grid, dtype=float)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise InvalidParameterError(f"{name} must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} must be finite")
    if np.any(arr < lower):
        raise InvalidParameterError(f"every {name} point must be >= {lower!r}")
    if np.any(np.diff(arr) <= 0):
        raise InvalidParameterError(f"{name} must be strictly increasing")
    return arr


def log_grid(lo, hi, points):
    """Log-spaced grid whose end points are exactly ``lo`` and ``hi``."""
    if points < 2:
        raise InvalidParameterError("a grid needs at least 2 points")
    grid = np.logspace(math.log10(lo), math.log10(hi), int(points))
    grid[0], grid[-1] = lo, hi
    return grid
