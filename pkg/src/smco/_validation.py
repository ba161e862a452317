"""Input validation helpers shared by the optimizers and estimators."""

from numbers import Integral, Real

import numpy as np


def check_vector(x, name="x", dim=None, allow_nonfinite=False):
    """Return ``x`` as a 1-D float array, raising on bad shape or values."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if dim is not None and arr.size != dim:
        raise ValueError(f"{name} has length {arr.size}, expected {dim}")
    if not allow_nonfinite and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def check_positive(value, name, strict=True):
    if not isinstance(value, Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if strict and value <= 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be nonnegative, got {value!r}")
    return float(value)


def check_int(value, name, minimum=0):
    if not isinstance(value, Integral) or isinstance(value, bool):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value!r}")
    return int(value)


def check_open_interval(value, name, low, high, include_high=False):
    value = check_positive(value, name, strict=False)
    ok = low < value < high or (include_high and value == high)
    if not ok:
        right = "]" if include_high else ")"
        raise ValueError(f"{name} must lie in ({low}, {high}{right}, got {value!r}")
    return value


def check_bounds(bounds):
    """Accept a ``(d, 2)`` array of ``(low, high)`` rows, a ``(2, d)`` array of
    lower and upper rows, or one ``(low, high)`` pair; return two arrays.

    A ``(2, 2)`` array is read as rows of pairs.
    """
    arr = np.asarray(bounds, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 2:
        lower, upper = arr[:, 0], arr[:, 1]
    elif arr.ndim == 2 and arr.shape[0] == 2:
        lower, upper = arr[0], arr[1]
    elif arr.ndim == 1 and arr.size == 2:
        lower, upper = arr[:1], arr[1:]
    else:
        raise ValueError(
            "bounds must be a (lower, upper) pair or an array of shape (d, 2)"
        )
    return lower.copy(), upper.copy()
