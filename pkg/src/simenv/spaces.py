"""Observation and action spaces.

Only two kinds exist: ``Box`` (a flat vector of reals with inclusive
per-dimension bounds) and ``Discrete`` (integers ``0..n-1``).
"""
from __future__ import annotations

import numbers

import numpy as np


class Box:
    """Flat real vector with inclusive bounds ``low[i] <= x[i] <= high[i]``."""

    def __init__(self, low, high, shape=None):
        if shape is not None:
            (dim,) = shape
            low = np.full(dim, low, dtype=float)
            high = np.full(dim, high, dtype=float)
        low = np.atleast_1d(np.asarray(low, dtype=float)).copy()
        high = np.atleast_1d(np.asarray(high, dtype=float)).copy()
        if low.ndim != 1 or low.shape != high.shape or low.size == 0:
            raise ValueError(f"low and high must be equal-length non-empty vectors, got {low.shape} and {high.shape}")
        if not (np.all(np.isfinite(low)) and np.all(np.isfinite(high))):
            raise ValueError("Box bounds must be finite")
        if np.any(low > high):
            raise ValueError("Box requires low <= high in every dimension")
        low.flags.writeable = False
        high.flags.writeable = False
        self.low = low
        self.high = high

    @property
    def shape(self):
        return self.low.shape

    def __eq__(self, other):
        return (
            isinstance(other, Box)
            and np.array_equal(self.low, other.low)
            and np.array_equal(self.high, other.high)
        )

    def __hash__(self):
        return hash((Box, self.low.tobytes(), self.high.tobytes()))

    def __repr__(self):
        return f"Box(low={self.low.tolist()}, high={self.high.tolist()})"

    def contains(self, value):
        return contains(self, value)

    def sample(self, rng):
        return sample(self, rng)

    def clamp(self, value):
        return clamp(self, value)


class Discrete:
    """Integers ``0..n-1``."""

    def __init__(self, n):
        if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 1:
            raise ValueError(f"Discrete needs a positive integer, got {n!r}")
        self.n = int(n)

    def __eq__(self, other):
        return isinstance(other, Discrete) and other.n == self.n

    def __hash__(self):
        return hash((Discrete, self.n))

    def __repr__(self):
        return f"Discrete({self.n})"

    def contains(self, value):
        return contains(self, value)

    def sample(self, rng):
        return sample(self, rng)


def _as_vector(value):
    """Coerce to a flat float vector, or return None if that is impossible."""
    if isinstance(value, (bool, np.bool_)):
        return None
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        return None
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        return None
    return arr


def contains(space, value):
    """True iff ``value`` is a member of ``space``. Never raises."""
    if isinstance(space, Discrete):
        if isinstance(value, (bool, np.bool_)):
            return False
        if isinstance(value, np.ndarray):
            if value.shape != () or not np.issubdtype(value.dtype, np.integer):
                return False
            value = value.item()
        if not isinstance(value, numbers.Integral):
            return False
        return 0 <= int(value) < space.n
    if isinstance(space, Box):
        arr = _as_vector(value)
        if arr is None or arr.shape != space.shape:
            return False
        if not np.all(np.isfinite(arr)):
            return False
        return bool(np.all(arr >= space.low) and np.all(arr <= space.high))
    raise TypeError(f"not a space: {space!r}")


def sample(space, rng):
    """Draw a uniform member of ``space`` from a ``numpy.random.Generator``."""
    if isinstance(space, Discrete):
        return int(rng.integers(space.n))
    if isinstance(space, Box):
        # uniform() is half-open; the clip only matters for degenerate intervals.
        draw = rng.uniform(space.low, space.high)
        return np.clip(draw, space.low, space.high)
    raise TypeError(f"not a space: {space!r}")


def clamp(space, value):
    """Project ``value`` component-wise into a Box."""
    if not isinstance(space, Box):
        raise TypeError("clamp is only defined for Box spaces")
    arr = _as_vector(value)
    if arr is None or arr.shape != space.shape:
        raise ValueError(f"expected a vector of shape {space.shape}, got {np.shape(value)}")
    return np.clip(arr, space.low, space.high)
