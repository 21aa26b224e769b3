"""Rank, ECDF and order-statistic helpers used by every estimator."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UsageError


def as_array(values, name: str = "series") -> np.ndarray:
    """Return *values* as a 1-D float array, rejecting empty or non-finite input."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise UsageError(f"{name}: expected a 1-D sequence, got shape {arr.shape}")
    if arr.size == 0:
        raise UsageError(f"{name}: empty series")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: contains NaN or infinite values")
    return arr


@dataclass(frozen=True)
class Series:
    """A named, finite, non-empty observation vector."""

    values: np.ndarray
    name: str = "series"

    def __post_init__(self):
        object.__setattr__(self, "values", as_array(self.values, self.name))
        self.values.setflags(write=False)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _values(s) -> np.ndarray:
    return s.values if isinstance(s, Series) else as_array(s)


@dataclass(frozen=True)
class EcdfTable:
    """Empirical CDF ``F(y) = #{y_j <= y} / n`` backed by a sorted copy of the sample."""

    sorted_values: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.sorted_values.size

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        out = np.searchsorted(self.sorted_values, q, side="right") / self.n
        return out if out.ndim else float(out)


def ecdf_build(s) -> EcdfTable:
    srt = np.sort(_values(s))
    srt.setflags(write=False)
    return EcdfTable(srt)


def ecdf_at_sample(values: np.ndarray) -> np.ndarray:
    """ECDF of a sample evaluated at its own points (max-rank ties), i.e. ``rank / n``."""
    srt = np.sort(values)
    return np.searchsorted(srt, values, side="right") / values.size


def kth_largest(s, k: int) -> float:
    """Order statistic ``x_(n-k+1)``: the k-th largest value, duplicates counted."""
    v = _values(s)
    n = v.size
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise UsageError(f"k must be an integer in [1, {n}], got {k!r}")
    return float(np.partition(v, n - k)[n - k])


def default_k(n: int) -> int:
    """Number of extremes ``floor(sqrt(n))``, at least 1."""
    return max(1, math.isqrt(n))


def format_real(v) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(v), ".17g")
