"""Extremal-delay selection from cross-extremogram and asymmetric PCCF profiles."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoDelayFoundError, UsageError
from .series import Series, as_array

COND_LIMIT = 1e12
RIDGE = 1e-8


class ProfileMethod(str, enum.Enum):
    EXTREMOGRAM = "extremogram"
    PCCF = "pccf"


@dataclass(frozen=True)
class LagProfile:
    """Per-lag statistics for lags ``1 .. max_lag``; undefined lags hold NaN."""

    method: ProfileMethod
    values: np.ndarray
    threshold: float | None = None
    selected_p: int | None = None

    @property
    def lags(self) -> np.ndarray:
        return np.arange(1, self.values.size + 1)

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.values)

    def with_selection(self, cbar: float) -> "LagProfile":
        return LagProfile(self.method, self.values, cbar, select_delay(self, cbar))


def _arr(s, name):
    return s.values if isinstance(s, Series) else as_array(s, name)


def _check(x, y, max_lag):
    if x.size != y.size:
        raise UsageError(f"series lengths differ ({x.size} vs {y.size})")
    if not isinstance(max_lag, (int, np.integer)) or not 1 <= max_lag < x.size:
        raise UsageError(f"max_lag must be an integer in [1, {x.size - 1}], got {max_lag!r}")


def cross_extremogram(x, y, max_lag: int, q: float = 0.95) -> LagProfile:
    """Fraction of cause exceedances at ``t`` followed by an effect exceedance at ``t + tau``.

    Thresholds are the k-th largest values with ``k = ceil((1 - q) n)``;
    exceedance is strict. Lags with no eligible cause exceedance are NaN.
    """
    xa, ya = _arr(x, "x"), _arr(y, "y")
    _check(xa, ya, max_lag)
    if not 0 < q < 1:
        raise UsageError(f"q must lie in (0, 1), got {q}")
    n = xa.size
    k = max(1, math.ceil(round((1.0 - q) * n, 9)))
    ex_x = xa > np.partition(xa, n - k)[n - k]
    ex_y = ya > np.partition(ya, n - k)[n - k]
    out = np.full(max_lag, np.nan)
    for tau in range(1, max_lag + 1):
        cond = ex_x[: n - tau]
        denom = cond.sum()
        if denom:
            out[tau - 1] = np.count_nonzero(cond & ex_y[tau:]) / denom
    return LagProfile(ProfileMethod.EXTREMOGRAM, out)


def _residuals(design: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """OLS residuals of each target column on *design* via QR, ridge fallback if ill-conditioned."""
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() == 0 or diag.max() / diag.min() > COND_LIMIT or np.linalg.cond(r) > COND_LIMIT:
        gram = design.T @ design
        lam = RIDGE * np.trace(gram) / gram.shape[0]
        beta = np.linalg.solve(gram + lam * np.eye(gram.shape[0]), design.T @ targets)
        return targets - design @ beta
    return targets - q @ (q.T @ targets)


def pccf(x, y, max_lag: int) -> LagProfile:
    """Asymmetric partial cross-correlation ``phi(tau)``, ``tau = 1 .. max_lag``.

    ``x[t]`` and ``y[t + tau]`` are both regressed (with intercept) on the
    intermediate effect values ``y[t+1 .. t+tau-1]`` and the residuals are
    correlated. Lags with a zero residual variance are NaN.
    """
    xa, ya = _arr(x, "x"), _arr(y, "y")
    _check(xa, ya, max_lag)
    n = xa.size
    out = np.full(max_lag, np.nan)
    for tau in range(1, max_lag + 1):
        m = n - tau
        if m <= tau + 2:
            raise UsageError(f"too few points for lag {tau}: need n - tau > tau + 2")
        cols = [np.ones(m)] + [ya[j: j + m] for j in range(1, tau)]
        design = np.column_stack(cols)
        targets = np.column_stack([xa[:m], ya[tau: tau + m]])
        res = _residuals(design, targets)
        res -= res.mean(axis=0)
        ss = np.sqrt((res * res).sum(axis=0))
        if ss.min() > 1e-12 * max(1.0, np.abs(targets).max()) * math.sqrt(m):
            out[tau - 1] = float(np.clip(res[:, 0] @ res[:, 1] / (ss[0] * ss[1]), -1.0, 1.0))
    return LagProfile(ProfileMethod.PCCF, out)


def select_delay(profile, cbar: float) -> int:
    """Largest lag whose defined value reaches *cbar*."""
    values = profile.values if isinstance(profile, LagProfile) else np.asarray(profile, dtype=float)
    if not np.any(np.isfinite(values)):
        raise UsageError("profile has no defined entries")
    with np.errstate(invalid="ignore"):
        hits = np.flatnonzero(np.isfinite(values) & (values >= cbar))
    if hits.size == 0:
        raise NoDelayFoundError(f"no lag reaches threshold {cbar}")
    return int(hits[-1] + 1)
