"""Causal tail coefficient estimators.

All nonparametric estimators share one skeleton: find the indices ``t < n - p``
where the cause is at or above its k-th largest value, collect the effect's ECDF
values on the window ``t+1 .. t+p``, aggregate each window (impact function or
max) and divide by the number of extremes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DegenerateEstimateError, FitError, UsageError
from .impact import ImpactParams, impact_rows
from .series import EcdfTable, Series, as_array, default_k, ecdf_at_sample, ecdf_build, kth_largest


class Variant(str, enum.Enum):
    COMPOUND = "compound"
    MAX = "max"
    GPD = "gpd"
    CONDITIONAL = "conditional"
    MULTIVARIATE = "multivariate"


@dataclass(frozen=True)
class CtcEstimate:
    value: float
    direction: tuple
    p: int
    k: int
    variant: Variant
    effective_k: int

    def __float__(self):
        return self.value


def _name(s, default):
    return s.name if isinstance(s, Series) else default


def _arr(s, name):
    return s.values if isinstance(s, Series) else as_array(s, name)


def resolve_k(k, n: int) -> int:
    if k is None or k == "auto":
        return default_k(n)
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise UsageError(f"k must be 'auto' or an integer in [1, {n}], got {k!r}")
    return int(k)


def _check_common(n: int, p: int, others):
    for other in others:
        if other.size != n:
            raise UsageError(f"series lengths differ ({n} vs {other.size})")
    if not isinstance(p, (int, np.integer)) or not 1 <= p <= n - 1:
        raise UsageError(f"p must be an integer in [1, {n - 1}], got {p!r}")


def extreme_indices(x: np.ndarray, k: int, p: int) -> np.ndarray:
    """0-based indices ``t < n - p`` with ``x[t] >= x_(n-k+1)``."""
    n = x.size
    thr = np.partition(x, n - k)[n - k]
    return np.flatnonzero(x[: n - p] >= thr)


def effect_windows(f: np.ndarray, idx: np.ndarray, p: int) -> np.ndarray:
    """Rows ``f[t+1 .. t+p]`` for each ``t`` in *idx*, shape ``(len(idx), p)``."""
    return f[idx[:, None] + np.arange(1, p + 1)]


def _finish(total: float, divisor: int) -> float:
    # ties at the threshold can admit more than k indices; the estimate stays a coefficient
    return float(min(1.0, max(0.0, total / divisor)))


def _degenerate(k, p):
    return DegenerateEstimateError(
        f"no extreme cause index lies before the last p={p} positions (k={k})"
    )


# --- fast array kernels (no validation); shared by the bootstrap and benchmark loops ---

def compound_kernel(x: np.ndarray, y: np.ndarray, p: int, k: int, params: ImpactParams) -> float:
    idx = extreme_indices(x, k, p)
    if idx.size == 0:
        raise _degenerate(k, p)
    win = effect_windows(ecdf_at_sample(y), idx, p)
    return _finish(impact_rows(params, win).sum(), k)


def max_kernel(x: np.ndarray, y: np.ndarray, p: int, k: int) -> float:
    idx = extreme_indices(x, k, p)
    if idx.size == 0:
        raise _degenerate(k, p)
    win = effect_windows(ecdf_at_sample(y), idx, p)
    return _finish(win.max(axis=1).sum(), k)


def multivariate_kernel(x: np.ndarray, ys, p: int, k: int, params: ImpactParams) -> float:
    idx = extreme_indices(x, k, p)
    if idx.size == 0:
        raise _degenerate(k, p)
    win = np.hstack([effect_windows(ecdf_at_sample(y), idx, p) for y in ys])
    return _finish(impact_rows(params, win).sum(), k)


def conditional_indices(x: np.ndarray, z: np.ndarray, p: int, k: int) -> np.ndarray:
    """Extreme cause indices whose preceding ``min(p, t)`` confounder values are all non-extreme."""
    n = x.size
    idx = extreme_indices(x, k, p)
    zthr = np.partition(z, n - k)[n - k]
    z_ext = z >= zthr
    # running count of extreme z over the window [t - p, t - 1], truncated at 0
    csum = np.concatenate(([0], np.cumsum(z_ext)))
    lo = np.maximum(idx - p, 0)
    hits = csum[idx] - csum[lo]
    return idx[hits == 0]


def conditional_kernel(x, y, z, p, k, params):
    idx = conditional_indices(x, z, p, k)
    if idx.size == 0:
        raise DegenerateEstimateError("no valid extreme windows: every extreme cause has an extreme confounder in its past")
    win = effect_windows(ecdf_at_sample(y), idx, p)
    return _finish(impact_rows(params, win).sum(), idx.size), idx.size


# --- public estimators ---

def compound_ctc(x, y, p: int, k="auto", params: ImpactParams | None = None) -> CtcEstimate:
    """Compound causal tail coefficient of *x* on the lagged window of *y*.

    Parameters
    ----------
    x, y : array-like or Series
        Cause and effect series of equal length ``n``.
    p : int
        Extremal delay; the effect window is ``y[t+1 .. t+p]``.
    k : int or "auto"
        Number of upper order statistics of *x* treated as extremes.
        ``"auto"`` uses ``floor(sqrt(n))``.
    params : ImpactParams, optional
        Impact function parameters with ``p`` weights. Defaults to uniform
        weights with ``alpha = 1e4``.
    """
    xa, ya = _arr(x, "x"), _arr(y, "y")
    n = xa.size
    _check_common(n, p, [ya])
    k = resolve_k(k, n)
    params = params if params is not None else ImpactParams.uniform(p)
    if params.p != p:
        raise UsageError(f"impact params carry {params.p} weights, expected p={p}")
    value = compound_kernel(xa, ya, p, k, params)
    return CtcEstimate(value, (_name(x, "x"), _name(y, "y")), p, k, Variant.COMPOUND, k)


def max_ctc(x, y, p: int, k="auto") -> CtcEstimate:
    """Time-series CTC with the maximum as aggregator."""
    xa, ya = _arr(x, "x"), _arr(y, "y")
    n = xa.size
    _check_common(n, p, [ya])
    k = resolve_k(k, n)
    value = max_kernel(xa, ya, p, k)
    return CtcEstimate(value, (_name(x, "x"), _name(y, "y")), p, k, Variant.MAX, k)


def conditional_compound_ctc(x, y, z, p: int, k="auto", params: ImpactParams | None = None) -> CtcEstimate:
    """Compound CTC restricted to extremes of *x* whose recent past of *z* is non-extreme.

    The divisor is the number of such indices, reported as ``effective_k``.
    """
    xa, ya, za = _arr(x, "x"), _arr(y, "y"), _arr(z, "z")
    n = xa.size
    _check_common(n, p, [ya, za])
    k = resolve_k(k, n)
    params = params if params is not None else ImpactParams.uniform(p)
    if params.p != p:
        raise UsageError(f"impact params carry {params.p} weights, expected p={p}")
    value, kc = conditional_kernel(xa, ya, za, p, k, params)
    return CtcEstimate(value, (_name(x, "x"), _name(y, "y")), p, k, Variant.CONDITIONAL, kc)


def multivariate_compound_ctc(x, ys, p: int, k="auto", params: ImpactParams | None = None) -> CtcEstimate:
    """Compound CTC of *x* on several effect series; weights are ordered series-major."""
    if len(ys) == 0:
        raise UsageError("at least one effect series is required")
    xa = _arr(x, "x")
    yas = [_arr(y, f"y{j + 1}") for j, y in enumerate(ys)]
    n = xa.size
    _check_common(n, p, yas)
    k = resolve_k(k, n)
    params = params if params is not None else ImpactParams.uniform(p * len(yas))
    if params.p != p * len(yas):
        raise UsageError(f"impact params carry {params.p} weights, expected {p * len(yas)}")
    value = multivariate_kernel(xa, yas, p, k, params)
    names = tuple(_name(y, f"y{j + 1}") for j, y in enumerate(ys))
    return CtcEstimate(value, (_name(x, "x"), names), p, k, Variant.MULTIVARIATE, k)


# --- generalized Pareto comparator ---

@dataclass(frozen=True)
class GpdFit:
    threshold: float
    scale: float
    shape: float
    n_exceed: int
    loglik: float = float("nan")
    start: str = ""

    def cdf_excess(self, e):
        """GPD CDF of excesses ``e >= 0``."""
        e = np.maximum(np.asarray(e, dtype=float), 0.0)
        xi, s = self.shape, self.scale
        if abs(xi) < 1e-12:
            return -np.expm1(-e / s)
        base = np.maximum(1.0 + xi * e / s, 0.0)
        with np.errstate(divide="ignore"):
            return 1.0 - base ** (-1.0 / xi)


def gpd_loglik(excess: np.ndarray, scale: float, shape: float) -> float:
    if scale <= 0:
        return -np.inf
    if abs(shape) < 1e-12:
        return float(-excess.size * np.log(scale) - excess.sum() / scale)
    z = 1.0 + shape * excess / scale
    if np.any(z <= 0):
        return -np.inf
    return float(-excess.size * np.log(scale) - (1.0 + 1.0 / shape) * np.log(z).sum())


def _gpd_starts(e: np.ndarray):
    m, v = e.mean(), e.var(ddof=1)
    # method of moments
    xi_mom = 0.5 * (1.0 - m * m / v)
    yield "moments", m * (1.0 - xi_mom), xi_mom
    yield "exponential", m, 0.0
    # probability-weighted moments
    srt = np.sort(e)
    n = srt.size
    b0 = srt.mean()
    b1 = np.sum(srt * (np.arange(n) / (n - 1))) / n if n > 1 else 0.0
    a1 = b0 - b1  # E[X (1 - F)]
    xi_pwm = 2.0 - b0 / (b0 - 2.0 * a1)
    yield "pwm", 2.0 * b0 * a1 / (b0 - 2.0 * a1), xi_pwm


def fit_gpd_excesses(excess, threshold: float = 0.0) -> GpdFit:
    """Maximum-likelihood GPD fit to non-negative excesses over *threshold*.

    Nelder-Mead on ``(log scale, shape)`` from each start of the ladder
    (method of moments, exponential, probability-weighted moments); the first
    start that converges to a feasible optimum wins. ``shape > -1`` and support
    feasibility are enforced by penalty. The result is never worse than the
    exponential sub-model.
    """
    e = np.asarray(excess, dtype=float)
    if e.size < 2 or np.ptp(e) == 0:
        raise FitError("degenerate exceedance sample (fewer than 2 points or all equal)",
                       {"n_exceed": int(e.size)})
    big = 1e300

    def nll(theta):
        scale, shape = np.exp(theta[0]), theta[1]
        if shape <= -1.0:
            return big
        ll = gpd_loglik(e, scale, shape)
        return -ll if np.isfinite(ll) else big

    exp_scale = e.mean()
    exp_ll = gpd_loglik(e, exp_scale, 0.0)
    diagnostics = {}
    for label, scale0, shape0 in _gpd_starts(e):
        if not (np.isfinite(scale0) and scale0 > 0 and np.isfinite(shape0)):
            diagnostics[label] = "invalid start"
            continue
        shape0 = float(np.clip(shape0, -0.9, 5.0))
        if nll([np.log(scale0), shape0]) >= big:
            scale0 = max(scale0, -shape0 * e.max() * 1.01) if shape0 < 0 else scale0
        res = optimize.minimize(nll, [np.log(scale0), shape0], method="Nelder-Mead",
                                options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 4000})
        diagnostics[label] = res.message
        if res.success and res.fun < big:
            scale, shape = float(np.exp(res.x[0])), float(res.x[1])
            ll = -float(res.fun)
            if ll < exp_ll:
                scale, shape, ll = float(exp_scale), 0.0, exp_ll
            return GpdFit(threshold, scale, shape, int(e.size), ll, label)
    raise FitError("GPD maximum-likelihood fit did not converge from any start", diagnostics)


def gpd_fit(s, k: int) -> GpdFit:
    """Fit a GPD to the values strictly above the k-th largest point of *s*."""
    v = _arr(s, "series")
    u = kth_largest(v, k)
    excess = v[v > u] - u
    if excess.size < 10:
        raise FitError(f"need at least 10 exceedances above the threshold, got {excess.size}",
                       {"n_exceed": int(excess.size)})
    return fit_gpd_excesses(excess, u)


def gpd_hybrid_cdf(fit: GpdFit, table: EcdfTable, q):
    """Empirical CDF at or below the threshold, GPD tail above it."""
    q = np.asarray(q, dtype=float)
    fu = table(fit.threshold)
    emp = table(q)
    tail = fu + (1.0 - fu) * fit.cdf_excess(q - fit.threshold)
    out = np.where(q <= fit.threshold, emp, tail)
    return out if out.ndim else float(out)


def gpd_hybrid_values(v: np.ndarray, k: int) -> np.ndarray:
    """Hybrid CDF of a sample evaluated at its own points."""
    fit = gpd_fit(v, k)
    return gpd_hybrid_cdf(fit, ecdf_build(v), v)


# float slack for comparing F(x_i) against 1 - k/n; both sides are ratios of small integers
_LEVEL_SLACK = 1e-12


def gpd_kernel(fx: np.ndarray, fy: np.ndarray, p: int, k: int) -> tuple:
    """Max-aggregated estimator on precomputed hybrid-CDF vectors; returns (value, k_g)."""
    n = fx.size
    idx = np.flatnonzero(fx[: n - p] >= 1.0 - k / n - _LEVEL_SLACK)
    if idx.size == 0:
        raise DegenerateEstimateError(f"no index has fitted cause CDF >= 1 - k/n (k={k})")
    win = effect_windows(fy, idx, p)
    return _finish(win.max(axis=1).sum(), idx.size), int(idx.size)


def gpd_ctc(x, y, p: int, k="auto") -> CtcEstimate:
    """Parametric comparator: hybrid ECDF/GPD marginals in the max-based estimator.

    The divisor ``k_g`` counts the indices whose fitted cause CDF reaches
    ``1 - k/n`` and is reported as ``effective_k``.
    """
    xa, ya = _arr(x, "x"), _arr(y, "y")
    n = xa.size
    _check_common(n, p, [ya])
    k = resolve_k(k, n)
    value, kg = gpd_kernel(gpd_hybrid_values(xa, k), gpd_hybrid_values(ya, k), p, k)
    return CtcEstimate(value, (_name(x, "x"), _name(y, "y")), p, k, Variant.GPD, kg)
