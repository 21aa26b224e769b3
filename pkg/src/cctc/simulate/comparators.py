"""Comparator causal-discovery methods used in the benchmark tables."""
from __future__ import annotations

import numpy as np
from scipy import stats

from ..ctc import _arr, gpd_hybrid_values, gpd_kernel, max_ctc, resolve_k
from ..errors import UsageError
from ..delay import COND_LIMIT, RIDGE

HARD_THRESHOLD = 0.9


def _lagmat(a: np.ndarray, p: int) -> np.ndarray:
    """Columns ``a[t-1], ..., a[t-p]`` for ``t = p .. n-1``."""
    n = a.size
    return np.column_stack([a[p - j: n - j] for j in range(1, p + 1)])


def _rss(design: np.ndarray, target: np.ndarray) -> float:
    q, r = np.linalg.qr(design)
    if np.linalg.cond(r) > COND_LIMIT:
        gram = design.T @ design
        lam = RIDGE * np.trace(gram) / gram.shape[0]
        beta = np.linalg.solve(gram + lam * np.eye(gram.shape[0]), design.T @ target)
        resid = target - design @ beta
    else:
        resid = target - q @ (q.T @ target)
    return float(resid @ resid)


def granger_test(x, y, p: int, level: float = 0.05):
    """F-test of whether ``p`` lags of *x* improve an AR(p) regression of *y*.

    Returns ``(p_value, reject)``.
    """
    xa, ya = _arr(x, "x"), _arr(y, "y")
    n = xa.size
    if ya.size != n:
        raise UsageError("series lengths differ")
    if not n > 2 * p + 2:
        raise UsageError(f"need n > 2p + 2 observations, got n={n}, p={p}")
    target = ya[p:]
    m = target.size
    ones = np.ones((m, 1))
    restricted = np.hstack([ones, _lagmat(ya, p)])
    full = np.hstack([restricted, _lagmat(xa, p)])
    rss_r, rss_u = _rss(restricted, target), _rss(full, target)
    dof = m - full.shape[1]
    if rss_u <= 0:
        return (0.0, True) if rss_r > 0 else (1.0, False)
    f = ((rss_r - rss_u) / p) / (rss_u / dof)
    pval = float(stats.f.sf(max(f, 0.0), p, dof))
    return pval, pval < level


def hard_threshold_decision(x, y, p: int, k="auto") -> bool:
    """Max-based CTC strictly above 0.9."""
    return max_ctc(x, y, p, k).value > HARD_THRESHOLD


def gpd_permutation_test(x, y, p: int, k="auto", b: int = 100, seed=0, level: float = 0.05):
    """Permutation test on the asymmetry of the GPD-based coefficients.

    Statistic ``D = G(x -> y) - G(y -> x)``; the null permutes *y* in full,
    which destroys both its serial and its cross dependence. Returns
    ``(p_value, reject)`` for the direction x -> y.
    """
    xa, ya = _arr(x, "x"), _arr(y, "y")
    n = xa.size
    if ya.size != n:
        raise UsageError("series lengths differ")
    k = resolve_k(k, n)
    fx, fy = gpd_hybrid_values(xa, k), gpd_hybrid_values(ya, k)
    return gpd_permutation_from_cdfs(fx, fy, p, k, b, seed, level)


def gpd_permutation_from_cdfs(fx, fy, p, k, b, seed, level):
    """Same test on precomputed hybrid-CDF vectors (lets callers reuse one pair of fits)."""
    d_obs = gpd_kernel(fx, fy, p, k)[0] - gpd_kernel(fy, fx, p, k)[0]
    rng = np.random.default_rng(seed)
    d = np.empty(b)
    for j in range(b):
        perm = fy[rng.permutation(fy.size)]
        d[j] = gpd_kernel(fx, perm, p, k)[0] - gpd_kernel(perm, fx, p, k)[0]
    pval = float(np.count_nonzero(d >= d_obs)) / b
    return pval, pval < level
