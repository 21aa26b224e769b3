"""Compound-extreme impact function.

For ECDF values ``v`` in ``[0, 1]``, simplex weights ``w`` and shape ``alpha > 0``
the impact is::

    h(v) = [1 - prod_i (1 - v_i c) ** w_i] / c,    c = 1 - exp(-alpha)

Small ``alpha`` approaches the weighted mean ``sum(w * v)``; large ``alpha``
approaches ``1 - prod (1 - v_i) ** w_i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError

WEIGHT_SUM_TOL = 1e-12
LOG_DOMAIN_ALPHA = 30.0
LOG_DOMAIN_GAP = 1e-12


@dataclass(frozen=True)
class ImpactParams:
    alpha: float
    weights: np.ndarray

    def __post_init__(self):
        alpha = float(self.alpha)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if not np.isfinite(alpha) or alpha <= 0:
            raise DomainError(f"alpha must be a finite positive real, got {self.alpha!r}")
        if w.size < 1:
            raise UsageError("weights must contain at least one entry")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DomainError("weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(f"weights must sum to 1 (got {w.sum()!r}); use normalize() first")
        w.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "weights", w)

    @property
    def p(self) -> int:
        return self.weights.size

    @property
    def c(self) -> float:
        return -np.expm1(-self.alpha)

    @classmethod
    def uniform(cls, p: int, alpha: float = 1e4) -> "ImpactParams":
        if p < 1:
            raise UsageError(f"p must be >= 1, got {p}")
        return cls(alpha, np.full(p, 1.0 / p))


def normalize(weights) -> np.ndarray:
    """Scale non-negative weights to unit sum."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DomainError("weights must be a non-empty vector of finite non-negative reals")
    total = w.sum()
    if total <= 0:
        raise DomainError("weights must not all be zero")
    return w / total


def _check_v(params: ImpactParams, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1:] != (params.p,):
        raise UsageError(f"expected {params.p} values per window, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError("impact inputs must be finite")
    if np.any(v < 0) or np.any(v > 1):
        raise DomainError("impact inputs must lie in [0, 1]")
    return v


def _saturated(v: np.ndarray, w: np.ndarray):
    # every coordinate carrying weight sits at 1, so h is exactly 1
    return np.all((w <= 0) | (v == 1.0), axis=-1)


def evaluate(params: ImpactParams, v) -> float:
    """Direct transcription of the closed form."""
    v = _check_v(params, v)
    if _saturated(v, params.weights):
        return 1.0
    c = params.c
    prod = np.prod((1.0 - v * c) ** params.weights)
    return float(np.clip((1.0 - prod) / c, 0.0, 1.0))


def log_terms(v: np.ndarray, alpha: float) -> np.ndarray:
    """Elementwise ``log(1 - v c)`` with ``v == 1`` mapped to ``-alpha`` exactly."""
    v = np.asarray(v, dtype=float)
    if alpha <= 1.0:
        out = np.log1p(v * np.expm1(-alpha))
    else:
        # 1 - v c == (1 - v) + v e^{-alpha}; exact cancellation-free for v near 1
        with np.errstate(divide="ignore"):
            out = np.log((1.0 - v) + v * np.exp(-alpha))
    return np.where(v == 1.0, -alpha, out)


def _from_log_sum(s, alpha: float):
    # (1 - e^s) / (1 - e^{-alpha}) == expm1(s) / expm1(-alpha)
    return np.clip(np.expm1(s) / np.expm1(-alpha), 0.0, 1.0)


def evaluate_log_domain(params: ImpactParams, v) -> float:
    """Overflow/underflow-safe evaluation through sums of logs."""
    v = _check_v(params, v)
    if _saturated(v, params.weights):
        return 1.0
    lt = log_terms(v, params.alpha)
    s = np.sum(np.where(params.weights > 0, params.weights * lt, 0.0))
    return float(_from_log_sum(s, params.alpha))


def impact(params: ImpactParams, v) -> float:
    """Canonical evaluation: log domain for large ``alpha`` or near-singular terms."""
    v = _check_v(params, v)
    if params.alpha > LOG_DOMAIN_ALPHA or np.any(1.0 - v * params.c < LOG_DOMAIN_GAP):
        return evaluate_log_domain(params, v)
    return evaluate(params, v)


def impact_rows(params: ImpactParams, windows: np.ndarray) -> np.ndarray:
    """Impact of each row of an ``(m, p)`` window matrix (values already validated)."""
    lt = log_terms(windows, params.alpha)
    w = params.weights
    s = np.where(w > 0, lt * w, 0.0).sum(axis=1)
    return np.where(_saturated(windows, w), 1.0, _from_log_sum(s, params.alpha))


def impact_population(log_windows: np.ndarray, weights: np.ndarray, alpha: float) -> np.ndarray:
    """Impact for many weight vectors at once: ``(m, p)`` log terms, ``(P, p)`` weights -> ``(P, m)``."""
    s = weights @ log_windows.T
    return _from_log_sum(s, alpha)
