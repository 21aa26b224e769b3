"""Time-shifted moving-block-bootstrap test of "X does not cause Y in extremes".

The hypothesized effect is circularly shifted by ``s`` steps, which breaks the
cause-to-effect alignment inside the extremal delay while keeping each
series' own dependence. Joint block resamples of (cause, shifted effect) give
the null distribution of the coefficient; the p-value is the share of
replicates at or above the observed value.

Asymptotic validity is argued for a fixed threshold; in practice the number of
extremes ``k`` is data dependent, and so it is here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ctc
from .ctc import CtcEstimate, Variant, _arr, resolve_k
from .errors import DegenerateEstimateError, UsageError
from .impact import ImpactParams

MAX_REDRAWS = 10


def default_block_len(n: int) -> int:
    """``ceil(n ** (1/3))`` computed exactly on integers."""
    b = max(1, round(n ** (1.0 / 3.0)))
    while b ** 3 < n:
        b += 1
    while b > 1 and (b - 1) ** 3 >= n:
        b -= 1
    return b


@dataclass(frozen=True)
class BootstrapConfig:
    b: int = 100
    block_len: int | None = None  # None -> ceil(n^(1/3))
    shift: int | None = None  # None -> p
    seed: int = 0
    level: float = 0.05

    def __post_init__(self):
        if self.b < 1:
            raise UsageError("b must be >= 1")
        if self.block_len is not None and self.block_len < 1:
            raise UsageError("block_len must be >= 1")
        if self.shift is not None and self.shift < 0:
            raise UsageError("shift must be >= 0")
        if not 0 < self.level < 1:
            raise UsageError("level must lie in (0, 1)")

    def resolve(self, n: int, p: int) -> "BootstrapConfig":
        block = self.block_len if self.block_len is not None else default_block_len(n)
        shift = self.shift if self.shift is not None else p
        if block > n:
            raise UsageError(f"block length {block} exceeds series length {n}")
        if not block > shift:
            raise UsageError(f"block length ({block}) must exceed the shift ({shift})")
        return BootstrapConfig(self.b, block, shift, self.seed, self.level)


@dataclass(frozen=True)
class BootstrapResult:
    observed: CtcEstimate
    replicates: np.ndarray = field(repr=False)
    p_value: float
    reject: bool
    config: BootstrapConfig
    redraws: int = 0


def time_shift(s, shift: int) -> np.ndarray:
    """Circular shift ``out[t] = s[(t - shift) mod n]``."""
    a = np.asarray(s.values if hasattr(s, "values") else s)
    if not 0 <= shift <= a.size:
        raise UsageError(f"shift must lie in [0, {a.size}], got {shift}")
    return np.roll(a, shift)


def mbb_indices(n: int, block_len: int, rng: np.random.Generator) -> np.ndarray:
    """Concatenated overlapping-block indices, truncated to length *n*."""
    n_blocks = -(-n // block_len)
    starts = rng.integers(0, n - block_len + 1, size=n_blocks)
    return (starts[:, None] + np.arange(block_len)).ravel()[:n]


def mbb_resample(x, y, block_len: int, rng: np.random.Generator):
    """Resample aligned ``(x, y)`` with one shared block layout."""
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if xa.size != ya.size:
        raise UsageError("series lengths differ")
    if not 1 <= block_len <= xa.size:
        raise UsageError(f"block_len must lie in [1, {xa.size}]")
    idx = mbb_indices(xa.size, block_len, rng)
    return xa[idx], ya[idx]


def replicate_rng(seed: int, j: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(j,)))


def statistic(variant, p: int, k: int, params: ImpactParams | None):
    """Array-level estimator ``f(x, ys, z) -> float`` for a variant name."""
    variant = Variant(variant)
    if variant in (Variant.COMPOUND, Variant.MULTIVARIATE):
        if params is None:
            raise UsageError("impact params are required for the compound variant")

        def f(x, ys, z):
            if len(ys) == 1:
                return ctc.compound_kernel(x, ys[0], p, k, params)
            return ctc.multivariate_kernel(x, ys, p, k, params)
    elif variant is Variant.MAX:
        def f(x, ys, z):
            if len(ys) != 1:
                raise UsageError("max variant takes a single effect series")
            return ctc.max_kernel(x, ys[0], p, k)
    elif variant is Variant.CONDITIONAL:
        def f(x, ys, z):
            if z is None or len(ys) != 1:
                raise UsageError("conditional variant needs one effect series and a confounder")
            return ctc.conditional_kernel(x, ys[0], z, p, k, params)[0]
    else:
        raise UsageError(f"variant {variant.value!r} is not supported by the bootstrap test")
    return f


def _observed(variant, x, ys, z, p, k, params):
    variant = Variant(variant)
    if variant is Variant.MAX:
        return ctc.max_ctc(x, ys[0], p, k)
    if variant is Variant.CONDITIONAL:
        return ctc.conditional_compound_ctc(x, ys[0], z, p, k, params)
    if len(ys) > 1:
        return ctc.multivariate_compound_ctc(x, ys, p, k, params)
    return ctc.compound_ctc(x, ys[0], p, k, params)


def mbb_test(x, y, p: int, k="auto", params: ImpactParams | None = None,
             cfg: BootstrapConfig | None = None, variant="compound", z=None) -> BootstrapResult:
    """One-sided time-shifted MBB test of the coefficient of *x* on *y*.

    *y* may be a list of effect series (multivariate coefficient); all of them
    are shifted. A confounder *z* (conditional variant) is resampled with the
    pair but not shifted.
    """
    cfg = cfg or BootstrapConfig()
    xa = _arr(x, "x")
    ys_in = list(y) if isinstance(y, (list, tuple)) else [y]
    ys = [_arr(v, "y") for v in ys_in]
    za = None if z is None else _arr(z, "z")
    n = xa.size
    k = resolve_k(k, n)
    if params is None and Variant(variant) is not Variant.MAX:
        params = ImpactParams.uniform(p * len(ys))
    cfg = cfg.resolve(n, p)
    observed = _observed(variant, x, ys_in, z, p, k, params)
    f = statistic(variant, p, k, params)
    shifted = [np.roll(v, cfg.shift) for v in ys]
    reps = np.empty(cfg.b)
    redraws = 0
    for j in range(cfg.b):
        rng = replicate_rng(cfg.seed, j)
        for attempt in range(MAX_REDRAWS + 1):
            idx = mbb_indices(n, cfg.block_len, rng)
            try:
                reps[j] = f(xa[idx], [v[idx] for v in shifted], None if za is None else za[idx])
                break
            except DegenerateEstimateError:
                if attempt == MAX_REDRAWS:
                    raise
                redraws += 1
    p_value = float(np.count_nonzero(reps >= observed.value)) / cfg.b
    return BootstrapResult(observed, reps, p_value, p_value < cfg.level, cfg, redraws)


def test_both_directions(x, y, p: int, k="auto", params: ImpactParams | None = None,
                         cfg: BootstrapConfig | None = None, variant="compound", z=None):
    """``(mbb_test(x -> y), mbb_test(y -> x))`` with identical settings."""
    return (mbb_test(x, y, p, k, params, cfg, variant, z),
            mbb_test(y, x, p, k, params, cfg, variant, z))


test_both_directions.__test__ = False
