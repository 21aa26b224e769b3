"""Impact-weight optimization by differential evolution over softmax coordinates."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ctc import CtcEstimate, Variant, _arr, _name, _check_common, _degenerate, effect_windows, extreme_indices, resolve_k
from .errors import UsageError
from .impact import WEIGHT_SUM_TOL, impact_population, log_terms
from .series import ecdf_at_sample

INIT_BOX = 10.0
STAGNATION_WINDOW = 20


@dataclass(frozen=True)
class DeConfig:
    population_size: int | None = None  # None -> 10 * dimension
    max_generations: int = 200
    differential_weight: float = 0.8
    crossover_rate: float = 0.9
    seed: int = 0
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.population_size is not None and self.population_size < 4:
            raise UsageError("population_size must be >= 4")
        if not 0 < self.differential_weight <= 2:
            raise UsageError("differential_weight must lie in (0, 2]")
        if not 0 <= self.crossover_rate <= 1:
            raise UsageError("crossover_rate must lie in [0, 1]")
        if self.max_generations < 1:
            raise UsageError("max_generations must be >= 1")


@dataclass(frozen=True)
class WeightResult:
    weights: np.ndarray
    estimate: CtcEstimate
    raw: np.ndarray
    generations: int
    stopped_by: str
    best_history: np.ndarray = field(repr=False)


def softmax(raw) -> np.ndarray:
    r = np.asarray(raw, dtype=float)
    if r.ndim == 0 or r.shape[-1] == 0 or not np.all(np.isfinite(r)):
        raise UsageError("softmax input must be a non-empty vector of finite reals")
    e = np.exp(r - r.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def differential_evolution(objective, dim: int, cfg: DeConfig, init_points=()):
    """Maximize a batched objective with DE/rand/1/bin.

    *objective* maps a ``(P, dim)`` array to ``P`` scores. Trial vectors of a
    generation are built from the previous generation only, so scores never
    depend on evaluation order. Returns ``(best_x, best_f, generations,
    stopped_by, history)``.
    """
    rng = np.random.default_rng(cfg.seed)
    size = cfg.population_size or 10 * dim
    size = max(size, 4)
    pop = rng.uniform(-INIT_BOX, INIT_BOX, size=(size, dim))
    for i, pt in enumerate(init_points):
        pop[i] = pt
    fit = np.asarray(objective(pop), dtype=float)
    history = [fit.max()]
    stopped_by = "max_generations"
    gen = 0
    for gen in range(1, cfg.max_generations + 1):
        # three distinct donors per target, all different from the target
        picks = np.argsort(rng.random((size, size - 1)), axis=1)[:, :3]
        picks += picks >= np.arange(size)[:, None]
        mutant = pop[picks[:, 0]] + cfg.differential_weight * (pop[picks[:, 1]] - pop[picks[:, 2]])
        cross = rng.random((size, dim)) < cfg.crossover_rate
        cross[np.arange(size), rng.integers(dim, size=size)] = True
        trial = np.where(cross, mutant, pop)
        trial_fit = np.asarray(objective(trial), dtype=float)
        better = trial_fit >= fit
        pop[better] = trial[better]
        fit[better] = trial_fit[better]
        history.append(fit.max())
        if gen >= STAGNATION_WINDOW:
            old = history[-1 - STAGNATION_WINDOW]
            if history[-1] - old <= cfg.tolerance * max(abs(old), 1e-300):
                stopped_by = "stagnation"
                break
    best = int(np.argmax(fit))
    return pop[best].copy(), float(fit[best]), gen, stopped_by, np.array(history)


def optimize_weights(x, y, p: int, k="auto", alpha: float = 1e4, cfg: DeConfig | None = None) -> WeightResult:
    """Choose simplex weights maximizing the compound CTC of *x* on *y*.

    *y* may be a list of effect series, in which case the multivariate
    coefficient (``len(y) * p`` weights, series-major) is optimized. The
    uniform vector is always part of the initial population.
    """
    cfg = cfg or DeConfig()
    xa = _arr(x, "x")
    multi = isinstance(y, (list, tuple))
    ys = [_arr(v, f"y{j + 1}") for j, v in enumerate(y)] if multi else [_arr(y, "y")]
    n = xa.size
    _check_common(n, p, ys)
    k = resolve_k(k, n)
    idx = extreme_indices(xa, k, p)
    if idx.size == 0:
        raise _degenerate(k, p)
    win = np.hstack([effect_windows(ecdf_at_sample(v), idx, p) for v in ys])
    dim = win.shape[1]
    lw = log_terms(win, alpha)
    variant = Variant.MULTIVARIATE if multi else Variant.COMPOUND
    if multi:
        direction = (_name(x, "x"), tuple(_name(v, f"y{j + 1}") for j, v in enumerate(y)))
    else:
        direction = (_name(x, "x"), _name(y, "y"))

    def score(weights):
        return np.minimum(impact_population(lw, weights, alpha).sum(axis=1) / k, 1.0)

    if dim == 1:
        w = np.ones(1)
        value = float(score(w[None, :])[0])
        est = CtcEstimate(value, direction, p, k, variant, k)
        return WeightResult(w, est, np.zeros(1), 0, "trivial", np.array([value]))

    def objective(raw):
        w = softmax(raw)
        if not (np.all(w >= 0) and np.all(np.abs(w.sum(axis=1) - 1.0) <= WEIGHT_SUM_TOL)):
            raise AssertionError("softmax produced an infeasible weight vector")
        return score(w)

    raw, best, gens, stopped_by, hist = differential_evolution(objective, dim, cfg, init_points=[np.zeros(dim)])
    w = softmax(raw)
    est = CtcEstimate(best, direction, p, k, variant, k)
    return WeightResult(w, est, raw, gens, stopped_by, hist)
