import math

import numpy as np
import pytest

from cctc.ctc import compound_ctc
from cctc.errors import DegenerateEstimateError, UsageError
from cctc.impact import ImpactParams
from cctc.weights import DeConfig, differential_evolution, optimize_weights, softmax


def test_softmax_examples():
    assert np.allclose(softmax([0, 0, 0]), [1 / 3] * 3, atol=1e-15)
    assert np.allclose(softmax([0.7, 0.7 + math.log(2)]), [1 / 3, 2 / 3], atol=1e-15)
    w = softmax([1000.0, 0.0])
    assert w[0] == 1.0 and 0 <= w[1] < 1e-300
    assert abs(softmax(np.random.default_rng(0).normal(0, 50, 9)).sum() - 1) <= 1e-12


def test_softmax_rejects_non_finite():
    with pytest.raises(UsageError):
        softmax([0.0, np.inf])


def test_p1_is_trivial():
    rng = np.random.default_rng(1)
    x, y = rng.standard_normal(200), rng.standard_normal(200)
    res = optimize_weights(x, y, 1, "auto")
    assert res.weights.tolist() == [1.0]
    assert res.estimate.value == pytest.approx(compound_ctc(x, y, 1, "auto", ImpactParams(1e4, [1.0])).value, abs=1e-12)


def test_grid_search_oracle_two_lags():
    rng = np.random.default_rng(2)
    n = 60
    x = rng.standard_t(2, n)
    y = np.roll(x, 1) + rng.standard_t(2, n) * 0.5
    best = max(compound_ctc(x, y, 2, "auto", ImpactParams(1e4, [a, 1 - a])).value for a in np.linspace(0, 1, 1001))
    res = optimize_weights(x, y, 2, "auto", cfg=DeConfig(seed=3))
    assert abs(res.estimate.value - best) <= 1e-3


def test_never_below_uniform_and_deterministic():
    rng = np.random.default_rng(4)
    x, y = rng.standard_t(3, 300), rng.standard_t(3, 300)
    uniform = compound_ctc(x, y, 4, "auto", ImpactParams.uniform(4)).value
    a = optimize_weights(x, y, 4, cfg=DeConfig(seed=5))
    b = optimize_weights(x, y, 4, cfg=DeConfig(seed=5))
    assert a.estimate.value >= uniform - 1e-12
    assert np.array_equal(a.weights, b.weights)
    assert np.all(np.diff(a.best_history) >= 0)
    assert a.stopped_by in ("stagnation", "max_generations")


def test_returned_value_matches_returned_weights():
    rng = np.random.default_rng(6)
    x, y = rng.pareto(1, 400), rng.pareto(1, 400)
    res = optimize_weights(x, y, 3, cfg=DeConfig(seed=1))
    check = compound_ctc(x, y, 3, "auto", ImpactParams(1e4, res.weights)).value
    assert res.estimate.value == pytest.approx(check, abs=1e-12)


def test_multivariate_dimension():
    rng = np.random.default_rng(7)
    x, y1, y2 = (rng.standard_normal(200) for _ in range(3))
    res = optimize_weights(x, [y1, y2], 2, cfg=DeConfig(seed=0, max_generations=30))
    assert res.weights.shape == (4,)


def test_degenerate_propagates():
    with pytest.raises(DegenerateEstimateError):
        optimize_weights(np.arange(30.0), np.ones(30), 3, 2)


def test_de_on_smooth_function():
    target = np.array([1.0, -2.0, 0.5])

    def obj(pop):
        return -((pop - target) ** 2).sum(axis=1)

    x, f, *_ = differential_evolution(obj, 3, DeConfig(seed=0, max_generations=300, tolerance=0.0))
    assert np.allclose(x, target, atol=1e-3)


def test_config_bounds():
    with pytest.raises(UsageError):
        DeConfig(population_size=3)
    with pytest.raises(UsageError):
        DeConfig(differential_weight=0.0)
    with pytest.raises(UsageError):
        DeConfig(crossover_rate=1.5)
