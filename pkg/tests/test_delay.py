import numpy as np
import pytest

from cctc.delay import ProfileMethod, cross_extremogram, pccf, select_delay
from cctc.errors import NoDelayFoundError, UsageError
from cctc.simulate.models import ModelSpec, generate


def _ols_resid(design, target):
    beta, *_ = np.linalg.lstsq(design, target, rcond=None)
    return target - design @ beta


def test_extremogram_shifted_copy():
    x = np.random.default_rng(0).standard_normal(500)
    y = np.roll(x, 3)
    prof = cross_extremogram(x, y, 5)
    assert prof.method is ProfileMethod.EXTREMOGRAM
    # circular shift: the three cause exceedances in the last positions have no partner
    assert prof.values[2] >= 0.88
    assert prof.values[2] == np.nanmax(prof.values)


def test_extremogram_exact_for_interior_exceedances():
    x = np.zeros(100)
    x[[10, 40, 70]] = [5, 6, 7]
    y = np.roll(x, 3)
    # k = ceil(0.05 * 100) = 5 and strict exceedance leaves exactly three marks in each series
    assert cross_extremogram(x, y, 4).values[2] == 1.0


def test_extremogram_independent_near_tail_probability():
    rng = np.random.default_rng(1)
    prof = cross_extremogram(rng.standard_normal(10**5), rng.standard_normal(10**5), 5)
    assert np.all(np.abs(prof.values - 0.05) <= 0.01)


def test_extremogram_undefined_lag_is_nan():
    x = np.zeros(20)
    x[-1] = 1.0  # only exceedance sits at the end
    prof = cross_extremogram(x, np.arange(20.0), 2)
    assert np.all(np.isnan(prof.values))
    with pytest.raises(UsageError):
        select_delay(prof, 0.1)


def test_extremogram_model_2_peaks_at_true_lag():
    hits = 0
    for rep in range(200):
        x, y = generate(ModelSpec.of("M2", "pareto"), np.random.default_rng([2, rep]))
        v = cross_extremogram(x, y, 10).values
        hits += int(np.nanargmax(v) == 2)
    assert hits > 100


def test_pccf_lag_one_is_plain_correlation():
    rng = np.random.default_rng(3)
    x, y = rng.standard_normal(300), rng.standard_normal(300)
    assert pccf(x, y, 3).values[0] == pytest.approx(np.corrcoef(x[:-1], y[1:])[0, 1], abs=1e-10)


def test_pccf_matches_direct_residual_oracle():
    rng = np.random.default_rng(4)
    n, tau = 400, 4
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    y[tau:] += 0.4 * x[:-tau]
    m = n - tau
    design = np.column_stack([np.ones(m)] + [y[j: j + m] for j in range(1, tau)])
    rx, ry = _ols_resid(design, x[:m]), _ols_resid(design, y[tau: tau + m])
    assert pccf(x, y, tau).values[tau - 1] == pytest.approx(np.corrcoef(rx, ry)[0, 1], abs=1e-10)


def test_pccf_exact_lagged_copy():
    x = np.random.default_rng(5).standard_normal(1000)
    y = np.concatenate([np.zeros(3), x[:-3]])
    assert pccf(x, y, 3).values[2] > 0.99


def test_pccf_independent_is_small():
    rng = np.random.default_rng(6)
    v = pccf(rng.standard_normal(10**5), rng.standard_normal(10**5), 10).values
    assert np.all(np.abs(v) < 0.02)


def test_pccf_affine_invariance():
    rng = np.random.default_rng(7)
    x, y = rng.standard_t(4, 500), rng.standard_t(4, 500)
    a = pccf(x, y, 6).values
    b = pccf(3 * x - 2, 0.5 * y + 10, 6).values
    assert np.allclose(a, b, atol=1e-10)


def test_pccf_collinear_design_uses_ridge():
    x = np.random.default_rng(8).standard_normal(60)
    y = np.tile([1.0, 2.0], 30)  # intermediate lags are exactly collinear with the intercept
    v = pccf(x, y, 4).values
    assert np.all(np.isfinite(v) | np.isnan(v))


def test_pccf_constant_effect_is_undefined():
    v = pccf(np.random.default_rng(9).standard_normal(50), np.ones(50), 3).values
    assert np.all(np.isnan(v))


def test_extremogram_monotone_invariance():
    rng = np.random.default_rng(10)
    x, y = rng.standard_normal(800), rng.standard_normal(800)
    assert np.array_equal(cross_extremogram(x, y, 5).values, cross_extremogram(np.exp(x), y ** 3, 5).values)


def test_select_delay_examples():
    assert select_delay([0.5, 0.3, 0.12, 0.08], 0.1) == 3
    assert select_delay([0.2, 0.05, 0.2], 0.1) == 3
    with pytest.raises(NoDelayFoundError):
        select_delay([0.05, 0.02], 0.1)
    assert select_delay([np.nan, 0.3, np.nan], 0.1) == 2


def test_profile_selection_record():
    prof = pccf(*generate(ModelSpec.of("M2", "t"), 11), 8).with_selection(0.1)
    assert prof.threshold == 0.1
    assert prof.selected_p == select_delay(prof, 0.1)


def test_lag_argument_checks():
    with pytest.raises(UsageError):
        pccf(np.ones(10), np.ones(10), 0)
    with pytest.raises(UsageError):
        cross_extremogram(np.ones(10), np.ones(9), 2)


def test_pccf_structure_on_student_t_models():
    causal, noncausal = [], []
    for model in ("M2", "M3", "M5", "M6", "M8"):
        c = []
        nc = []
        for rep in range(100):
            x, y = generate(ModelSpec.of(model, "t"), np.random.default_rng([12, rep]))[:2]
            c.append(pccf(x, y, 3).values[2])
            nc.append(abs(pccf(y, x, 3).values[2]))
        causal.append(np.median(c))
        noncausal.append(np.median(nc))
    assert min(causal) >= 0.15
    assert max(noncausal) <= 0.05
