import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from statsmodels.nonparametric.smoothers_lowess import lowess as sm_lowess

from conftest import net_of
from oracles import logistic_grid_search
from prestige_diffusion.adoption import FacultyCareer
from prestige_diffusion.epidemic import sweep
from prestige_diffusion.prestige import MVRConfig, rank_network
from prestige_diffusion.stats import (
    CollapseFit,
    DegenerateDataError,
    collapse_dispersion,
    collapse_points,
    decile_curves,
    effective_p,
    empirical_pvalue,
    fit_collapse,
    fit_logistic,
    logistic,
    lowess,
    permutation_null,
    raw_points,
)
from prestige_diffusion.synthetic import DEMO_TOPIC, clustered_corpus, core_periphery_hierarchy

# ---------------------------------------------------------------- p-values


def test_empirical_pvalue_examples():
    assert empirical_pvalue(1.0, np.linspace(0, 0.9, 99)) == pytest.approx(0.01)
    assert empirical_pvalue(-1.0, [0.1, 0.2, 0.3]) == 1.0
    assert empirical_pvalue(0.5, [0.5] * 10) == 1.0
    assert empirical_pvalue(0.5, [0.4, 0.5, 0.6]) == 0.75
    # undefined null fractions never count as exceeding
    assert empirical_pvalue(0.5, [np.nan, 0.1, 0.9]) == 0.5
    with pytest.raises(ValueError):
        empirical_pvalue(0.5, [])


@given(st.floats(-1, 2), st.lists(st.floats(0, 1), min_size=1, max_size=50))
def test_pvalue_bounds(f, null):
    p = empirical_pvalue(f, null)
    assert 1 / (len(null) + 1) <= p <= 1


def test_identical_titles_give_p_one():
    careers = [FacultyCareer(f"f{d}-{j}", 0, d, 2000 + j, ((2001 + j, "topic modeling"),) * 2)
               for d in range(5) for j in range(3)]
    res = permutation_null(careers, DEMO_TOPIC, n_perms=30, seed=0)
    assert np.all(res.null_samples == res.f_obs)
    assert res.p_value == 1.0


def test_planted_signal_hits_resolution_floor():
    careers, _ = clustered_corpus(n_departments=120, seed=4)
    res = permutation_null(careers, DEMO_TOPIC, n_perms=99, seed=1)
    assert res.f_obs > res.f_exp_mean + 3 * res.f_exp_sd
    assert res.p_value == res.resolution == 0.01


def test_permutation_determinism_and_workers():
    careers, _ = clustered_corpus(n_departments=40, seed=2)
    a = permutation_null(careers, DEMO_TOPIC, n_perms=25, seed=7, workers=1)
    b = permutation_null(careers, DEMO_TOPIC, n_perms=25, seed=7, workers=3)
    np.testing.assert_array_equal(a.null_samples, b.null_samples)
    c = permutation_null(careers, DEMO_TOPIC, n_perms=25, seed=8)
    assert not np.array_equal(a.null_samples, c.null_samples)


def test_permutation_preserves_slots():
    # the shuffle permutes the on-topic mask over fixed (faculty, year) slots
    careers, _ = clustered_corpus(n_departments=30, seed=5)
    from prestige_diffusion.adoption import Corpus
    corpus = Corpus(careers)
    mask = corpus.topic_mask(DEMO_TOPIC)
    rng = np.random.default_rng([0, 0])
    shuffled = mask[rng.permutation(mask.size)]
    assert shuffled.sum() == mask.sum()
    assert len(corpus.year) == sum(len(c.publications) for c in careers)


def test_permutation_errors():
    with pytest.raises(ValueError):
        permutation_null([], DEMO_TOPIC)
    off = [FacultyCareer("a", 0, 0, 2000, ((2001, "sorting"),))]
    with pytest.raises(ValueError):
        permutation_null(off, DEMO_TOPIC)
    with pytest.raises(ValueError):
        permutation_null(off, DEMO_TOPIC, n_perms=0)


# ---------------------------------------------------------------- logistic


def test_logistic_roundtrip():
    x = np.linspace(1, 205, 60)
    fit = fit_logistic(np.column_stack([x, logistic(x, 1.0, 0.05, 100.0)]))
    assert fit.y_max == pytest.approx(1.0, abs=1e-6)
    assert fit.k == pytest.approx(0.05, abs=1e-6)
    assert fit.pi_mid == pytest.approx(100.0, abs=1e-6)
    assert fit.residual < 1e-8


def test_logistic_decreasing_curve():
    x = np.arange(1, 101, dtype=float)
    y = logistic(x, 0.8, -0.1, 40.0)
    fit = fit_logistic(np.column_stack([x, y]))
    assert (fit.y_max, fit.k, fit.pi_mid) == pytest.approx((0.8, -0.1, 40.0), abs=1e-6)
    assert np.all(np.diff(fit(x)) < 0)


def test_logistic_fixed_plateau():
    x = np.linspace(-5, 5, 30)
    fit = fit_logistic(np.column_stack([x, logistic(x, 1.0, 1.3, 0.4)]), y_max=1.0)
    assert (fit.k, fit.pi_mid) == pytest.approx((1.3, 0.4), abs=1e-8)


def test_logistic_errors():
    x = np.arange(10.0)
    with pytest.raises(DegenerateDataError, match="constant"):
        fit_logistic(np.column_stack([x, np.full(10, 0.5)]))
    with pytest.raises(ValueError):
        fit_logistic([(0, 0.1), (1, 0.2), (2, 0.3)])
    with pytest.raises(ValueError):
        fit_logistic(np.column_stack([x, np.linspace(0, 1.5, 10)]))


@pytest.mark.parametrize("seed", range(5))
def test_noisy_logistic_against_grid_search(seed):
    rng = np.random.default_rng(seed)
    x = np.linspace(1, 200, 80)
    sigma = 0.01
    y = np.clip(logistic(x, 0.9, -0.04, 90.0) + rng.normal(0, sigma, x.size), 0, 1)
    fit = fit_logistic(np.column_stack([x, y]))
    ref = logistic_grid_search(x, y, (0.7, 1.1), (-0.08, -0.01), (50, 130), levels=8)
    # sampling error of the estimates, from the Gauss-Newton covariance
    s = 1 / (1 + np.exp(0.04 * (x - 90)))
    J = np.column_stack([s, -0.9 * s * (1 - s) * (x - 90), 0.9 * s * (1 - s) * -0.04])
    se = sigma * np.sqrt(np.diag(np.linalg.inv(J.T @ J)))
    got = np.array([fit.y_max, fit.k, fit.pi_mid])
    assert np.all(np.abs(got - ref) <= 3 * se)
    assert np.all(np.abs(got - [0.9, -0.04, 90.0]) <= 3 * se)
    sse = lambda th: np.sum((y - logistic(x, *th)) ** 2)  # noqa: E731
    assert sse(got) <= sse(ref) + 1e-12


@given(st.floats(-500, 500), st.floats(0.02, 0.2), st.floats(0.3, 1.0))
def test_logistic_shift_equivariance(c, k, ymax):
    x = np.linspace(0, 100, 40)
    y = logistic(x, ymax, k, 50.0)
    a = fit_logistic(np.column_stack([x, y]))
    b = fit_logistic(np.column_stack([x + c, y]))
    assert b.pi_mid == pytest.approx(a.pi_mid + c, abs=1e-5)
    assert b.k == pytest.approx(a.k, rel=1e-5)
    assert b.y_max == pytest.approx(a.y_max, rel=1e-6)


# ---------------------------------------------------------------- lowess


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.2, 1.0))
def test_lowess_reproduces_lines(a, b, frac):
    x = np.linspace(0, 10, 25)
    np.testing.assert_allclose(lowess(x, a + b * x, frac), a + b * x, atol=1e-8)


def test_lowess_constant():
    x = np.random.default_rng(0).uniform(0, 1, 30)
    np.testing.assert_allclose(lowess(x, np.full(30, 2.5), 0.3), 2.5)


def test_lowess_denoises_sine():
    rng = np.random.default_rng(11)
    x = np.sort(rng.uniform(0, 2 * np.pi, 200))
    truth = np.sin(x)
    y = truth + rng.normal(0, 0.3, x.size)
    smooth = lowess(x, y, frac=0.3)
    rmse = lambda z: np.sqrt(np.mean((z - truth) ** 2))  # noqa: E731
    assert rmse(smooth) < rmse(y)


@pytest.mark.parametrize("seed, frac", [(0, 0.3), (1, 2 / 3), (2, 0.15), (3, 1.0)])
def test_lowess_matches_statsmodels(seed, frac):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 10, 120)
    y = np.cos(x) + rng.standard_t(3, x.size) * 0.2
    ref = sm_lowess(y, x, frac=frac, it=2, delta=0.0, return_sorted=False)
    np.testing.assert_allclose(lowess(x, y, frac=frac), ref, atol=1e-8)


def test_lowess_errors():
    with pytest.raises(ValueError):
        lowess([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        lowess(np.arange(10), np.arange(10), frac=0.1)
    with pytest.raises(ValueError):
        lowess(np.arange(10), np.arange(10), frac=0)


# ---------------------------------------------------------------- effective p and collapse


def test_effective_p_examples():
    d = 1 - 1 / math.e
    assert effective_p(0.37, d) == pytest.approx(0.37, rel=1e-12)
    assert effective_p(0.0, 0.3) == 0.0
    assert effective_p(0.1, 0.1) == pytest.approx(0.94912, abs=5e-6)
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            effective_p(0.1, bad)
    with pytest.raises(ValueError):
        effective_p(-0.1, 0.5)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 0.99))
def test_effective_p_increasing_in_p(p1, p2, d):
    assume(p1 < p2)
    assert effective_p(p1, d) < effective_p(p2, d)


@given(st.floats(0.01, 1), st.floats(0.001, 0.999), st.floats(0.001, 0.999))
def test_effective_p_decreasing_in_d(p, d1, d2):
    assume(d2 - d1 > 1e-6)
    assert effective_p(p, d1) > effective_p(p, d2)


def test_collapse_roundtrip():
    ps = np.logspace(-2, 1, 40)
    y = 1 / (1 + np.exp(-2 * (1 + np.log(ps))))
    fit = fit_collapse(np.column_stack([ps, y]))
    assert fit.r == pytest.approx(-2, abs=1e-6)
    assert fit.k == pytest.approx(1, abs=1e-6)
    np.testing.assert_allclose(fit(ps), y, atol=1e-9)


def test_collapse_errors():
    ps = np.logspace(-2, 0, 10)
    with pytest.raises(DegenerateDataError):
        fit_collapse(np.column_stack([ps, np.full(10, 0.4)]))
    with pytest.raises(ValueError):
        fit_collapse(np.column_stack([np.linspace(0, 1, 10), np.linspace(0.1, 0.9, 10)]))


@given(st.floats(-5, -0.1), st.floats(-3, 3), st.floats(1e-6, 1e6))
def test_collapse_prediction_in_unit_interval(r, k, p_star):
    y = CollapseFit(r, k, 0.0)(p_star)
    assert 0 <= y <= 1


@given(st.floats(-5, -0.1), st.floats(-3, 3), st.floats(0.01, 1), st.floats(0.01, 1),
       st.floats(0.05, 0.95))
def test_collapse_prediction_monotone(r, k, p1, p2, d):
    f = CollapseFit(r, k, 0.0)
    lo, hi = sorted((p1, p2))
    assert f(effective_p(lo, d)) <= f(effective_p(hi, d))
    assert f(effective_p(hi, min(d + 0.04, 0.99))) <= f(effective_p(hi, d))


def test_dispersion_identical_and_constructed():
    p = np.linspace(0.01, 1, 300)
    same = [(p, p / (1 + p))] * 4
    assert collapse_dispersion(same, same) == (0.0, 0.0)
    ds = [0.1, 0.3, 0.5, 0.7, 0.9]
    F = lambda x: x / (1 + x)  # noqa: E731
    raw = [(p, F(effective_p(p, d))) for d in ds]
    rescaled = [(effective_p(p, d), F(effective_p(p, d))) for d in ds]
    before, after = collapse_dispersion(raw, rescaled)
    assert before > 0.05
    assert after < 1e-4
    with pytest.raises(ValueError):
        collapse_dispersion([(np.array([0, 1.0]), np.zeros(2)), (np.array([2, 3.0]), np.zeros(2))],
                            same)


# ---------------------------------------------------------------- deciles on simulations


def test_symmetric_graph_curves_coincide():
    n = 20
    net = net_of(n, [(i, (i + 1) % n) for i in range(n)] + [(i, (i + 7) % n) for i in range(n)])
    res = sweep(net, range(n), [0.2, 0.5], [0.0], 300, 0)
    # on a vertex-transitive graph each seed draws its own stream, so curves
    # agree up to Monte Carlo error
    cv = decile_curves(res, np.arange(1, n + 1))
    assert np.ptp(cv.y, axis=0).max() < 0.1
    with pytest.raises(ValueError):
        decile_curves(sweep(net_of(5, []), range(5), [0.5], [0.0], 10, 0), np.arange(1, 6))


@pytest.fixture(scope="module")
def small_hierarchy():
    net, _ = core_periphery_hierarchy(n=50, n_edges=600, seed=2)
    scores = rank_network(net, MVRConfig(restarts=10, steps_per_restart=20_000, seed=0))
    p_grid = [0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.8, 1.0]
    res = sweep(net, range(50), p_grid, [0.0], 1000, 3)
    return net, scores, res


def test_core_curve_dominates_periphery(small_hierarchy):
    _, scores, res = small_hierarchy
    cv = decile_curves(res, scores)
    assert np.all(cv.y[0] >= cv.y[-1])
    # coupled draws make every decile curve non-decreasing in p
    assert np.all(np.diff(cv.y, axis=1) >= 0)
    np.testing.assert_allclose(cv.d, np.arange(1, 11) / 10)


def test_collapse_beats_raw_logistic_on_small_hierarchy(small_hierarchy):
    _, scores, res = small_hierarchy
    cv = decile_curves(res, scores)
    collapsed = fit_collapse(collapse_points(cv))
    raw = fit_logistic(raw_points(cv))
    assert collapsed.residual < raw.residual
    before, after = collapse_dispersion(cv.raw(), cv.rescaled())
    assert after < before


def test_decile_curves_need_single_q(small_hierarchy):
    net, scores, _ = small_hierarchy
    res = sweep(net, range(50), [0.1], [0.0, 0.5], 20, 0)
    with pytest.raises(ValueError):
        decile_curves(res, scores)
    assert decile_curves(res, scores, q=0.5).y.shape == (10, 1)
