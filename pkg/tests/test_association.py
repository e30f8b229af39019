import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parcorr.association import RhoMeasure, apply_rho, rho_linreg, rho_pearson, rho_r2, rho_ridge
from parcorr.errors import ConfigError, DegenerateSeries, IllConditioned


def normal_equations_r2(x, y, lam=0.0):
    """Independent oracle: solve the (ridge) normal equations with an intercept."""
    t_len, p = x.shape
    design = np.column_stack([np.ones(t_len), x])
    penalty = lam * np.diag([0.0] + [1.0] * p)
    beta = np.linalg.solve(design.T @ design + penalty, design.T @ y)
    sse = np.sum((y - design @ beta) ** 2)
    sst = np.sum((y - y.mean(axis=0)) ** 2)
    return 1.0 - sse / sst


def test_pearson_examples():
    assert rho_pearson([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert rho_pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    # cov = 1, var_x = var_y = 2 (hand-evaluated)
    assert rho_pearson([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5, abs=1e-15)


def test_pearson_matches_numpy(rng):
    x, y = rng.standard_normal((2, 80))
    assert rho_pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-13)


@pytest.mark.parametrize("bad", [[2.0, 2.0, 2.0], [0.1, 0.1, 0.1, 0.1]])
def test_pearson_constant_is_degenerate(bad):
    with pytest.raises(DegenerateSeries):
        rho_pearson(bad, np.arange(len(bad)))
    with pytest.raises(DegenerateSeries):
        rho_pearson(np.arange(len(bad)), bad)


def test_r2_perfect_fit(rng):
    x = rng.standard_normal((30, 2))
    assert rho_r2(x, x @ [[1.5], [-2.0]], 0.0) == pytest.approx(1.0, abs=1e-9)


def test_r2_orthogonal_target():
    t = np.arange(8.0)
    x = (t - t.mean())[:, None]
    y = np.array([1, -1, -1, 1, 1, -1, -1, 1.0])  # orthogonal to 1 and to x
    assert abs(x[:, 0] @ y) < 1e-12 and abs(y.sum()) < 1e-12
    assert rho_r2(x, y, 0.0) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_r2_against_normal_equations(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((50, 3))
    y = x @ rng.standard_normal((3, 2)) + rng.standard_normal((50, 2))
    assert rho_r2(x, y, 0.0) == pytest.approx(normal_equations_r2(x, y), abs=1e-8)
    assert rho_ridge(x, y, 3.0) == pytest.approx(normal_equations_r2(x, y, 3.0), abs=1e-8)


def test_ridge_zero_matches_linreg(rng):
    x = rng.standard_normal((40, 4))
    y = rng.standard_normal((40, 2)) + x[:, :2]
    assert rho_ridge(x, y, 0.0) == pytest.approx(rho_linreg(x, y), abs=1e-9)
    a = apply_rho(RhoMeasure("ridge_r2", 0.0), x, y)
    b = apply_rho(RhoMeasure("linreg_r2"), x, y)
    assert a == pytest.approx(b, abs=1e-9)


def test_r2_degenerate_and_ill_conditioned(rng):
    with pytest.raises(DegenerateSeries):
        rho_r2(rng.standard_normal((10, 1)), np.full(10, 3.0))
    with pytest.raises(IllConditioned):
        rho_r2(rng.standard_normal((4, 4)), rng.standard_normal(4), 0.0)
    with pytest.raises(IllConditioned):
        rho_ridge(rng.standard_normal((4, 3)), rng.standard_normal(4), 0.0)
    # a penalty makes the fit well-posed
    assert np.isfinite(rho_ridge(rng.standard_normal((4, 6)), rng.standard_normal(4), 1.0))


def test_r2_without_intercept_uses_centered_sst():
    x = np.arange(1.0, 6.0)[:, None]
    y = 2 * x[:, 0]
    assert rho_r2(x, y, 0.0, add_intercept=False) == pytest.approx(1.0)
    # a constant regressor only reproduces the mean
    assert rho_r2(np.ones((5, 1)), y, add_intercept=False) == pytest.approx(0.0, abs=1e-12)


def test_apply_rho_dispatch(rng):
    x = rng.standard_normal((20, 1))
    assert apply_rho(RhoMeasure("pearson1d"), x, x) == pytest.approx(1.0)
    assert apply_rho(RhoMeasure("linreg_r2"), x, 2 * x) == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        apply_rho(RhoMeasure("pearson1d"), rng.standard_normal((20, 2)), x)
    with pytest.raises(DegenerateSeries):
        apply_rho(RhoMeasure("pearson1d"), x, np.zeros(20))


def test_measure_validation():
    with pytest.raises(ConfigError):
        RhoMeasure("cca")
    with pytest.raises(ConfigError):
        RhoMeasure("ridge_r2", -1.0)
    assert RhoMeasure("ridge_r2", 2.0).to_dict() == {
        "kind": "ridge_r2", "ridge_lambda": 2.0, "add_intercept": True, "standardize": False,
    }


def test_standardize_changes_ridge_only_through_scale(rng):
    x = rng.standard_normal((30, 2)) * [1.0, 100.0]
    y = x @ [0.5, 0.005] + rng.standard_normal(30)
    plain = rho_ridge(x, y, 5.0)
    std = rho_ridge(x, y, 5.0, standardize=True)
    assert plain != pytest.approx(std)
    # with no penalty, scaling columns is irrelevant
    assert rho_linreg(x, y, standardize=True) == pytest.approx(rho_linreg(x, y), abs=1e-10)


# -- properties ---------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(3, 80), st.floats(-5, 5).filter(lambda a: abs(a) > 1e-3), st.floats(-10, 10))
def test_pearson_properties(seed, t_len, a, b):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal((2, t_len))
    r = rho_pearson(x, y)
    assert -1.0 <= r <= 1.0
    assert rho_pearson(y, x) == r
    assert rho_pearson(a * x + b, y) == pytest.approx(np.sign(a) * r, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 3))
def test_r2_invariant_to_recombination(seed, p, q):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((40, p))
    y = x @ rng.standard_normal((p, q)) + rng.standard_normal((40, q))
    mix = rng.standard_normal((p, p)) + 3 * np.eye(p)
    r = rho_r2(x, y)
    assert r <= 1.0 and np.isfinite(r)
    assert rho_r2(x @ mix, y) == pytest.approx(r, abs=1e-8)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 6), st.booleans())
def test_ridge_score_nonincreasing_in_lambda(seed, p, intercept):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((25, p))
    y = x @ rng.standard_normal((p, 2)) + rng.standard_normal((25, 2))
    scores = [rho_ridge(x, y, lam, intercept) for lam in [0.0, 1e-3, 0.1, 1.0, 10.0, 1e3]]
    assert all(np.isfinite(scores))
    assert all(b <= a + 1e-12 for a, b in zip(scores, scores[1:]))
