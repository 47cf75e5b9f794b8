import math

import numpy as np
import pytest
from statsmodels.regression.linear_model import OLS
from statsmodels.tsa.stattools import adfuller

from pairmatch.market import UniverseSpec, generate
from pairmatch.pairstats import (
    MIN_WINDOW,
    adf_critical_value,
    adf_single_lag,
    fit_log_prices,
    fit_pair,
    qscore,
    winsorize,
    zscore,
)


def make_fit(seed=0, n=200, beta=1.3, mu=0.4, noise=0.05):
    rng = np.random.default_rng(seed)
    log_x = np.cumsum(rng.normal(0, 0.02, n)) + 3.0
    log_y = mu + beta * log_x + rng.normal(0, noise, n)
    return fit_log_prices(log_x, log_y)


def test_ols_recovers_planted_coefficients():
    fit = make_fit(noise=1e-6)
    assert fit.beta == pytest.approx(1.3, abs=1e-4)
    assert fit.mu == pytest.approx(0.4, abs=1e-4)
    assert fit.residual_std == pytest.approx(1e-6, rel=0.2)


def test_ols_matches_statsmodels():
    rng = np.random.default_rng(7)
    log_x = np.cumsum(rng.normal(0, 0.02, 120)) + 4.0
    log_y = 0.2 + 0.9 * log_x + rng.normal(0, 0.03, 120)
    fit = fit_log_prices(log_x, log_y)
    sm_fit = OLS(log_y, np.column_stack((np.ones_like(log_x), log_x))).fit()
    assert fit.mu == pytest.approx(sm_fit.params[0], rel=1e-10)
    assert fit.beta == pytest.approx(sm_fit.params[1], rel=1e-10)
    np.testing.assert_allclose(fit.residuals, sm_fit.resid, atol=1e-12)
    assert fit.residual_std == pytest.approx(np.sqrt(sm_fit.ssr / (120 - 2)), rel=1e-12)


def test_ols_input_validation():
    with pytest.raises(ValueError):
        fit_log_prices(np.zeros(10), np.zeros(10))  # too short
    x = np.full(MIN_WINDOW, 1.0)
    y = np.arange(MIN_WINDOW, dtype=float)
    with pytest.raises(ValueError):
        fit_log_prices(x, y)  # constant regressor
    x2 = np.arange(MIN_WINDOW, dtype=float)
    x2[3] = np.nan
    with pytest.raises(ValueError):
        fit_log_prices(x2, y)


def test_fit_pair_window_and_missing_data():
    panel = generate(UniverseSpec(n_stocks=3, n_days=80, seed=0))
    fit = fit_pair(panel, "S000", "S001", (10, 60))
    assert fit.window == (10, 60)
    assert len(fit.residuals) == 50
    panel.prices[20, 0] = np.nan
    with pytest.raises(ValueError):
        fit_pair(panel, "S000", "S001", (10, 60))


def test_adf_matches_statsmodels_reference():
    rng = np.random.default_rng(42)
    eps = np.empty(504)
    eps[0] = 0.0
    for t in range(1, 504):
        eps[t] = 0.8 * eps[t - 1] + rng.normal(0, 0.05)
    got = adf_single_lag(eps)
    t_ref, p_ref, *_ = adfuller(eps, maxlag=1, regression="n", autolag=None)
    assert got.t_stat == pytest.approx(t_ref, rel=1e-8)
    assert got.p_value == pytest.approx(np.clip(p_ref, 1e-6, 0.9999), rel=1e-6)

    # a borderline series whose p-value falls inside the clamp range
    rng2 = np.random.default_rng(1)
    walk = np.cumsum(rng2.normal(0, 1, 300))
    got2 = adf_single_lag(walk)
    t2, p2, *_ = adfuller(walk, maxlag=1, regression="n", autolag=None)
    assert got2.t_stat == pytest.approx(t2, rel=1e-8)
    assert got2.p_value == pytest.approx(p2, rel=1e-6)
    assert 1e-6 < got2.p_value < 0.9999


def test_adf_rejects_stationary_and_not_random_walk():
    rng = np.random.default_rng(13)
    stationary = rng.normal(0, 1, 504)
    walk = np.cumsum(rng.normal(0, 1, 504))
    crit = adf_critical_value(0.05, nobs=504)
    assert adf_single_lag(stationary).t_stat < crit
    assert adf_single_lag(walk).t_stat > crit
    assert adf_single_lag(stationary).p_value < 0.05 < adf_single_lag(walk).p_value


def test_adf_p_value_clamped():
    rng = np.random.default_rng(2)
    strongly_stationary = rng.normal(0, 1, 2000)
    assert adf_single_lag(strongly_stationary).p_value == 1e-6


def test_adf_input_validation():
    with pytest.raises(ValueError):
        adf_single_lag(np.zeros(10))
    bad = np.arange(60, dtype=float)
    bad[5] = np.nan
    with pytest.raises(ValueError):
        adf_single_lag(bad)
    with pytest.raises(ValueError):
        adf_single_lag(np.zeros(60))  # degenerate (all-zero) series


def test_adf_critical_value_reference():
    assert adf_critical_value(0.05, nobs=np.inf) == pytest.approx(-1.941, abs=5e-3)
    assert adf_critical_value(0.01, nobs=504) < adf_critical_value(0.05, nobs=504)
    with pytest.raises(ValueError):
        adf_critical_value(0.025)


def test_winsorize_bounds():
    assert winsorize(5.0) == 3.0
    assert winsorize(-4.2) == -3.0
    assert winsorize(1.5) == 1.5


def test_zscore_hand_value_and_clipping():
    fit = make_fit(seed=3)
    at = 17
    raw = fit.residuals[at] / fit.residual_std
    assert zscore(fit, at) == pytest.approx(max(min(raw, 3.0), -3.0), rel=1e-12)
    z_all = np.array([zscore(fit, t) for t in range(len(fit.residuals))])
    assert np.all(np.abs(z_all) <= 3.0)


def test_qscore_hand_value():
    fit = make_fit(seed=4)
    at = 9
    q25, q50, q75 = np.quantile(fit.residuals, [0.25, 0.5, 0.75])
    expected = (fit.residuals[at] - q50) / (q75 - q25)
    assert qscore(fit, at) == pytest.approx(expected, rel=1e-12)


def test_scores_reject_degenerate_residuals():
    from pairmatch.pairstats import RegressionFit

    fit = RegressionFit(beta=1.0, mu=0.0, residuals=np.zeros(50),
                        residual_std=0.0, window=(0, 50))
    with pytest.raises(ValueError):
        zscore(fit, 0)
    with pytest.raises(ValueError):
        qscore(fit, 0)


def test_zscore_sign_convention():
    # a residual far above the fitted line yields a positive score
    fit = make_fit(seed=5)
    at = int(np.argmax(fit.residuals))
    assert zscore(fit, at) > 0
    assert qscore(fit, at) > 0
