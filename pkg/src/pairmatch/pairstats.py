"""Per-pair statistics: log-price OLS fits, the single-lag ADF test, and the
z-score / q-score spread standardizations."""

import math
from dataclasses import dataclass

import numpy as np
from statsmodels.tsa.adfvalues import mackinnoncrit, mackinnonp

__all__ = [
    "MIN_WINDOW",
    "RegressionFit",
    "AdfResult",
    "fit_pair",
    "fit_log_prices",
    "adf_single_lag",
    "adf_critical_value",
    "zscore",
    "qscore",
    "winsorize",
]

MIN_WINDOW = 30

Z_BOUND = 3.0

_P_FLOOR, _P_CEIL = 1e-6, 0.9999


@dataclass(frozen=True)
class RegressionFit:
    """OLS fit of log(p_j) on log(p_i): slope beta, intercept mu, residuals in
    date order, and the residual standard deviation used for z-scoring."""

    beta: float
    mu: float
    residuals: np.ndarray
    residual_std: float
    window: tuple


@dataclass(frozen=True)
class AdfResult:
    t_stat: float
    p_value: float


def fit_log_prices(log_x: np.ndarray, log_y: np.ndarray, window=None) -> RegressionFit:
    """OLS of log_y on log_x over aligned, complete arrays."""
    n = len(log_x)
    if n < MIN_WINDOW or len(log_y) != n:
        raise ValueError(f"need two aligned series of >= {MIN_WINDOW} observations, got {n}")
    if np.any(np.isnan(log_x)) or np.any(np.isnan(log_y)):
        raise ValueError("window contains missing prices")
    x_mean = log_x.mean()
    sxx = float(np.sum((log_x - x_mean) ** 2))
    if sxx <= 0:
        raise ValueError("regressor has zero variance (constant price)")
    beta = float(np.sum((log_x - x_mean) * (log_y - log_y.mean())) / sxx)
    mu = float(log_y.mean() - beta * x_mean)
    residuals = log_y - mu - beta * log_x
    residual_std = float(np.sqrt(np.sum(residuals**2) / max(n - 2, 1)))
    return RegressionFit(
        beta=beta,
        mu=mu,
        residuals=residuals,
        residual_std=residual_std,
        window=window if window is not None else (0, n),
    )


def fit_pair(panel, i: str, j: str, window: tuple) -> RegressionFit:
    """Fit the pair (i, j) over panel rows [start, stop); prices must be complete."""
    start, stop = window
    x = panel.column(i)[start:stop]
    y = panel.column(j)[start:stop]
    if np.any(np.isnan(x)) or np.any(np.isnan(y)):
        raise ValueError(f"pair ({i}, {j}) has missing prices in window {window}")
    return fit_log_prices(np.log(x), np.log(y), window=(start, stop))


def adf_single_lag(residuals: np.ndarray) -> AdfResult:
    """Single-lag ADF on a residual series, with no constant and no trend.

    Estimates d_eps[t] = gamma * eps[t-1] + phi * d_eps[t-1] + u[t] by OLS and
    returns gamma's t-statistic with a MacKinnon response-surface p-value
    (no-constant case), clamped to [1e-6, 0.9999].
    """
    eps = np.asarray(residuals, dtype=np.float64)
    n = len(eps)
    if n < MIN_WINDOW:
        raise ValueError(f"series length {n} below minimum {MIN_WINDOW}")
    if np.any(np.isnan(eps)):
        raise ValueError("series contains NaN")
    d = np.diff(eps)
    y = d[1:]
    x = np.column_stack((eps[1:-1], d[:-1]))

    xtx = x.T @ x
    if np.linalg.matrix_rank(xtx) < 2:
        raise ValueError("perfectly collinear ADF regressors (degenerate series)")
    xtx_inv = np.linalg.inv(xtx)
    coef = xtx_inv @ (x.T @ y)
    resid = y - x @ coef
    dof = len(y) - 2
    if dof <= 0:
        raise ValueError("insufficient observations for the ADF regression")
    s2 = float(resid @ resid) / dof
    se_gamma = math.sqrt(s2 * xtx_inv[0, 0])
    if se_gamma == 0:
        raise ValueError("degenerate ADF regression (zero standard error)")
    t_stat = float(coef[0] / se_gamma)
    p_value = float(np.clip(mackinnonp(t_stat, regression="n", N=1), _P_FLOOR, _P_CEIL))
    return AdfResult(t_stat=t_stat, p_value=p_value)


def adf_critical_value(alpha: float = 0.05, nobs: int = np.inf) -> float:
    """Critical value of the no-constant ADF t-statistic at level alpha."""
    crit = mackinnoncrit(N=1, regression="n", nobs=nobs)
    try:
        return float(crit[{0.01: 0, 0.05: 1, 0.10: 2}[alpha]])
    except KeyError:
        raise ValueError(f"alpha must be 0.01, 0.05, or 0.10, got {alpha}") from None


def winsorize(value: float, bound: float = Z_BOUND) -> float:
    return float(min(max(value, -bound), bound))


def zscore(fit: RegressionFit, at: int) -> float:
    """Residual at window position `at` divided by the residual std, clipped to [-3, 3]."""
    if fit.residual_std <= 0:
        raise ValueError("degenerate pair: residual standard deviation is zero")
    return winsorize(float(fit.residuals[at]) / fit.residual_std)


def qscore(fit: RegressionFit, at: int) -> float:
    """(residual - median) / IQR over the fit window's residuals (type-7 quantiles)."""
    q25, q50, q75 = np.quantile(fit.residuals, [0.25, 0.50, 0.75])
    iqr = q75 - q25
    if iqr <= 0:
        raise ValueError("degenerate pair: residual interquartile range is zero")
    return float((fit.residuals[at] - q50) / iqr)
