"""Closed-form return moments for threshold-traded pairs, plus Monte Carlo oracles.

The closed forms cover four cases: mean/variance of a cointegrated pair,
covariance of two cointegrated pairs sharing a stock, variance of a
non-cointegrated pair (its mean is identically zero), and covariance of two
non-cointegrated pairs sharing a stock.  Each has a matching Monte Carlo
simulator that draws directly from the generative price model so the formulas
can be validated to sampling accuracy.
"""

import math
from dataclasses import dataclass

import numpy as np

from .normals import bivariate_orthant, std_normal_cdf, std_normal_sf

__all__ = [
    "PairModelParams",
    "TripleModelParams",
    "PairMoments",
    "McEstimate",
    "cointegrated_pair_mean",
    "cointegrated_pair_variance",
    "cointegrated_shared_covariance",
    "noncoint_pair_moments",
    "bivariate_correlation",
    "noncoint_shared_covariance",
    "mc_pair_moments",
]

_MIN_PATHS = 10_000
_MC_BLOCK = 1 << 18

# tiny negative variance from floating-point cancellation is clamped to zero
_NEG_TOL = 1e-12


def _check_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class PairModelParams:
    """Generative parameters of a traded cointegrated pair.

    mu1/sigma1 are the daily drift and noise std dev of the anchor stock's
    log-price random walk; sigma is the std dev of the i.i.d. spread; k is the
    trading threshold in spread-std-dev units.
    """

    mu1: float
    sigma1: float
    sigma: float
    k: float

    def __post_init__(self):
        if not math.isfinite(self.mu1):
            raise ValueError(f"mu1 must be finite, got {self.mu1}")
        _check_positive("sigma1", self.sigma1)
        _check_positive("sigma", self.sigma)
        _check_positive("k", self.k)


@dataclass(frozen=True)
class TripleModelParams:
    """Parameters for stocks 1..3 following independent log-normal walks.

    Pairs (1,2) and (1,3) share stock 1.  The elapsed-time parameter t sets the
    spread variance t*(sigma_i^2 + sigma_j^2) of the accumulated walks.
    """

    mu: tuple[float, float, float]
    sigma: tuple[float, float, float]
    k: float
    t: int = 252

    def __post_init__(self):
        if len(self.mu) != 3 or len(self.sigma) != 3:
            raise ValueError("mu and sigma must each have three entries")
        for i, m in enumerate(self.mu):
            if not math.isfinite(m):
                raise ValueError(f"mu[{i}] must be finite, got {m}")
        for i, s in enumerate(self.sigma):
            _check_positive(f"sigma[{i}]", s)
        _check_positive("k", self.k)
        if not (isinstance(self.t, (int, np.integer)) and self.t >= 1):
            raise ValueError(f"t must be a positive integer, got {self.t}")

    def spread_sigma(self, j: int) -> float:
        """Std dev of the accumulated spread of pair (stock 1, stock j)."""
        return math.sqrt(self.t * (self.sigma[0] ** 2 + self.sigma[j - 1] ** 2))


@dataclass(frozen=True)
class PairMoments:
    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")


def _clamp_variance(value: float) -> float:
    if value < 0:
        if value < -_NEG_TOL:
            raise ArithmeticError(f"variance evaluated to {value} < -{_NEG_TOL}")
        return 0.0
    return value


def cointegrated_pair_mean(params: PairModelParams) -> float:
    """Expected daily return of a cointegrated pair; positive for all valid params."""
    p = params
    window = std_normal_cdf(p.k + p.sigma) - std_normal_cdf(p.k - p.sigma)
    return math.exp(p.mu1 + p.sigma1**2 / 2 + p.sigma**2) * window


def cointegrated_pair_variance(params: PairModelParams) -> float:
    """Variance of the daily return of a cointegrated pair."""
    p = params
    mean = cointegrated_pair_mean(p)
    second = (
        math.exp(2 * p.mu1 + 2 * p.sigma1**2 + 4 * p.sigma**2)
        * (std_normal_cdf(-p.k + 2 * p.sigma) + std_normal_sf(p.k + 2 * p.sigma))
        - 2
        * math.exp(2 * p.mu1 + 2 * p.sigma1**2 + p.sigma**2)
        * (std_normal_cdf(-p.k + p.sigma) + std_normal_sf(p.k + p.sigma))
        + 2 * math.exp(2 * p.mu1 + 2 * p.sigma1**2) * std_normal_sf(p.k)
    )
    return _clamp_variance(second - mean * mean)


def cointegrated_shared_covariance(
    params_a: PairModelParams, params_b: PairModelParams
) -> float:
    """Covariance of two cointegrated pairs that share their anchor stock."""
    if params_a.mu1 != params_b.mu1 or params_a.sigma1 != params_b.sigma1:
        raise ValueError(
            "shared-stock parameters differ: "
            f"(mu1, sigma1) = ({params_a.mu1}, {params_a.sigma1}) vs "
            f"({params_b.mu1}, {params_b.sigma1})"
        )
    return (
        (math.exp(params_a.sigma1**2) - 1)
        * cointegrated_pair_mean(params_a)
        * cointegrated_pair_mean(params_b)
    )


def noncoint_pair_moments(params: TripleModelParams, stocks=(1, 2)) -> PairMoments:
    """Mean (exactly zero) and variance of a non-cointegrated pair's daily return."""
    i, j = stocks
    if {i, j} - {1, 2, 3} or i == j:
        raise ValueError(f"stocks must be two distinct indices in 1..3, got {stocks}")
    mi, mj = params.mu[i - 1], params.mu[j - 1]
    si, sj = params.sigma[i - 1], params.sigma[j - 1]
    variance = (
        2
        * std_normal_sf(params.k)
        * (
            math.exp(2 * mi + 2 * si**2)
            + math.exp(2 * mj + 2 * sj**2)
            - 2 * math.exp(mi + mj + si**2 / 2 + sj**2 / 2)
        )
    )
    return PairMoments(mean=0.0, variance=_clamp_variance(variance))


def bivariate_correlation(params: TripleModelParams) -> float:
    """Correlation of the standardized spreads of pairs (1,2) and (1,3)."""
    s1, s2, s3 = params.sigma
    return s1**2 / math.sqrt((s1**2 + s2**2) * (s1**2 + s3**2))


def noncoint_shared_covariance(params: TripleModelParams) -> float:
    """Covariance of two non-cointegrated pairs sharing stock 1."""
    m1, m2, m3 = params.mu
    s1, s2, s3 = params.sigma
    rho = bivariate_correlation(params)
    p_uu = bivariate_orthant(rho, params.k, "upper-upper")
    p_ul = bivariate_orthant(rho, params.k, "upper-lower")
    factor = (
        math.exp(m2 + m3 + s2**2 / 2 + s3**2 / 2)
        - math.exp(m1 + m3 + s1**2 / 2 + s3**2 / 2)
        - math.exp(m1 + m2 + s1**2 / 2 + s2**2 / 2)
        + math.exp(2 * m1 + 2 * s1**2)
    )
    return 2.0 * (p_uu - p_ul) * factor


# ---------------------------------------------------------------------------
# Monte Carlo oracles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class McEstimate:
    """Sample moments with standard errors from a Monte Carlo run."""

    n_paths: int
    mean: float | None = None
    mean_se: float | None = None
    variance: float | None = None
    variance_se: float | None = None
    covariance: float | None = None
    covariance_se: float | None = None


def _block_streams(seed, n_paths):
    """Deterministic per-block generators; results do not depend on scheduling."""
    n_blocks = (n_paths + _MC_BLOCK - 1) // _MC_BLOCK
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    sizes = [_MC_BLOCK] * (n_blocks - 1) + [n_paths - _MC_BLOCK * (n_blocks - 1)]
    return [(np.random.default_rng(c), s) for c, s in zip(children, sizes)]


def _threshold_signal(eps, threshold):
    return (eps <= -threshold).astype(np.float64) - (eps >= threshold).astype(np.float64)


def _simulate(params, model, rng, size):
    """One block of single-step pair returns under the requested price model."""
    if model == "cointegrated":
        p = params
        eps0 = rng.normal(0.0, p.sigma, size)
        eps1 = rng.normal(0.0, p.sigma, size)
        noise = rng.normal(0.0, p.sigma1, size)
        sig = _threshold_signal(eps0, p.k * p.sigma)
        return (sig * np.exp(p.mu1 + noise) * (np.exp(eps1 - eps0) - 1.0),)

    if model == "shared-cointegrated":
        pa, pb = params
        noise = rng.normal(0.0, pa.sigma1, size)  # shared anchor-stock noise
        out = []
        for p in (pa, pb):
            eps0 = rng.normal(0.0, p.sigma, size)
            eps1 = rng.normal(0.0, p.sigma, size)
            sig = _threshold_signal(eps0, p.k * p.sigma)
            out.append(sig * np.exp(p.mu1 + noise) * (np.exp(eps1 - eps0) - 1.0))
        return tuple(out)

    if model == "non-cointegrated":
        p = params
        sd = math.sqrt(p.t)
        x1 = rng.normal(0.0, sd * p.sigma[0], size)
        x2 = rng.normal(0.0, sd * p.sigma[1], size)
        sig = _threshold_signal(x2 - x1, p.k * p.spread_sigma(2))
        d1 = rng.normal(0.0, p.sigma[0], size)
        d2 = rng.normal(0.0, p.sigma[1], size)
        return (sig * (np.exp(p.mu[1] + d2) - np.exp(p.mu[0] + d1)),)

    if model == "shared-noncointegrated":
        p = params
        sd = math.sqrt(p.t)
        x1 = rng.normal(0.0, sd * p.sigma[0], size)
        x2 = rng.normal(0.0, sd * p.sigma[1], size)
        x3 = rng.normal(0.0, sd * p.sigma[2], size)
        sig_a = _threshold_signal(x2 - x1, p.k * p.spread_sigma(2))
        sig_b = _threshold_signal(x3 - x1, p.k * p.spread_sigma(3))
        d1 = rng.normal(0.0, p.sigma[0], size)
        d2 = rng.normal(0.0, p.sigma[1], size)
        d3 = rng.normal(0.0, p.sigma[2], size)
        r1 = np.exp(p.mu[0] + d1)
        return (
            sig_a * (np.exp(p.mu[1] + d2) - r1),
            sig_b * (np.exp(p.mu[2] + d3) - r1),
        )

    raise ValueError(f"unknown model {model!r}")


def mc_pair_moments(params, model: str, n_paths: int, seed: int) -> McEstimate:
    """Simulate single-step pair returns and estimate the moments with SEs.

    model selects the generative setup: "cointegrated" and "non-cointegrated"
    return mean/variance of one pair; "shared-cointegrated" (params is a tuple
    of two PairModelParams) and "shared-noncointegrated" return the covariance
    of the two pairs' returns.  Deterministic given seed.
    """
    if n_paths < _MIN_PATHS:
        raise ValueError(f"n_paths must be >= {_MIN_PATHS}, got {n_paths}")

    chunks = []
    for rng, size in _block_streams(seed, n_paths):
        chunks.append(_simulate(params, model, rng, size))

    series = [np.concatenate([c[i] for c in chunks]) for i in range(len(chunks[0]))]
    n = n_paths
    if len(series) == 1:
        r = series[0]
        mean = float(r.mean())
        var = float(r.var(ddof=1))
        dev = r - mean
        # SE of the sample variance from the fourth central moment
        m4 = float(np.mean(dev**4))
        var_se = math.sqrt(max(m4 - var**2, 0.0) / n)
        return McEstimate(
            n_paths=n,
            mean=mean,
            mean_se=float(r.std(ddof=1) / math.sqrt(n)),
            variance=var,
            variance_se=var_se,
        )

    ra, rb = series
    prod = (ra - ra.mean()) * (rb - rb.mean())
    cov = float(prod.sum() / (n - 1))
    return McEstimate(
        n_paths=n,
        covariance=cov,
        covariance_se=float(prod.std(ddof=1) / math.sqrt(n)),
    )
