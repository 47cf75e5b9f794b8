"""Standard-normal primitives used by the closed-form moment calculators."""

import math

import numpy as np
from scipy import integrate

__all__ = ["std_normal_cdf", "std_normal_sf", "bivariate_orthant"]

_SQRT2 = math.sqrt(2.0)


def std_normal_cdf(x: float) -> float:
    """P(Z <= x) for a standard normal Z, accurate in both tails."""
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_sf(x: float) -> float:
    """P(Z >= x); computed directly so the upper tail keeps relative accuracy."""
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    return 0.5 * math.erfc(x / _SQRT2)


def _std_normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def bivariate_orthant(rho: float, k: float, quadrant: str = "upper-upper") -> float:
    """Joint tail probability of a standard bivariate normal with correlation rho.

    quadrant "upper-upper" gives P(Za >= k and Zb >= k); "upper-lower" gives
    P(Za >= k and Zb <= -k).  Evaluated by adaptive quadrature of the
    conditional-CDF reduction: integrate phi(x) * P(Zb in tail | Za = x) over
    x >= k, where Zb | Za = x is N(rho*x, 1 - rho^2).
    """
    if not abs(rho) < 1.0:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    if not math.isfinite(k):
        raise ValueError(f"k must be finite, got {k}")
    if quadrant not in ("upper-upper", "upper-lower"):
        raise ValueError(f"unknown quadrant {quadrant!r}")

    c = math.sqrt(1.0 - rho * rho)
    if quadrant == "upper-upper":
        def integrand(x):
            return _std_normal_pdf(x) * std_normal_sf((k - rho * x) / c)
    else:
        def integrand(x):
            return _std_normal_pdf(x) * std_normal_cdf((-k - rho * x) / c)

    value, _ = integrate.quad(integrand, k, np.inf, epsabs=1e-12, limit=200)
    # quadrature round-off can leave a tiny negative residue for extreme inputs
    return min(max(value, 0.0), 1.0)
