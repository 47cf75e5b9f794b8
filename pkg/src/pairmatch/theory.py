"""Theoretical portfolio moments and random-graph shared-pair estimates.

Composes single-pair means, variances, and shared-stock covariances into a
portfolio mean/variance and annualized Sharpe ratio, and provides the
Erdos-Renyi expectation for how many selected pairs share a stock by chance.
"""

import math
from dataclasses import dataclass

__all__ = [
    "TRADING_DAYS_PER_YEAR",
    "PortfolioComposition",
    "TheoreticalPortfolioMoments",
    "portfolio_moments",
    "er_expected_shared_pairs",
    "count_shared_pairs",
]

TRADING_DAYS_PER_YEAR = 252


@dataclass(frozen=True)
class PortfolioComposition:
    """Pair counts: n1/n2 cointegrated and non-cointegrated pairs, m1/m2 the
    number of same-type pair-of-pairs sharing a stock."""

    n1: int
    n2: int
    m1: int
    m2: int

    def __post_init__(self):
        for name in ("n1", "n2", "m1", "m2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.m1 > self.n1 * (self.n1 - 1) // 2:
            raise ValueError(f"m1={self.m1} exceeds C(n1, 2)")
        if self.m2 > self.n2 * (self.n2 - 1) // 2:
            raise ValueError(f"m2={self.m2} exceeds C(n2, 2)")


@dataclass(frozen=True)
class TheoreticalPortfolioMoments:
    mean: float
    variance: float
    sharpe_daily: float
    sharpe_annualized: float


def portfolio_moments(
    comp: PortfolioComposition,
    mu_c: float,
    nu1: float,
    nu2: float,
    kappa1: float,
    kappa2: float,
) -> TheoreticalPortfolioMoments:
    """Portfolio mean n1*mu_c and variance n1*nu1 + n2*nu2 + 2*m1*kappa1 + 2*m2*kappa2.

    Unit capital per pair: the portfolio return is the sum of pair returns.
    The daily Sharpe ratio is annualized with sqrt(252).
    """
    if nu1 < 0 or nu2 < 0:
        raise ValueError("pair variances must be >= 0")
    mean = comp.n1 * mu_c
    variance = comp.n1 * nu1 + comp.n2 * nu2 + 2 * comp.m1 * kappa1 + 2 * comp.m2 * kappa2
    if variance < 0:
        raise ValueError(f"portfolio variance evaluated to {variance} < 0")
    sharpe = mean / math.sqrt(variance) if variance > 0 else math.inf * (1 if mean > 0 else -1)
    return TheoreticalPortfolioMoments(
        mean=mean,
        variance=variance,
        sharpe_daily=sharpe,
        sharpe_annualized=sharpe * math.sqrt(TRADING_DAYS_PER_YEAR),
    )


def er_expected_shared_pairs(n: int, p: float) -> float:
    """Expected number of two-hop paths in G(n, p): 3 * p^2 * n(n-1)(n-2) / 6."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    return 3.0 * p * p * n * (n - 1) * (n - 2) / 6.0


def count_shared_pairs(edges) -> int:
    """Number of unordered edge pairs sharing a node: sum over v of C(deg v, 2)."""
    degree: dict = {}
    seen = set()
    for edge in edges:
        try:
            i, j = edge
        except (TypeError, ValueError):
            raise ValueError(f"malformed edge {edge!r}") from None
        if i == j:
            raise ValueError(f"self-loop on node {i!r}")
        key = (i, j) if i <= j else (j, i)
        if key in seen:
            raise ValueError(f"duplicate edge {key!r}")
        seen.add(key)
        degree[i] = degree.get(i, 0) + 1
        degree[j] = degree.get(j, 0) + 1
    return sum(d * (d - 1) // 2 for d in degree.values())
