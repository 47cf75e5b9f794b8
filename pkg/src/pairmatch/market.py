"""Reproducible synthetic price panels: independent log-normal walks with
optional planted cointegrated pairs.

Each stock gets its own child RNG stream spawned from the universe seed, so
generation is deterministic and order-insensitive.  A planted pair overwrites
the second ticker's log-price with the first ticker's log-price plus i.i.d.
Gaussian spread noise (unit slope, zero intercept).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .panel import PricePanel

__all__ = ["UniverseSpec", "generate"]

_LOG_PRICE_LOW = math.log(10.0)
_LOG_PRICE_HIGH = math.log(500.0)


def default_tickers(n: int) -> list[str]:
    width = max(3, len(str(n - 1)))
    return [f"S{i:0{width}d}" for i in range(n)]


@dataclass(frozen=True)
class UniverseSpec:
    """Recipe for a synthetic universe.

    planted_pairs entries are (anchor_ticker, follower_ticker, sigma_spread);
    the follower's log-price tracks the anchor.  A ticker may appear in several
    planted pairs only when allow_shared is set (used to engineer hub-and-spoke
    cointegration clusters).
    """

    n_stocks: int
    n_days: int
    seed: int
    planted_pairs: tuple = ()
    mu_range: tuple[float, float] = (0.0, 0.001)
    sigma_range: tuple[float, float] = (0.01, 0.03)
    allow_shared: bool = False
    tickers: tuple = field(default=None)

    def __post_init__(self):
        if self.n_stocks < 1:
            raise ValueError("n_stocks must be >= 1")
        if self.n_days < 2:
            raise ValueError("n_days must be >= 2")
        if self.mu_range[0] > self.mu_range[1] or self.sigma_range[0] > self.sigma_range[1]:
            raise ValueError("parameter ranges must be (low, high) with low <= high")
        if self.sigma_range[0] <= 0:
            raise ValueError("sigma_range must be positive")
        names = self.resolved_tickers()
        if len(names) != self.n_stocks or len(set(names)) != self.n_stocks:
            raise ValueError("tickers must be n_stocks distinct names")
        name_set = set(names)
        used = set()
        followers = set()
        for entry in self.planted_pairs:
            a, b, sigma_spread = entry
            if a == b or a not in name_set or b not in name_set:
                raise ValueError(f"planted pair {entry!r} must reference two distinct tickers")
            if sigma_spread <= 0:
                raise ValueError(f"planted pair {entry!r} needs sigma_spread > 0")
            if b in followers:
                raise ValueError(f"ticker {b!r} is the follower of two planted pairs")
            if not self.allow_shared and (a in used or b in used):
                raise ValueError(
                    f"ticker reuse in planted pair {entry!r}; set allow_shared to permit it"
                )
            followers.add(b)
            used.update((a, b))

    def resolved_tickers(self) -> list[str]:
        if self.tickers is not None:
            return list(self.tickers)
        return default_tickers(self.n_stocks)


def generate(spec: UniverseSpec) -> PricePanel:
    """Build the panel described by spec; identical seeds give identical panels."""
    tickers = spec.resolved_tickers()
    order = {t: i for i, t in enumerate(tickers)}
    streams = np.random.SeedSequence(spec.seed).spawn(spec.n_stocks)
    log_prices = np.empty((spec.n_days, spec.n_stocks))

    for idx in range(spec.n_stocks):
        rng = np.random.default_rng(streams[idx])
        mu = rng.uniform(*spec.mu_range)
        sigma = rng.uniform(*spec.sigma_range)
        start = rng.uniform(_LOG_PRICE_LOW, _LOG_PRICE_HIGH)
        steps = mu + rng.normal(0.0, sigma, spec.n_days - 1)
        log_prices[:, idx] = start + np.concatenate(([0.0], np.cumsum(steps)))

    # planted followers replace their own walk with anchor + i.i.d. spread,
    # drawn from the follower's stream so anchors are unaffected
    for anchor, follower, sigma_spread in spec.planted_pairs:
        rng = np.random.default_rng(streams[order[follower]].spawn(1)[0])
        spread = rng.normal(0.0, sigma_spread, spec.n_days)
        log_prices[:, order[follower]] = log_prices[:, order[anchor]] + spread

    dates = np.arange(spec.n_days, dtype=np.int64)
    return PricePanel(dates=dates, tickers=tickers, prices=np.exp(log_prices))
