"""Performance and portfolio-structure metrics: Sharpe, Sortino, drawdown,
turnover, retention, concentration, and cross-strategy correlation."""

import math
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from .selection import PortfolioSelection, selection_concentration
from .theory import TRADING_DAYS_PER_YEAR

__all__ = [
    "PerformanceReport",
    "performance",
    "report_markdown",
    "turnover",
    "turnover_series",
    "retention",
    "strategy_correlation",
    "concentration_series",
]


@dataclass(frozen=True)
class PerformanceReport:
    sharpe: float
    sortino: float | None
    cumulative_return: float
    annualized_return: float
    min_day: float
    max_day: float
    skew: float
    max_drawdown: float

    def to_dict(self) -> dict:
        return asdict(self)


def performance(returns) -> PerformanceReport:
    """Annualized metrics of a daily return series (risk-free rate taken as 0).

    Sortino divides by the standard deviation of the negative-return subsample
    and is reported as None when fewer than two negative days exist.
    """
    r = np.asarray(returns, dtype=np.float64)
    if len(r) < 2:
        raise ValueError("need at least two return observations")
    if np.any(np.isnan(r)):
        raise ValueError("returns contain NaN")
    std = r.std(ddof=1)
    if std == 0:
        raise ValueError("zero return standard deviation")
    mean = r.mean()
    ann = math.sqrt(TRADING_DAYS_PER_YEAR)

    negatives = r[r < 0]
    if len(negatives) >= 2 and negatives.std(ddof=1) > 0:
        sortino = float(mean / negatives.std(ddof=1) * ann)
    else:
        sortino = None

    equity = np.cumprod(1.0 + r)
    peak = np.maximum.accumulate(np.concatenate(([1.0], equity)))[1:]
    drawdown = float(np.min(equity / peak - 1.0))
    cumulative = float(equity[-1] - 1.0)

    centered = r - mean
    m2 = float(np.mean(centered**2))
    skew = float(np.mean(centered**3) / m2**1.5) if m2 > 0 else 0.0

    return PerformanceReport(
        sharpe=float(mean / std * ann),
        sortino=sortino,
        cumulative_return=cumulative,
        annualized_return=float((1.0 + cumulative) ** (TRADING_DAYS_PER_YEAR / len(r)) - 1.0),
        min_day=float(r.min()),
        max_day=float(r.max()),
        skew=skew,
        max_drawdown=min(drawdown, 0.0),
    )


_REPORT_ROWS = [
    ("Sharpe ratio", "sharpe", "{:.2f}"),
    ("Sortino ratio", "sortino", "{:.2f}"),
    ("Cumulative returns (%)", "cumulative_return", "{:.2%}"),
    ("Annualized returns (%)", "annualized_return", "{:.2%}"),
    ("Minimum single day return (%)", "min_day", "{:.2%}"),
    ("Maximum single day return (%)", "max_day", "{:.2%}"),
    ("Skew", "skew", "{:.2f}"),
    ("Drawdown (%)", "max_drawdown", "{:.2%}"),
]


def report_markdown(reports: dict) -> str:
    """Markdown metrics table with one column per strategy label."""
    labels = list(reports)
    lines = ["| Metric | " + " | ".join(labels) + " |"]
    lines.append("|" + "---|" * (len(labels) + 1))
    for row_label, attr, fmt in _REPORT_ROWS:
        cells = []
        for label in labels:
            value = getattr(reports[label], attr)
            cells.append("n/a" if value is None else fmt.format(value))
        lines.append(f"| {row_label} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def turnover(positions: dict, t, *, previous=None) -> float:
    """Sum of absolute per-ticker position changes between t-1 and t.

    positions maps date -> {ticker: dollars}.  For the first recorded day the
    change is measured from a flat book, so it equals the gross opened size.
    """
    dates = sorted(positions)
    if t not in positions:
        raise KeyError(f"date {t!r} not in positions")
    idx = dates.index(t)
    if previous is None:
        previous = positions[dates[idx - 1]] if idx > 0 else {}
    current = positions[t]
    # sorted so the float summation order is stable across processes
    tickers = sorted(set(previous) | set(current))
    return float(sum(abs(current.get(k, 0.0) - previous.get(k, 0.0)) for k in tickers))


def turnover_series(ledger) -> pd.Series:
    """Daily turnover across the whole ledger, first day measured from flat."""
    dates = sorted(ledger.positions)
    values = []
    previous: dict = {}
    for d in dates:
        values.append(turnover(ledger.positions, d, previous=previous))
        previous = ledger.positions[d]
    return pd.Series(values, index=dates)


def retention(sel_a: PortfolioSelection, sel_b: PortfolioSelection) -> float:
    """Jaccard similarity of the two selections' pair sets; two empties are 1."""
    a, b = sel_a.pair_keys(), sel_b.pair_keys()
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


def strategy_correlation(returns: dict) -> pd.DataFrame:
    """Pearson correlation matrix of aligned daily return series."""
    series = {name: pd.Series(np.asarray(s, dtype=np.float64)) for name, s in returns.items()}
    lengths = {len(s) for s in series.values()}
    if len(lengths) > 1:
        raise ValueError(f"misaligned series lengths: {sorted(lengths)}")
    frame = pd.DataFrame(series)
    return frame.corr()


def concentration_series(selections) -> list:
    return [selection_concentration(sel) for sel in selections]
