"""Daily pairs-trading engine: monthly reselection, rolling-window signals,
slope-scaled dollar positions, and a gross/net return ledger."""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .pairstats import RegressionFit, fit_log_prices, qscore, zscore
from .selection import (
    DEFAULT_K_TARGET,
    PortfolioSelection,
    baseline_topk,
    build_pairs_graph,
    max_weight_matching,
)
from .theory import TRADING_DAYS_PER_YEAR

__all__ = [
    "BacktestConfig",
    "DailyLedger",
    "run_backtest",
    "signal_to_positions",
    "pair_gross_return",
    "apply_fees",
]

log = logging.getLogger(__name__)

SELECTION_METHODS = ("matching", "baseline")
SIGNAL_KINDS = ("z", "q")
FEE_MODES = ("held", "changed")


@dataclass(frozen=True)
class BacktestConfig:
    selection_method: str = "matching"
    signal_kind: str = "z"
    k: float = 2.0
    lookback_days: int = 504
    fee_annual: float = 0.01
    k_target: int = DEFAULT_K_TARGET
    # "held" charges the daily fee on every day a pair holds a position;
    # "changed" charges it only on days the pair's positions change
    fee_mode: str = "held"

    def __post_init__(self):
        if self.selection_method not in SELECTION_METHODS:
            raise ValueError(f"selection_method must be one of {SELECTION_METHODS}")
        if self.signal_kind not in SIGNAL_KINDS:
            raise ValueError(f"signal_kind must be one of {SIGNAL_KINDS}")
        if not self.k > 0:
            raise ValueError("k must be > 0")
        if self.lookback_days < 30:
            raise ValueError("lookback_days must be >= 30")
        if not 0.0 <= self.fee_annual < 1.0:
            raise ValueError("fee_annual must be in [0, 1)")
        if self.k_target < 1:
            raise ValueError("k_target must be >= 1")
        if self.fee_mode not in FEE_MODES:
            raise ValueError(f"fee_mode must be one of {FEE_MODES}")


@dataclass
class DailyLedger:
    """Backtest output: per-(day, pair) records, per-day portfolio aggregates,
    per-day net dollar positions, and the monthly selections."""

    config: BacktestConfig
    pair_records: pd.DataFrame
    daily: pd.DataFrame
    positions: dict
    selections: list

    def to_csv(self, pair_path, daily_path) -> None:
        self.pair_records.to_csv(pair_path, index=False, float_format="%.12g")
        self.daily.to_csv(daily_path, index=False, float_format="%.12g")

    def positions_frame(self) -> pd.DataFrame:
        """Wide per-ticker net dollar positions keyed by signal date."""
        return pd.DataFrame.from_dict(self.positions, orient="index").fillna(0.0).sort_index()


def signal_to_positions(signal: float, fit: RegressionFit, i: str, j: str) -> dict:
    """Dollar positions for an integer signal: s > 0 is long beta*|s| of the
    anchor stock i and short |s| of j; s < 0 mirrors; s = 0 is flat."""
    if signal == 0:
        return {}
    return {i: fit.beta * signal, j: -float(signal)}


def pair_gross_return(positions: dict, prices_t: dict, prices_t1: dict) -> float:
    """Sum over tickers of position * (p_{t+1}/p_t - 1); missing prices abort."""
    total = 0.0
    for ticker, dollars in positions.items():
        p0 = prices_t.get(ticker)
        p1 = prices_t1.get(ticker)
        if p0 is None or p1 is None or not (p0 > 0) or not (p1 > 0) or math.isnan(p0) or math.isnan(p1):
            raise ValueError(f"missing or invalid price for held ticker {ticker!r}")
        total += dollars * (p1 / p0 - 1.0)
    return total


def apply_fees(pair_gross: dict, charged, fee_annual: float) -> dict:
    """Net per-pair returns: subtract fee_annual/252 from each charged pair."""
    fee = fee_annual / TRADING_DAYS_PER_YEAR
    return {pair: g - (fee if pair in charged else 0.0) for pair, g in pair_gross.items()}


def _signal_value(kind: str, score: float, k: float) -> int:
    if kind == "z":
        if score >= k:
            return 1
        if score <= -k:
            return -1
        return 0
    # q-score: sign times |q| rounded to nearest integer (0.5 rounds away from 0)
    magnitude = int(math.floor(abs(score) + 0.5))
    if magnitude == 0:
        return 0
    return magnitude if score >= 0 else -magnitude


def _select(panel, config, window, universe, as_of) -> PortfolioSelection:
    graph = build_pairs_graph(panel, window=window, universe=universe)
    if config.selection_method == "matching":
        sel = max_weight_matching(graph, as_of=as_of)
    else:
        sel = baseline_topk(graph, k_target=config.k_target, as_of=as_of)
    return sel


def run_backtest(panel, config: BacktestConfig, universe=None) -> DailyLedger:
    """Run the daily engine over the panel.

    Pairs are reselected on the first trading day of each month using the
    trailing lookback window; every day each selected pair is refit on the
    lookback window ending that day, scored, and positioned from that close to
    the next.  Returns are booked on the realization date.  Deterministic for
    a fixed panel and config.
    """
    lookback = config.lookback_days
    n = panel.n_days
    if n < lookback + 2:
        raise ValueError(
            f"panel has {n} days; need at least lookback ({lookback}) + 2 for one trade"
        )
    month_keys = panel.month_keys()
    log_prices = np.log(panel.prices)

    records = []
    daily_rows = []
    positions_by_day = {}
    selections = []
    selection = None
    prev_positions: dict = {}

    for t in range(lookback, n - 1):
        if selection is None or month_keys[t] != month_keys[t - 1]:
            try:
                selection = _select(
                    panel, config, (t - lookback, t), universe, as_of=panel.dates[t]
                )
            except ValueError as exc:
                log.warning("selection failed at %s: %s; trading nothing", panel.dates[t], exc)
                selection = PortfolioSelection(
                    method=config.selection_method, pairs=(), as_of=panel.dates[t]
                )
            selections.append(selection)
            if not selection.pairs:
                log.warning("empty selection at %s", panel.dates[t])

        day_positions: dict = {}
        pair_gross: dict = {}
        pair_positions: dict = {}
        day_records = []
        for edge in selection.pairs:
            ci = panel.ticker_position(edge.i)
            cj = panel.ticker_position(edge.j)
            x = log_prices[t - lookback + 1 : t + 1, ci]
            y = log_prices[t - lookback + 1 : t + 1, cj]
            nan_now = (
                np.any(np.isnan(x))
                or np.any(np.isnan(y))
                or np.isnan(log_prices[t + 1, ci])
                or np.isnan(log_prices[t + 1, cj])
            )
            if nan_now:
                log.warning(
                    "pair (%s, %s) lost data near %s; force-flattened",
                    edge.i, edge.j, panel.dates[t],
                )
                score, signal, gross = math.nan, 0, 0.0
                positions = {}
            else:
                fit = fit_log_prices(x, y)
                score = zscore(fit, -1) if config.signal_kind == "z" else qscore(fit, -1)
                signal = _signal_value(config.signal_kind, score, config.k)
                positions = signal_to_positions(signal, fit, edge.i, edge.j)
                gross = sum(
                    dollars * (panel.prices[t + 1, panel.ticker_position(tk)]
                               / panel.prices[t, panel.ticker_position(tk)] - 1.0)
                    for tk, dollars in positions.items()
                )
            pair_gross[edge.key] = gross
            pair_positions[edge.key] = positions
            for tk, dollars in positions.items():
                day_positions[tk] = day_positions.get(tk, 0.0) + dollars
            day_records.append((edge, score, signal))

        if config.fee_mode == "held":
            charged = {k for k, pos in pair_positions.items() if pos}
        else:
            charged = {
                k for k in pair_positions
                if pair_positions[k] != prev_positions.get(k, {})
            }
        pair_net = apply_fees(pair_gross, charged, config.fee_annual)

        for edge, score, signal in day_records:
            records.append(
                {
                    "signal_date": panel.dates[t],
                    "return_date": panel.dates[t + 1],
                    "ticker_i": edge.i,
                    "ticker_j": edge.j,
                    "raw_score": score,
                    "signal": signal,
                    "gross": pair_gross[edge.key],
                    "fee": pair_gross[edge.key] - pair_net[edge.key],
                    "net": pair_net[edge.key],
                }
            )
        gross_total = sum(pair_gross.values())
        net_total = sum(pair_net.values())
        daily_rows.append(
            {
                "date": panel.dates[t + 1],
                "gross": gross_total,
                "net": net_total,
                "fee": gross_total - net_total,
                "n_active": len(charged) if config.fee_mode == "held"
                else sum(1 for pos in pair_positions.values() if pos),
            }
        )
        positions_by_day[panel.dates[t]] = day_positions
        prev_positions = pair_positions

    pair_columns = [
        "signal_date", "return_date", "ticker_i", "ticker_j",
        "raw_score", "signal", "gross", "fee", "net",
    ]
    return DailyLedger(
        config=config,
        pair_records=pd.DataFrame(records, columns=pair_columns),
        daily=pd.DataFrame(daily_rows, columns=["date", "gross", "net", "fee", "n_active"]),
        positions=positions_by_day,
        selections=selections,
    )
