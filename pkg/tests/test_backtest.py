import math

import numpy as np
import pytest

from pairmatch.backtest import (
    BacktestConfig,
    apply_fees,
    pair_gross_return,
    run_backtest,
    signal_to_positions,
)
from pairmatch.backtest import _signal_value
from pairmatch.market import UniverseSpec, generate
from pairmatch.pairstats import RegressionFit


def small_panel(seed=0, n_stocks=6, n_days=130):
    return generate(UniverseSpec(
        n_stocks=n_stocks, n_days=n_days, seed=seed,
        planted_pairs=(("S000", "S001", 0.05), ("S002", "S003", 0.05)),
    ))


def test_config_validation():
    BacktestConfig()
    with pytest.raises(ValueError):
        BacktestConfig(selection_method="greedy")
    with pytest.raises(ValueError):
        BacktestConfig(signal_kind="m")
    with pytest.raises(ValueError):
        BacktestConfig(k=0.0)
    with pytest.raises(ValueError):
        BacktestConfig(lookback_days=29)
    with pytest.raises(ValueError):
        BacktestConfig(fee_annual=1.0)
    with pytest.raises(ValueError):
        BacktestConfig(k_target=0)
    with pytest.raises(ValueError):
        BacktestConfig(fee_mode="daily")


def test_signal_to_positions():
    fit = RegressionFit(beta=1.4, mu=0.0, residuals=np.zeros(30),
                        residual_std=1.0, window=(0, 30))
    assert signal_to_positions(0, fit, "A", "B") == {}
    assert signal_to_positions(1, fit, "A", "B") == {"A": 1.4, "B": -1.0}
    assert signal_to_positions(-2, fit, "A", "B") == {"A": -2.8, "B": 2.0}


def test_signal_value_z():
    assert _signal_value("z", 2.5, 2.0) == 1
    assert _signal_value("z", 2.0, 2.0) == 1
    assert _signal_value("z", 1.99, 2.0) == 0
    assert _signal_value("z", -2.0, 2.0) == -1
    assert _signal_value("z", 0.0, 2.0) == 0


def test_signal_value_q_rounding():
    assert _signal_value("q", 0.49, 2.0) == 0
    assert _signal_value("q", 0.5, 2.0) == 1
    assert _signal_value("q", 1.49, 2.0) == 1
    assert _signal_value("q", 1.5, 2.0) == 2
    assert _signal_value("q", -0.5, 2.0) == -1
    assert _signal_value("q", -2.7, 2.0) == -3


def test_pair_gross_return_hand_value():
    positions = {"A": 1.4, "B": -1.0}
    p0 = {"A": 100.0, "B": 50.0}
    p1 = {"A": 101.0, "B": 49.0}
    expected = 1.4 * (101 / 100 - 1) - 1.0 * (49 / 50 - 1)
    assert pair_gross_return(positions, p0, p1) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        pair_gross_return(positions, {"A": 100.0}, p1)
    with pytest.raises(ValueError):
        pair_gross_return(positions, p0, {"A": 101.0, "B": math.nan})


def test_apply_fees():
    gross = {("A", "B"): 0.01, ("C", "D"): 0.02}
    net = apply_fees(gross, charged={("A", "B")}, fee_annual=0.01)
    assert net[("A", "B")] == pytest.approx(0.01 - 0.01 / 252, rel=1e-12)
    assert net[("C", "D")] == 0.02


def test_backtest_rejects_short_panel():
    panel = small_panel(n_days=41)
    with pytest.raises(ValueError):
        run_backtest(panel, BacktestConfig(lookback_days=40))


def test_backtest_shapes_and_dates():
    panel = small_panel(seed=1)
    config = BacktestConfig(lookback_days=40, k_target=5)
    ledger = run_backtest(panel, config)
    n_signal_days = panel.n_days - 1 - 40
    assert len(ledger.daily) == n_signal_days
    assert list(ledger.daily["date"]) == list(panel.dates[41:])
    # returns are always booked one day after the signal
    assert (ledger.pair_records["return_date"] - ledger.pair_records["signal_date"] == 1).all()
    assert len(ledger.positions) == n_signal_days


def test_backtest_monthly_reselection_count():
    panel = small_panel(seed=2, n_days=130)
    ledger = run_backtest(panel, BacktestConfig(lookback_days=40, k_target=5))
    # signal days t = 40..128; month changes at t = 42, 63, 84, 105, 126
    assert len(ledger.selections) == 6
    as_ofs = [sel.as_of for sel in ledger.selections]
    assert as_ofs == [panel.dates[t] for t in (40, 42, 63, 84, 105, 126)]


def test_backtest_daily_aggregates_pair_records():
    panel = small_panel(seed=3)
    ledger = run_backtest(panel, BacktestConfig(lookback_days=40, k_target=5))
    by_day = ledger.pair_records.groupby("return_date")[["gross", "net", "fee"]].sum()
    merged = ledger.daily.set_index("date").loc[by_day.index]
    np.testing.assert_allclose(merged["gross"], by_day["gross"], atol=1e-12)
    np.testing.assert_allclose(merged["net"], by_day["net"], atol=1e-12)
    np.testing.assert_allclose(merged["fee"], by_day["fee"], atol=1e-12)


def test_backtest_gross_reconstructed_from_positions():
    panel = small_panel(seed=4)
    ledger = run_backtest(panel, BacktestConfig(lookback_days=40, k_target=5))
    # a pair's booked gross equals the position-weighted price relatives
    active = ledger.pair_records[ledger.pair_records["signal"] != 0]
    assert len(active) > 0
    row = active.iloc[len(active) // 2]
    t = int(np.searchsorted(panel.dates, row["signal_date"]))
    prices_t = {tk: panel.prices[t, panel.ticker_position(tk)] for tk in panel.tickers}
    prices_t1 = {tk: panel.prices[t + 1, panel.ticker_position(tk)] for tk in panel.tickers}
    window = np.log(np.column_stack((
        panel.column(row["ticker_i"])[t - 39 : t + 1],
        panel.column(row["ticker_j"])[t - 39 : t + 1],
    )))
    from pairmatch.pairstats import fit_log_prices

    fit = fit_log_prices(window[:, 0], window[:, 1])
    positions = signal_to_positions(int(row["signal"]), fit, row["ticker_i"], row["ticker_j"])
    assert pair_gross_return(positions, prices_t, prices_t1) == pytest.approx(
        row["gross"], abs=1e-12
    )


def test_backtest_fee_modes():
    panel = small_panel(seed=5)
    held = run_backtest(panel, BacktestConfig(lookback_days=40, k_target=5, fee_mode="held"))
    changed = run_backtest(panel, BacktestConfig(lookback_days=40, k_target=5, fee_mode="changed"))
    np.testing.assert_allclose(held.daily["gross"], changed.daily["gross"], atol=1e-15)
    fee_per_pair_day = 0.01 / 252
    # held mode charges exactly the pair-days with an open position
    active_days = int((held.pair_records["signal"] != 0).sum())
    assert held.daily["fee"].sum() == pytest.approx(active_days * fee_per_pair_day, rel=1e-9)
    # changed mode charges at least one pair-day per open/close round trip,
    # and never more pair-days than exist in the ledger
    charged_days = round(changed.daily["fee"].sum() / fee_per_pair_day)
    assert 0 < charged_days <= len(changed.pair_records)


def test_backtest_zero_fee():
    panel = small_panel(seed=6)
    ledger = run_backtest(panel, BacktestConfig(lookback_days=40, k_target=5, fee_annual=0.0))
    np.testing.assert_allclose(ledger.daily["net"], ledger.daily["gross"], atol=1e-15)


def test_backtest_deterministic():
    panel = small_panel(seed=7)
    config = BacktestConfig(lookback_days=40, k_target=5)
    a = run_backtest(panel, config)
    b = run_backtest(panel, config)
    assert a.daily.equals(b.daily)
    assert a.pair_records.equals(b.pair_records)


def test_backtest_force_flattens_on_missing_data():
    panel = small_panel(seed=8)
    # poison one ticker's prices late in the sample, after selections formed
    col = panel.ticker_position("S000")
    panel.prices[100:, col] = np.nan
    ledger = run_backtest(panel, BacktestConfig(lookback_days=40, k_target=5))
    hit = ledger.pair_records[
        (ledger.pair_records["ticker_i"] == "S000")
        & (ledger.pair_records["signal_date"] >= panel.dates[100])
    ]
    if len(hit):
        assert (hit["signal"] == 0).all()
        assert (hit["gross"] == 0.0).all()
        assert hit["raw_score"].isna().all()
    assert not ledger.daily["net"].isna().any()


def test_backtest_universe_restriction():
    panel = small_panel(seed=9)
    universe = ["S000", "S001", "S002"]
    ledger = run_backtest(panel, BacktestConfig(lookback_days=40, k_target=5), universe=universe)
    traded = set(ledger.pair_records["ticker_i"]) | set(ledger.pair_records["ticker_j"])
    assert traded <= set(universe)
