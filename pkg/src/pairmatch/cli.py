"""Command-line entry point: theory evaluation, synthetic data generation,
backtesting with reproducibility manifests, and theorem validation."""

import hashlib
import json
import sys
from pathlib import Path

import click
import numpy as np
import yaml

from . import analytics, backtest, market, moments, panel, selection, theory

STRATEGY_LABELS = {
    ("matching", "q"): "MQ",
    ("matching", "z"): "MZ",
    ("baseline", "q"): "BQ",
    ("baseline", "z"): "BZ",
}

T_SCAN = (21, 126, 252, 504)

CONFIG_DEFAULTS = {
    "prices_csv": None,
    "output_dir": "out",
    "method": "all",        # matching | baseline | all
    "signal": "all",        # z | q | all
    "k": 2.0,
    "lookback_days": 504,
    "fee_annual": 0.01,
    "fee_mode": "held",
    "k_target": 250,
    "universe": None,       # optional list of tickers
    "seed": 0,
}


@click.group()
def main():
    """Research engine for matching-based pairs trading."""


# ---------------------------------------------------------------------------
# theory
# ---------------------------------------------------------------------------


def theoretical_inputs(mu1, sigma1, sigma, k, t):
    """Single-pair moments used by the portfolio composition formulas."""
    pair = moments.PairModelParams(mu1=mu1, sigma1=sigma1, sigma=sigma, k=k)
    triple = moments.TripleModelParams(mu=(mu1,) * 3, sigma=(sigma1,) * 3, k=k, t=t)
    mu_c = moments.cointegrated_pair_mean(pair)
    nu1 = moments.cointegrated_pair_variance(pair)
    nu2 = moments.noncoint_pair_moments(triple).variance
    kappa1 = moments.cointegrated_shared_covariance(pair, pair)
    kappa2 = moments.noncoint_shared_covariance(triple)
    return mu_c, nu1, nu2, kappa1, kappa2


def theoretical_sharpes(mu1, sigma1, sigma, k, comps, t):
    """Annualized Sharpe per composition dict {label: PortfolioComposition}."""
    mu_c, nu1, nu2, kappa1, kappa2 = theoretical_inputs(mu1, sigma1, sigma, k, t)
    return {
        label: theory.portfolio_moments(comp, mu_c, nu1, nu2, kappa1, kappa2)
        for label, comp in comps.items()
    }


@main.command("theory")
@click.option("--mu1", default=0.0005, show_default=True, help="Daily log-price drift.")
@click.option("--sigma1", default=0.0180, show_default=True, help="Daily log-price noise std dev.")
@click.option("--sigma", default=0.0711, show_default=True, help="Cointegrated spread std dev.")
@click.option("--k", default=2.0, show_default=True, help="Trading threshold (spread std devs).")
@click.option("--n1", default=1, show_default=True, help="Cointegrated pair count.")
@click.option("--n2", default=249, show_default=True, help="Non-cointegrated pair count.")
@click.option("--m1", default=0, show_default=True, help="Shared-stock cointegrated pair-of-pairs.")
@click.option("--m2-baseline", default=1748, show_default=True,
              help="Shared-stock non-cointegrated pair-of-pairs (baseline).")
@click.option("--m2-matching", default=0, show_default=True,
              help="Shared-stock non-cointegrated pair-of-pairs (matching).")
@click.option("--t", "t_default", default=252, show_default=True,
              help="Elapsed-time parameter for non-cointegrated spreads.")
def theory_cmd(mu1, sigma1, sigma, k, n1, n2, m1, m2_baseline, m2_matching, t_default):
    """Evaluate theoretical portfolio Sharpe ratios for the baseline and
    matching compositions, with a sensitivity scan over the time parameter."""
    comps = {
        "baseline": theory.PortfolioComposition(n1=n1, n2=n2, m1=m1, m2=m2_baseline),
        "matching": theory.PortfolioComposition(n1=n1, n2=n2, m1=m1, m2=m2_matching),
    }
    rows = [
        ("Daily log-price change mean (mu1)", mu1),
        ("Daily log-price change std dev (sigma1)", sigma1),
        ("Spread std dev (sigma)", sigma),
        ("Trading threshold (k)", k),
        ("Cointegrated pairs (n1)", n1),
        ("Non-cointegrated pairs (n2)", n2),
        ("Shared cointegrated pair-of-pairs (m1)", m1),
        ("Shared non-cointegrated pair-of-pairs (m2)",
         f"baseline {m2_baseline} / matching {m2_matching}"),
    ]
    for label, value in rows:
        click.echo(f"{label:<48} {value}")
    results = theoretical_sharpes(mu1, sigma1, sigma, k, comps, t_default)
    click.echo("")
    for label in ("baseline", "matching"):
        m = results[label]
        click.echo(
            f"{label:<10} mean {m.mean:.6e}  variance {m.variance:.6e}  "
            f"annualized Sharpe {m.sharpe_annualized:.4f}"
        )
    click.echo("")
    click.echo("Sensitivity to the elapsed-time parameter t:")
    for t in T_SCAN:
        scan = theoretical_sharpes(mu1, sigma1, sigma, k, comps, t)
        click.echo(
            f"  t={t:<4d} baseline {scan['baseline'].sharpe_annualized:.4f}  "
            f"matching {scan['matching'].sharpe_annualized:.4f}"
        )


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


@main.command("generate")
@click.option("--stocks", required=True, type=int)
@click.option("--days", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--planted", multiple=True,
              help="Planted pair as ANCHOR,FOLLOWER,SIGMA; repeatable.")
@click.option("--allow-shared", is_flag=True, help="Permit ticker reuse across planted pairs.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def generate_cmd(stocks, days, seed, planted, allow_shared, out):
    """Generate a synthetic price panel and write it as CSV."""
    pairs = []
    for entry in planted:
        parts = entry.split(",")
        if len(parts) != 3:
            raise click.BadParameter(f"expected ANCHOR,FOLLOWER,SIGMA, got {entry!r}")
        pairs.append((parts[0], parts[1], float(parts[2])))
    spec = market.UniverseSpec(
        n_stocks=stocks, n_days=days, seed=seed,
        planted_pairs=tuple(pairs), allow_shared=allow_shared,
    )
    market.generate(spec).to_csv(out)
    click.echo(f"wrote {out}")


# ---------------------------------------------------------------------------
# backtest
# ---------------------------------------------------------------------------


def load_config(path) -> dict:
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise click.ClickException("config must be a flat key-value mapping")
    unknown = set(raw) - set(CONFIG_DEFAULTS)
    if unknown:
        raise click.ClickException(f"unknown config keys: {sorted(unknown)}")
    merged = dict(CONFIG_DEFAULTS)
    merged.update(raw)
    return merged


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _date_label(value) -> str:
    return str(value).replace("-", "")


def run_strategies(prices, cfg, out_dir: Path):
    """Run each requested strategy, write all artifacts, return output paths."""
    methods = ["matching", "baseline"] if cfg["method"] == "all" else [cfg["method"]]
    signals = ["q", "z"] if cfg["signal"] == "all" else [cfg["signal"]]
    outputs = []
    gross_by_label = {}
    for method in methods:
        for signal in signals:
            label = STRATEGY_LABELS[(method, signal)]
            config = backtest.BacktestConfig(
                selection_method=method,
                signal_kind=signal,
                k=cfg["k"],
                lookback_days=cfg["lookback_days"],
                fee_annual=cfg["fee_annual"],
                fee_mode=cfg["fee_mode"],
                k_target=cfg["k_target"],
            )
            ledger = backtest.run_backtest(prices, config, universe=cfg["universe"])
            pair_path = out_dir / f"{label}_pairs.csv"
            daily_path = out_dir / f"{label}_daily.csv"
            ledger.to_csv(pair_path, daily_path)
            outputs += [pair_path, daily_path]

            report = {
                "gross": analytics.performance(ledger.daily["gross"]).to_dict(),
                "net": analytics.performance(ledger.daily["net"]).to_dict(),
                "mean_turnover": float(analytics.turnover_series(ledger).mean()),
                "concentration": analytics.concentration_series(ledger.selections),
                "retention": [
                    analytics.retention(a, b)
                    for a, b in zip(ledger.selections, ledger.selections[1:])
                ],
            }
            report_path = out_dir / f"{label}_report.json"
            report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
            outputs.append(report_path)

            for sel in ledger.selections:
                dot_path = out_dir / f"{label}_selection_{_date_label(sel.as_of)}.dot"
                dot_path.write_text(selection.emit_portfolio_graph(sel, "DOT"))
                outputs.append(dot_path)
            gross_by_label[label] = ledger.daily["gross"].to_numpy()

    if len(gross_by_label) > 1:
        corr = analytics.strategy_correlation(gross_by_label)
        corr_path = out_dir / "correlation.csv"
        corr.to_csv(corr_path, float_format="%.6f")
        outputs.append(corr_path)
    return outputs


@main.command("backtest")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_override", type=click.Path(file_okay=False), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--method", type=click.Choice(["matching", "baseline", "all"]), default=None)
@click.option("--signal", type=click.Choice(["z", "q", "all"]), default=None)
@click.option("--k", type=float, default=None)
@click.option("--lookback", type=int, default=None)
@click.option("--fee", type=float, default=None)
@click.option("--pairs-target", type=int, default=None)
def backtest_cmd(config_path, out_override, seed, method, signal, k, lookback, fee, pairs_target):
    """Run the backtest described by a config file; flags override config keys."""
    cfg = load_config(config_path)
    overrides = {
        "output_dir": out_override, "seed": seed, "method": method, "signal": signal,
        "k": k, "lookback_days": lookback, "fee_annual": fee, "k_target": pairs_target,
    }
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    if not cfg["prices_csv"]:
        raise click.ClickException("config key prices_csv is required")

    try:
        prices = panel.ingest_csv(cfg["prices_csv"])
        if prices.n_days < cfg["lookback_days"] + 2:
            raise ValueError(
                f"panel has {prices.n_days} days, lookback {cfg['lookback_days']} "
                "leaves no trading days"
            )
        out_dir = Path(cfg["output_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        outputs = run_strategies(prices, cfg, out_dir)
    except (ValueError, panel.CsvFormatError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc

    manifest = {
        "config": cfg,
        "outputs": {p.name: _sha256(p) for p in sorted(outputs)},
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    click.echo(f"wrote {len(outputs) + 1} files to {out_dir}")


# ---------------------------------------------------------------------------
# validate-theorems
# ---------------------------------------------------------------------------


def _random_param_sets(rng, count):
    sets = []
    for _ in range(count):
        mu1 = rng.uniform(-0.001, 0.001)
        sigma1 = rng.uniform(0.005, 0.03)
        sigma = rng.uniform(0.02, 0.12)
        k = rng.uniform(1.0, 2.5)
        sets.append((mu1, sigma1, sigma, k))
    return sets


def theorem_validation_rows(seed: int, n_paths: int, n_sets: int = 3):
    """Closed-form vs Monte Carlo rows: (name, closed, mc, se, z, ok)."""
    rng = np.random.default_rng(seed)
    param_sets = [(0.0005, 0.0180, 0.0711, 2.0)] + _random_param_sets(rng, n_sets)
    rows = []
    sub_seeds = np.random.SeedSequence(seed).generate_state(4 * len(param_sets))
    for s_idx, (mu1, sigma1, sigma, k) in enumerate(param_sets):
        pair = moments.PairModelParams(mu1=mu1, sigma1=sigma1, sigma=sigma, k=k)
        triple = moments.TripleModelParams(mu=(mu1,) * 3, sigma=(sigma1,) * 3, k=k, t=252)
        tag = f"set{s_idx}"
        seeds = sub_seeds[4 * s_idx : 4 * s_idx + 4]

        est = moments.mc_pair_moments(pair, "cointegrated", n_paths, int(seeds[0]))
        for name, closed, mc, se in [
            (f"{tag} coint mean", moments.cointegrated_pair_mean(pair), est.mean, est.mean_se),
            (f"{tag} coint var", moments.cointegrated_pair_variance(pair), est.variance, est.variance_se),
        ]:
            z = (mc - closed) / se
            rows.append((name, closed, mc, se, z, abs(z) <= 3))

        est = moments.mc_pair_moments((pair, pair), "shared-cointegrated", n_paths, int(seeds[1]))
        closed = moments.cointegrated_shared_covariance(pair, pair)
        z = (est.covariance - closed) / est.covariance_se
        rows.append((f"{tag} coint shared cov", closed, est.covariance, est.covariance_se, z, abs(z) <= 3))

        est = moments.mc_pair_moments(triple, "non-cointegrated", n_paths, int(seeds[2]))
        pm = moments.noncoint_pair_moments(triple)
        z = (est.mean - pm.mean) / est.mean_se
        rows.append((f"{tag} noncoint mean", pm.mean, est.mean, est.mean_se, z, abs(z) <= 3))
        z = (est.variance - pm.variance) / est.variance_se
        rows.append((f"{tag} noncoint var", pm.variance, est.variance, est.variance_se, z, abs(z) <= 3))

        est = moments.mc_pair_moments(triple, "shared-noncointegrated", n_paths, int(seeds[3]))
        closed = moments.noncoint_shared_covariance(triple)
        z = (est.covariance - closed) / est.covariance_se
        rows.append((f"{tag} noncoint shared cov", closed, est.covariance, est.covariance_se, z, abs(z) <= 3))
    return rows


@main.command("validate-theorems")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--paths", default=1_000_000, show_default=True, type=int)
@click.option("--sets", default=3, show_default=True, type=int,
              help="Number of random parameter sets beyond the reference set.")
def validate_cmd(seed, paths, sets):
    """Check every closed-form moment against its Monte Carlo oracle."""
    rows = theorem_validation_rows(seed, paths, sets)
    failed = 0
    click.echo(f"{'quantity':<28} {'closed':>13} {'monte-carlo':>13} {'se':>10} {'z':>7}  result")
    for name, closed, mc, se, z, ok in rows:
        failed += not ok
        click.echo(f"{name:<28} {closed:>13.6e} {mc:>13.6e} {se:>10.3e} {z:>7.2f}  "
                   + ("pass" if ok else "FAIL"))
    click.echo(f"{len(rows) - failed}/{len(rows)} passed")
    if failed:
        sys.exit(1)


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------


@main.group("config")
def config_group():
    """Configuration helpers."""


@config_group.command("show-defaults")
def show_defaults():
    """Print every config key with its default value."""
    click.echo(yaml.safe_dump(CONFIG_DEFAULTS, default_flow_style=False, sort_keys=True), nl=False)


if __name__ == "__main__":
    main()
