"""Matching-based pairs trading research engine."""

from .analytics import PerformanceReport, performance, retention, strategy_correlation, turnover
from .backtest import BacktestConfig, DailyLedger, run_backtest
from .market import UniverseSpec, generate
from .moments import (
    PairModelParams,
    PairMoments,
    TripleModelParams,
    cointegrated_pair_mean,
    cointegrated_pair_variance,
    cointegrated_shared_covariance,
    mc_pair_moments,
    noncoint_pair_moments,
    noncoint_shared_covariance,
)
from .normals import bivariate_orthant, std_normal_cdf
from .panel import PricePanel, ingest_csv
from .pairstats import AdfResult, RegressionFit, adf_single_lag, fit_pair, qscore, zscore
from .selection import (
    PairsGraph,
    PortfolioSelection,
    baseline_topk,
    build_pairs_graph,
    max_weight_matching,
    selection_concentration,
)
from .theory import (
    PortfolioComposition,
    count_shared_pairs,
    er_expected_shared_pairs,
    portfolio_moments,
)

__version__ = "0.1.0"
