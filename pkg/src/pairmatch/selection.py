"""Pairs-graph construction and portfolio selection.

Builds the weighted graph of candidate pairs (weight = negative ADF
t-statistic) and selects a trading portfolio either by maximum-weight matching
(no two selected pairs share a stock) or by the baseline top-k p-value rule.
"""

from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from .pairstats import AdfResult, RegressionFit, adf_single_lag, fit_pair

__all__ = [
    "PairEdge",
    "PairsGraph",
    "PortfolioSelection",
    "build_pairs_graph",
    "max_weight_matching",
    "baseline_topk",
    "selection_concentration",
    "emit_portfolio_graph",
]

DEFAULT_K_TARGET = 250


@dataclass(frozen=True)
class PairEdge:
    i: str
    j: str
    weight: float
    adf: AdfResult
    fit: RegressionFit

    @property
    def key(self) -> tuple:
        return (self.i, self.j)


@dataclass(frozen=True)
class PairsGraph:
    nodes: tuple
    edges: tuple

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            if e.i == e.j:
                raise ValueError(f"self-loop on {e.i!r}")
            if e.i > e.j:
                raise ValueError(f"edge ({e.i}, {e.j}) not in canonical order")
            if e.key in seen:
                raise ValueError(f"duplicate edge {e.key!r}")
            seen.add(e.key)


@dataclass(frozen=True)
class PortfolioSelection:
    method: str
    pairs: tuple
    as_of: object = None

    def pair_keys(self) -> set:
        return {e.key for e in self.pairs}


def build_pairs_graph(panel, window: tuple, universe=None) -> PairsGraph:
    """One edge per unordered pair with complete window data, carrying the
    regression fit and ADF result; deterministic lexicographic ordering."""
    tickers = sorted(universe) if universe is not None else list(panel.tickers)
    unknown = set(tickers) - set(panel.tickers)
    if unknown:
        raise ValueError(f"universe tickers not in panel: {sorted(unknown)}")
    start, stop = window
    eligible = [t for t in tickers if panel.complete_in_window(t, start, stop)]
    if len(eligible) < 2:
        raise ValueError("fewer than two tickers have complete data in the window")

    edges = []
    for i, j in combinations(eligible, 2):
        fit = fit_pair(panel, i, j, window)
        adf = adf_single_lag(fit.residuals)
        edges.append(PairEdge(i=i, j=j, weight=-adf.t_stat, adf=adf, fit=fit))
    return PairsGraph(nodes=tuple(eligible), edges=tuple(edges))


def max_weight_matching(graph: PairsGraph, as_of=None) -> PortfolioSelection:
    """Maximum-weight matching over the positive-weight edges.

    Edges with weight <= 0 can never be part of a maximum-weight matching and
    are pruned first.  Ties between optimal matchings are broken by the
    deterministic (sorted) edge insertion order of the solver.
    """
    positive = [e for e in graph.edges if e.weight > 0]
    g = nx.Graph()
    for e in sorted(positive, key=lambda e: e.key):
        g.add_edge(e.i, e.j, weight=e.weight)
    mate = nx.max_weight_matching(g, maxcardinality=False)
    chosen = {(min(a, b), max(a, b)) for a, b in mate}
    by_key = {e.key: e for e in positive}
    pairs = tuple(by_key[k] for k in sorted(chosen))
    return PortfolioSelection(method="matching", pairs=pairs, as_of=as_of)


def baseline_topk(graph: PairsGraph, k_target: int = DEFAULT_K_TARGET, as_of=None) -> PortfolioSelection:
    """Top k_target pairs by ascending p-value, ties broken lexicographically."""
    if k_target < 1:
        raise ValueError(f"k_target must be >= 1, got {k_target}")
    ranked = sorted(graph.edges, key=lambda e: (e.adf.p_value, e.key))
    return PortfolioSelection(method="baseline", pairs=tuple(ranked[:k_target]), as_of=as_of)


def selection_concentration(sel: PortfolioSelection) -> int:
    """Maximum number of selected pairs containing any single stock."""
    degree: dict = {}
    for e in sel.pairs:
        degree[e.i] = degree.get(e.i, 0) + 1
        degree[e.j] = degree.get(e.j, 0) + 1
    return max(degree.values(), default=0)


def emit_portfolio_graph(sel: PortfolioSelection, format: str = "edge-list") -> str:
    """Deterministic text serialization of the selected portfolio graph."""
    edges = sorted(sel.pairs, key=lambda e: e.key)
    if format == "edge-list":
        lines = [f"{e.i},{e.j},{e.weight:.12g},{e.adf.p_value:.12g}" for e in edges]
        return "\n".join(lines) + ("\n" if lines else "")
    if format == "DOT":
        nodes = sorted({n for e in edges for n in (e.i, e.j)})
        lines = ["graph portfolio {"]
        lines += [f'  "{n}";' for n in nodes]
        lines += [f'  "{e.i}" -- "{e.j}" [weight={e.weight:.6g}];' for e in edges]
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {format!r}")
