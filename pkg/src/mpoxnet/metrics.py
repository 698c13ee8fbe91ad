"""Run outputs and every reported quantity derived from them."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .network import CASUAL, KIND_NAMES, MAIN, ONETIME

KINDS = {"main": MAIN, "casual": CASUAL, "onetime": ONETIME, "all": None, None: None}
RT_WINDOW = 7


@dataclass
class RunResult:
    scenario: str
    seed: int
    stream_id: int
    n_nodes: int
    horizon: int
    counts: np.ndarray  # (horizon + 1, 4) S, E, I, R for days 0..horizon
    cumulative: np.ndarray  # (horizon + 1,) ever infected, seeds included
    records: np.ndarray  # (n, 4) source, target, day, kind
    seeds: np.ndarray
    infectious_start: np.ndarray
    infectious_end: np.ndarray
    contacts: np.ndarray  # (N, 3) realised serodiscordant contacts by kind
    rel_class: np.ndarray
    stratum: np.ndarray
    rewiring: dict
    doses: dict
    stop_day: int | None
    runtime: float
    edge_log: object = None
    extra: dict = field(default_factory=dict)

    @property
    def final_percent(self) -> float:
        return 100.0 * self.cumulative[-1] / self.n_nodes

    @property
    def cumulative_percent(self) -> np.ndarray:
        return 100.0 * self.cumulative / self.n_nodes


def _kind_code(kind):
    try:
        return KINDS[kind]
    except KeyError:
        if kind in (MAIN, CASUAL, ONETIME):
            return kind
        raise ValueError(f"unknown edge kind {kind!r}") from None


def secondary_counts(records, n_nodes, kind=None) -> np.ndarray:
    """Lifetime number of infections caused by each node (optionally one kind)."""
    src = records[:, 0]
    m = src >= 0
    code = _kind_code(kind)
    if code is not None:
        m &= records[:, 3] == code
    return np.bincount(src[m], minlength=n_nodes)


def infectious_in_window(result: RunResult, t) -> np.ndarray:
    """Nodes infectious at any point of ``[t - 7, t)``; the seed set when ``t == 0``."""
    if t == 0:
        return np.asarray(result.seeds)
    start = result.infectious_start
    end = np.where(result.infectious_end < 0, np.iinfo(np.int64).max, result.infectious_end)
    return np.flatnonzero((start >= 0) & (start < t) & (end > t - RT_WINDOW))


def effective_R(result: RunResult, t, kind=None) -> float:
    """Mean lifetime secondary infections of the nodes infectious in the week before ``t``.

    Each such node's whole secondary count is credited, including infections
    made after ``t``.  Returns NaN when nobody was infectious.
    """
    nodes = infectious_in_window(result, t)
    if nodes.size == 0:
        return float("nan")
    sec = secondary_counts(result.records, result.n_nodes, kind)
    return float(sec[nodes].mean())


def attribution_proportions(records, t) -> dict:
    """Share of non-seed infections up to day ``t`` by edge kind."""
    m = (records[:, 0] >= 0) & (records[:, 2] <= t)
    k = records[m, 3]
    if k.size == 0:
        return {name: float("nan") for name in KIND_NAMES}
    counts = np.bincount(k, minlength=3)
    return {name: counts[i] / k.size for i, name in enumerate(KIND_NAMES)}


def at_risk_contact_matrix(result: RunResult, kind=None) -> np.ndarray:
    """Mean realised serodiscordant contacts per node, rows rel_class 0..5, columns stratum 1..6."""
    c = result.contacts.sum(axis=1) if _kind_code(kind) is None else result.contacts[:, _kind_code(kind)]
    idx = result.rel_class * 6 + (result.stratum - 1)
    tot = np.bincount(idx, weights=c, minlength=36)
    num = np.bincount(idx, minlength=36)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(num > 0, tot / np.maximum(num, 1), np.nan)
    return out.reshape(6, 6)


def network_summaries(graph) -> dict:
    """Transitivity, mean clustering (degree < 2 counts as 0), LCC fraction, mean and max degree."""
    import networkx as nx

    n = graph.number_of_nodes()
    if n == 0 or graph.number_of_edges() == 0:
        return dict(transitivity=0.0, clustering=0.0, lcc_fraction=0.0, mean_degree=0.0, max_degree=0)
    degrees = [d for _, d in graph.degree()]
    lcc = max(len(c) for c in nx.connected_components(graph))
    return dict(
        transitivity=float(nx.transitivity(graph)),
        clustering=float(nx.average_clustering(graph)),
        lcc_fraction=lcc / n,
        mean_degree=float(np.mean(degrees)),
        max_degree=int(max(degrees)),
    )


def rewiring_delay_percent(result: RunResult, kind="main") -> float:
    k = _kind_code(kind)
    e = result.rewiring["entries"][k]
    return 100.0 * result.rewiring["delayed"][k] / e if e else float("nan")


@dataclass
class EnsembleSummary:
    n_runs: int
    days: np.ndarray
    mean_percent: np.ndarray
    p25_percent: np.ndarray
    p75_percent: np.ndarray
    final_percent: np.ndarray  # one value per run, in input order
    final_mean: float
    final_p25: float
    final_p75: float
    final_median: float
    rt_days: tuple
    rt: dict  # (kind, day) -> (median, p25, p75) over per-run values
    rt_runs: dict  # (kind, day) -> per-run values

    def rows(self):
        """Per-day series rows for delimited export."""
        for i, d in enumerate(self.days):
            yield dict(day=int(d), mean_percent=self.mean_percent[i],
                       p25_percent=self.p25_percent[i], p75_percent=self.p75_percent[i])


def ensemble_summary(results, rt_days=None) -> EnsembleSummary:
    """Point-wise mean and quartiles over replicate runs.

    R_t medians are taken over per-run means (runs where R_t is undefined are
    skipped).
    """
    results = list(results)
    if not results:
        raise InputError("ensemble needs at least one run")
    horizons = {r.horizon for r in results}
    if len(horizons) != 1:
        raise InputError(f"mixed horizons in ensemble: {sorted(horizons)}")
    horizon = horizons.pop()
    if rt_days is None:
        rt_days = tuple(range(0, horizon + 1, 7))
    curves = np.vstack([r.cumulative_percent for r in results])
    final = curves[:, -1].copy()
    rt, rt_runs = {}, {}
    for kind in ("all", "main", "casual", "onetime"):
        for d in rt_days:
            vals = np.array([effective_R(r, d, kind) for r in results])
            rt_runs[(kind, d)] = vals
            ok = vals[~np.isnan(vals)]
            if ok.size:
                rt[(kind, d)] = (float(np.median(ok)), float(np.percentile(ok, 25)), float(np.percentile(ok, 75)))
            else:
                rt[(kind, d)] = (float("nan"),) * 3
    return EnsembleSummary(
        n_runs=len(results),
        days=np.arange(horizon + 1),
        mean_percent=curves.mean(axis=0),
        p25_percent=np.percentile(curves, 25, axis=0),
        p75_percent=np.percentile(curves, 75, axis=0),
        final_percent=final,
        final_mean=float(final.mean()),
        final_p25=float(np.percentile(final, 25)),
        final_p75=float(np.percentile(final, 75)),
        final_median=float(np.median(final)),
        rt_days=tuple(rt_days),
        rt=rt,
        rt_runs=rt_runs,
    )
