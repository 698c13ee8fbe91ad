"""Replicate ensembles, intervention sweeps and the runtime-scaling benchmark."""
from __future__ import annotations

import dataclasses
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import TARGET_STRATA, ScenarioConfig, preset
from .errors import ConfigurationError
from .interventions import BehaviorChangePolicy, VaccinationPolicy
from .metrics import EnsembleSummary, ensemble_summary
from .simulation import run_simulation

DEFAULT_VAX_STARTS = (-30, -20, -10, 0, 10, 20, 30)
DEFAULT_BC_STARTS = (30, 50, 70, 90, 110)
DEFAULT_REDUCTIONS = (0.75, 0.5, 0.25)


@dataclass
class Ensemble:
    config: ScenarioConfig
    stream_ids: tuple
    summary: EnsembleSummary
    runs: list | None


def _one(args):
    cfg, stream_id, kw = args
    return run_simulation(cfg, stream_id, **kw)


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def run_replicates(cfg: ScenarioConfig, n_reps=None, first_stream=0, jobs=1, keep_runs=True,
                   rt_days=None, **run_kw) -> Ensemble:
    """Run stream ids ``first_stream .. first_stream + n_reps - 1``.

    Output is independent of ``jobs``: every replicate owns its stream and
    aggregation happens after all runs finish, in stream order.
    """
    cfg.validate()
    n_reps = cfg.replicates if n_reps is None else n_reps
    if n_reps < 1:
        raise ConfigurationError("n_reps must be at least 1")
    streams = tuple(range(first_stream, first_stream + n_reps))
    runs = _map(_one, [(cfg, s, run_kw) for s in streams], jobs)
    summary = ensemble_summary(runs, rt_days=rt_days)
    return Ensemble(cfg, streams, summary, runs if keep_runs else None)


def sweep_config(base: ScenarioConfig, vax_start, bc_start, reduction) -> ScenarioConfig:
    """``base`` with vaccination and behaviour change re-timed for one grid cell.

    A base without a policy gets the strata-5/6 targeted default.
    """
    vax = base.vaccination or VaccinationPolicy(targeting=list(TARGET_STRATA))
    bc = base.behavior_change or BehaviorChangePolicy(targeting=list(TARGET_STRATA))
    vax = dataclasses.replace(vax, start_day=int(vax_start))
    bc = dataclasses.replace(bc, start_day=int(bc_start), reduction=float(reduction))
    name = f"{base.name}@vax{vax_start}_bc{bc_start}_r{reduction:g}"
    return base.replace(name=name, vaccination=vax, behavior_change=bc)


def sweep(base: ScenarioConfig | None = None, vax_starts=DEFAULT_VAX_STARTS, bc_starts=DEFAULT_BC_STARTS,
          reductions=DEFAULT_REDUCTIONS, n_reps=None, first_stream=0, jobs=1):
    """Final-size table over the vax-start x bc-start x reduction grid.

    Rows come back in declared grid order (vaccination start outermost, then
    reduction, then behaviour-change start).  Every cell reuses the same
    stream ids so cells differ only through the interventions.
    """
    base = base or preset("targeted")
    if not (len(vax_starts) and len(bc_starts) and len(reductions)):
        raise ConfigurationError("sweep grid must be non-empty on every axis")
    n_reps = base.replicates if n_reps is None else n_reps
    cells = list(itertools.product(vax_starts, reductions, bc_starts))
    cfgs = [sweep_config(base, v, b, r) for v, r, b in cells]
    items = [(c, s, {}) for c in cfgs for s in range(first_stream, first_stream + n_reps)]
    finals = np.array([r.final_percent for r in _map(_one, items, jobs)]).reshape(len(cells), n_reps)
    rows = []
    for (v, r, b), f in zip(cells, finals):
        rows.append(dict(vax_start=v, bc_reduction=r, bc_start=b, n_runs=n_reps,
                         final_mean=float(f.mean()), final_p25=float(np.percentile(f, 25)),
                         final_p75=float(np.percentile(f, 75))))
    return rows


def loglog_slope(sizes, runtimes) -> float:
    if len(set(sizes)) < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(sizes), np.log(runtimes), 1)
    return float(slope)


def benchmark_scaling(sizes, n_reps=5, scenarios=("baseline", "targeted"), backends=None, horizon=250):
    """Wall-clock seconds per run at each population size.

    Returns ``(rows, slopes)`` where ``slopes[(scenario, backend)]`` is the
    fitted log-log slope of runtime against N (NaN with fewer than two sizes).
    Disease extinction does not stop the network so that each run does the
    same amount of work.
    """
    from . import kernels

    backends = tuple(backends) if backends else (kernels.BACKEND,)
    rows, slopes = [], {}
    for scen in scenarios:
        for be in backends:
            means = []
            for n in sizes:
                cfg = preset(scen, n_nodes=int(n), horizon=horizon, stop_when_extinct=False)
                times = []
                for s in range(n_reps):
                    t0 = time.perf_counter()
                    run_simulation(cfg, s, kernel_backend=be)
                    times.append(time.perf_counter() - t0)
                means.append(float(np.mean(times)))
                rows.append(dict(scenario=scen, backend=be, n_nodes=int(n), n_runs=n_reps,
                                 mean_seconds=means[-1], min_seconds=float(min(times))))
            slopes[(scen, be)] = loglog_slope(list(sizes), means)
    return rows, slopes


def netstats(cfg: ScenarioConfig, days=(28, 84), window=7, n_reps=1, first_stream=0, jobs=1):
    """Cumulative-window network summaries at each day in ``days``.

    The window covering day ``d`` is ``[d - window + 1, d]``.
    """
    from .metrics import network_summaries
    from .network import cumulative_window_graph

    cfg = cfg.replace(record_edges=True, stop_when_extinct=False,
                      horizon=max(cfg.horizon, max(days)))
    runs = _map(_one, [(cfg, s, {}) for s in range(first_stream, first_stream + n_reps)], jobs)
    rows = []
    for run in runs:
        for d in days:
            g = cumulative_window_graph(run.edge_log, max(0, d - window + 1), d, cfg.n_nodes)
            rows.append(dict(scenario=cfg.name, seed=cfg.seed, stream_id=run.stream_id, day=d,
                             **network_summaries(g)))
    return rows


def is_close_runtime(a, b, rel=0.25) -> bool:
    return math.isclose(a, b, rel_tol=rel)
