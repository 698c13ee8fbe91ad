"""Delimited-text output: per-run tables, ensemble summaries and the scenario manifest.

Every table is comma-separated with a header row and keyed by scenario and
seed.  Nothing time-dependent is written, so ``(config, seed)`` fixes every
byte of a scenario directory.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig, dump_config
from .errors import InputError
from .metrics import (RunResult, at_risk_contact_matrix, attribution_proportions, effective_R,
                      rewiring_delay_percent)
from .network import KIND_NAMES

SEED_KIND = "seed"


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return "nan" if math.isnan(x) else repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return x


def write_table(path, rows, header=None):
    """Write dict rows (or sequences with an explicit ``header``)."""
    rows = list(rows)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if header is None:
        if not rows:
            raise ValueError(f"{path}: cannot infer a header from zero rows")
        header = list(rows[0])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            vals = [row[h] for h in header] if isinstance(row, dict) else row
            w.writerow([_fmt(v) for v in vals])
    return path


def read_table(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_manifest(outdir, cfg: ScenarioConfig, **extra):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = dict(scenario=cfg.name, config_hash=cfg.digest(), seed=cfg.seed,
                    code_version=__version__, clustering_low_degree="zero", **extra)
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    dump_config(cfg, outdir / "config.yaml")
    return manifest


def _key(result: RunResult):
    return dict(scenario=result.scenario, seed=result.seed, stream_id=result.stream_id)


def daily_rows(result: RunResult):
    key = _key(result)
    for d, (c, cum) in enumerate(zip(result.counts, result.cumulative)):
        yield dict(key, day=d, S=c[0], E=c[1], I=c[2], R=c[3], cumulative=cum)


def infection_rows(result: RunResult):
    key = _key(result)
    for src, tgt, day, kind in result.records:
        yield dict(key, source=src, target=tgt, day=day,
                   kind=SEED_KIND if kind < 0 else KIND_NAMES[kind])


def read_infections(path) -> np.ndarray:
    """Parse an infections table back into ``(source, target, day, kind)`` rows."""
    codes = {name: i for i, name in enumerate(KIND_NAMES)}
    codes[SEED_KIND] = -1
    out = []
    for row in read_table(path):
        try:
            out.append((int(row["source"]), int(row["target"]), int(row["day"]), codes[row["kind"]]))
        except (KeyError, ValueError) as exc:
            raise InputError(f"{path}: bad infection row {row}") from exc
    return np.array(out, dtype=np.int64).reshape(-1, 4)


def rt_rows(result: RunResult, days):
    key = _key(result)
    for d in days:
        yield dict(key, day=d, **{k: effective_R(result, d, k) for k in ("all", *KIND_NAMES)})


def attribution_rows(result: RunResult, days):
    key = _key(result)
    for d in days:
        yield dict(key, day=d, **attribution_proportions(result.records, d))


def contact_rows(result: RunResult):
    key = _key(result)
    mats = {k: at_risk_contact_matrix(result, k) for k in ("all", *KIND_NAMES)}
    for rc in range(6):
        for st in range(6):
            yield dict(key, rel_class=rc, stratum=st + 1, **{k: m[rc, st] for k, m in mats.items()})


def edge_rows(result: RunResult):
    log = result.edge_log
    if log is None:
        return
    key = _key(result)
    for u, v, k, f, d in log.persistent_table():
        yield dict(key, u=u, v=v, kind=KIND_NAMES[k], formed=f, dissolved=d)
    for u, v, day in log.onetime_table():
        yield dict(key, u=u, v=v, kind=KIND_NAMES[2], formed=day, dissolved=day + 1)


def summary_row(result: RunResult):
    return dict(_key(result), final_percent=result.final_percent,
                stop_day=-1 if result.stop_day is None else result.stop_day,
                delayed_main_percent=rewiring_delay_percent(result, "main"),
                delayed_casual_percent=rewiring_delay_percent(result, "casual"),
                dose1=result.doses["dose1"], dose2=result.doses["dose2"])


def write_run(outdir, result: RunResult, rt_days=None):
    """Per-replicate tables under ``outdir/run_<stream>``."""
    rdir = Path(outdir) / f"run_{result.stream_id:04d}"
    rt_days = tuple(range(0, result.horizon + 1, 7)) if rt_days is None else rt_days
    write_table(rdir / "daily.csv", daily_rows(result))
    write_table(rdir / "infections.csv", infection_rows(result),
                header=["scenario", "seed", "stream_id", "source", "target", "day", "kind"])
    write_table(rdir / "rt.csv", rt_rows(result, rt_days))
    write_table(rdir / "attribution.csv", attribution_rows(result, range(result.horizon + 1)))
    write_table(rdir / "contacts.csv", contact_rows(result))
    if result.edge_log is not None:
        write_table(rdir / "edges.csv", edge_rows(result),
                    header=["scenario", "seed", "stream_id", "u", "v", "kind", "formed", "dissolved"])
    return rdir


def write_ensemble(outdir, ensemble, per_run=True):
    """Scenario directory: manifest, config echo, per-run tables and the summary."""
    outdir = Path(outdir)
    cfg = ensemble.config
    write_manifest(outdir, cfg, stream_ids=[ensemble.stream_ids[0], ensemble.stream_ids[-1]],
                   n_runs=len(ensemble.stream_ids))
    s = ensemble.summary
    base = dict(scenario=cfg.name, seed=cfg.seed)
    write_table(outdir / "summary_daily.csv", (dict(base, **r) for r in s.rows()))
    write_table(outdir / "summary_final.csv", [dict(base, n_runs=s.n_runs, mean=s.final_mean,
                                                    median=s.final_median, p25=s.final_p25,
                                                    p75=s.final_p75)])
    write_table(outdir / "summary_rt.csv",
                (dict(base, kind=k, day=d, median=v[0], p25=v[1], p75=v[2])
                 for (k, d), v in sorted(s.rt.items(), key=lambda kv: (kv[0][1], kv[0][0]))))
    if ensemble.runs is not None:
        write_table(outdir / "runs.csv", (summary_row(r) for r in ensemble.runs))
        if per_run:
            for r in ensemble.runs:
                write_run(outdir, r, rt_days=s.rt_days)
    return outdir
