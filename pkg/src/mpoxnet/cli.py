"""Command-line entry point: ``mpoxnet {run,ensemble,sweep,bench,netstats,presets}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import PRESET_NAMES, load_config, preset
from .errors import ConfigurationError, InputError

log = logging.getLogger("mpoxnet")

EXIT_CONFIG = 2


def _ints(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("-c", "--config", type=Path, help="YAML scenario file")
    src.add_argument("-p", "--preset", help="named preset (see `mpoxnet presets`)")
    p.add_argument("-o", "--out", type=Path, required=True, help="output directory")
    p.add_argument("-s", "--seed", type=int, default=None, help="base seed (overrides config)")
    p.add_argument("-j", "--jobs", type=int, default=1, help="worker processes")
    p.add_argument("-n", "--n-nodes", type=int, default=None, help="population size (overrides config)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    ap = argparse.ArgumentParser(prog="mpoxnet", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="single replicate")
    _common(p)
    p.add_argument("--stream", type=int, default=0, help="replicate stream id")
    p.add_argument("--edges", action="store_true", help="also write the edge log")

    p = sub.add_parser("ensemble", help="replicate ensemble")
    _common(p)
    p.add_argument("-r", "--reps", type=int, default=None)
    p.add_argument("--first-stream", type=int, default=0)
    p.add_argument("--no-per-run", action="store_true", help="only write summaries")

    p = sub.add_parser("sweep", help="intervention timing/intensity grid")
    _common(p)
    p.add_argument("-r", "--reps", type=int, default=None)
    p.add_argument("--vax-starts", type=_ints, default=None)
    p.add_argument("--bc-starts", type=_ints, default=None)
    p.add_argument("--reductions", type=_floats, default=None)

    p = sub.add_parser("bench", help="runtime scaling benchmark")
    _common(p)
    p.add_argument("-r", "--reps", type=int, default=5)
    p.add_argument("--sizes", type=_ints, default=(5000, 10000, 20000, 40000, 80000))
    p.add_argument("--scenarios", default="baseline,targeted")
    p.add_argument("--backends", default=None, help="comma list of cython,python")
    p.add_argument("--horizon", type=int, default=250)

    p = sub.add_parser("netstats", help="cumulative-window network summaries")
    _common(p)
    p.add_argument("-r", "--reps", type=int, default=1)
    p.add_argument("--days", type=_ints, default=(28, 84))
    p.add_argument("--window", type=int, default=7)

    sub.add_parser("presets", help="list preset names")
    return ap


def _config(args):
    if args.config is not None:
        if not args.config.exists():
            raise ConfigurationError(f"config file not found: {args.config}")
        cfg = load_config(args.config)
    else:
        cfg = preset(args.preset or "baseline")
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.n_nodes is not None:
        over["n_nodes"] = args.n_nodes
    if args.jobs < 1:
        raise ConfigurationError("--jobs must be at least 1")
    return cfg.replace(**over).validate() if over else cfg


def _run(args, cfg):
    from .export import summary_row, write_manifest, write_run, write_table
    from .simulation import run_simulation

    result = run_simulation(cfg, args.stream, record_edges=args.edges or cfg.record_edges)
    out = args.out / cfg.name
    write_manifest(out, cfg, stream_ids=[args.stream, args.stream], n_runs=1)
    write_table(out / "runs.csv", [summary_row(result)])
    write_run(out, result)
    log.info("%s: final %.2f%%", cfg.name, result.final_percent)


def _ensemble(args, cfg):
    from .export import write_ensemble
    from .harness import run_replicates

    ens = run_replicates(cfg, args.reps, first_stream=args.first_stream, jobs=args.jobs)
    write_ensemble(args.out / cfg.name, ens, per_run=not args.no_per_run)
    s = ens.summary
    log.info("%s: mean %.2f%% [P25 %.2f, P75 %.2f] over %d runs",
             cfg.name, s.final_mean, s.final_p25, s.final_p75, s.n_runs)


def _sweep(args, cfg):
    from . import harness
    from .export import write_manifest, write_table

    rows = harness.sweep(cfg, vax_starts=args.vax_starts or harness.DEFAULT_VAX_STARTS,
                         bc_starts=args.bc_starts or harness.DEFAULT_BC_STARTS,
                         reductions=args.reductions or harness.DEFAULT_REDUCTIONS,
                         n_reps=args.reps, jobs=args.jobs)
    out = args.out / f"{cfg.name}_sweep"
    write_manifest(out, cfg, n_cells=len(rows))
    write_table(out / "heatmap.csv", ({"scenario": cfg.name, "seed": cfg.seed, **r} for r in rows))


def _bench(args, cfg):
    from .export import write_manifest, write_table
    from .harness import benchmark_scaling

    backends = args.backends.split(",") if args.backends else None
    scenarios = tuple(s for s in args.scenarios.split(",") if s)
    for s in scenarios:
        preset(s)
    rows, slopes = benchmark_scaling(args.sizes, args.reps, scenarios=scenarios,
                                     backends=backends, horizon=args.horizon)
    out = args.out / "bench"
    write_manifest(out, cfg, sizes=list(args.sizes), n_runs=args.reps)
    write_table(out / "runtimes.csv", rows)
    write_table(out / "slopes.csv", [dict(scenario=s, backend=b, loglog_slope=v)
                                     for (s, b), v in slopes.items()])
    for (s, b), v in slopes.items():
        log.info("%s/%s: log-log slope %.3f", s, b, v)


def _netstats(args, cfg):
    from .export import write_manifest, write_table
    from .harness import netstats

    rows = netstats(cfg, days=args.days, window=args.window, n_reps=args.reps, jobs=args.jobs)
    out = args.out / cfg.name
    write_manifest(out, cfg.replace(record_edges=True, stop_when_extinct=False), days=list(args.days))
    write_table(out / "netstats.csv", rows)


VERBS = {"run": _run, "ensemble": _ensemble, "sweep": _sweep, "bench": _bench, "netstats": _netstats}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.verb == "presets":
        print("\n".join(PRESET_NAMES))
        return 0
    try:
        cfg = _config(args)
        VERBS[args.verb](args, cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
