"""Command line interface.

Subcommands: fetch, stats, centrality, simulate, evaluate, aggregate, report
and run (the full chain). File-based experiment configs are merged with CLI
flags, flags winning.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import centrality as ct
from .datasets import REGISTRY, data_dir, fetch_dataset, resolve_dataset
from .epidemic import config_from_lambda_ratio, influence_curves
from .errors import SpreadbenchError
from .evaluation import GRID_CSV_HEADER, aggregate_csv_rows, aggregate_datasets, \
    AGGREGATE_CSV_HEADER, evaluate_metrics, grid_csv_rows
from .graphs import STATS_CSV_HEADER, degree_stats, load_graph, stats_csv_row
from .pipeline import (build_spec, dataset_name, parse_config_file,
                       parse_grid_csv, parse_times, run_experiment,
                       set_worker_count)
from .report import render_heatmap


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", action="append", default=None,
                        help="dataset name or edge-list path (repeatable)")
    parser.add_argument("--out", default=None, help="output directory or file")


def _cmd_fetch(args) -> int:
    dest_dir = Path(args.out) if args.out else data_dir()
    targets = []
    if args.url:
        targets.append((args.url, dest_dir / (args.dest or Path(args.url).name)))
    for name in args.dataset or []:
        entry = REGISTRY.get(name)
        if entry is None:
            raise SpreadbenchError(f"unknown dataset {name!r}")
        if entry.url is None:
            raise SpreadbenchError(f"dataset {name!r} is local-file-only")
        targets.append((entry.url, dest_dir / entry.filename))
    if not targets:
        raise SpreadbenchError("nothing to fetch: give --dataset or --url")
    for url, dest in targets:
        path = fetch_dataset(url, dest)
        print(f"fetched {url} -> {path}")
    return 0


def _cmd_stats(args) -> int:
    lines = [STATS_CSV_HEADER]
    for name in args.dataset or []:
        g = load_graph(resolve_dataset(name))
        lines.append(stats_csv_row(dataset_name(name), g, degree_stats(g)))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_centrality(args) -> int:
    from .pipeline import scores_csv_lines

    metrics = tuple(args.metrics.split(",")) if args.metrics else ct.METRICS
    for name in args.dataset or []:
        g = load_graph(resolve_dataset(name))
        scores = ct.compute_all(g, dsc_t=args.dsc_t)
        scores = {m: scores[m] for m in metrics}
        text = "\n".join(scores_csv_lines(g, scores)) + "\n"
        out = Path(args.out or ".") / f"{dataset_name(name)}_scores.csv"
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(f"wrote {out}")
    return 0


def _sim_products(args, name):
    g = load_graph(resolve_dataset(name))
    stats = degree_stats(g)
    times = parse_times(args.times)
    results = []
    for ratio in (float(x) for x in args.lambda_ratios.split(",")):
        config = config_from_lambda_ratio(stats, ratio, runs=args.runs,
                                          horizon=max(times),
                                          master_seed=args.seed)
        results.append((ratio, influence_curves(g, None, config)))
    return g, stats, times, results


def _cmd_simulate(args) -> int:
    set_worker_count(args.workers)
    for name in args.dataset or []:
        g, _, times, results = _sim_products(args, name)
        out_dir = Path(args.out or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        for ratio, res in results:
            path = out_dir / f"{dataset_name(name)}_lambda{ratio:g}.npz"
            res.save(path)
            print(f"wrote {path} (fingerprint {res.fingerprint[:12]})")
    return 0


def _cmd_evaluate(args) -> int:
    set_worker_count(args.workers)
    for name in args.dataset or []:
        g, _, times, results = _sim_products(args, name)
        scores = ct.compute_all(g, dsc_t=args.dsc_t)
        vectors = {m: cs.scores.astype(np.float64) for m, cs in scores.items()}
        cells = []
        for ratio, res in results:
            cells.extend(evaluate_metrics(vectors, res.q_t, res.q_inf,
                                          ratio, times, args.p))
        ds = dataset_name(name)
        out = Path(args.out or ".") / f"{ds}_grid.csv"
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join([GRID_CSV_HEADER] + grid_csv_rows(ds, cells)) + "\n")
        print(f"wrote {out}")
    return 0


def _cmd_aggregate(args) -> int:
    grids = {}
    for path in args.grids:
        for ds, cells in parse_grid_csv(path).items():
            grids[ds] = cells
    agg = aggregate_datasets(grids.values())
    text = "\n".join([AGGREGATE_CSV_HEADER] + aggregate_csv_rows(agg)) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_report(args) -> int:
    grids = parse_grid_csv(args.grid)
    out = Path(args.out or "heatmap.svg")
    multiple = len(grids) > 1
    for ds, cells in grids.items():
        target = out if not multiple else out.with_name(f"{out.stem}_{ds}{out.suffix}")
        target.write_text(render_heatmap(cells, args.channel,
                                         title=f"{ds}: {args.channel}"))
        print(f"wrote {target}")
    return 0


def _cmd_run(args) -> int:
    file_values = parse_config_file(args.config) if args.config else {}
    spec = build_spec(
        file_values,
        datasets=tuple(args.dataset) if args.dataset else None,
        lambda_ratios=tuple(float(x) for x in args.lambda_ratios.split(","))
        if args.lambda_ratios else None,
        times=parse_times(args.times) if args.times else None,
        runs=args.runs, master_seed=args.seed,
        top_fraction=args.top_fraction, p=args.p,
        out_dir=args.out, allow_large=args.allow_large or None,
        workers=args.workers)
    manifest = run_experiment(spec)
    done = ", ".join(manifest["datasets_completed"]) or "none"
    print(f"run complete: datasets [{done}], "
          f"cache hits {manifest['cache']['hits']}, "
          f"misses {manifest['cache']['misses']}")
    for ds, msg in manifest["errors"].items():
        print(f"error [{ds}]: {msg}", file=sys.stderr)
    return 1 if manifest["errors"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spreadbench",
        description="Benchmark centrality metrics against SIR spreading influence")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download a dataset with hash checking")
    _add_common(p)
    p.add_argument("--url", default=None)
    p.add_argument("--dest", default=None, help="filename for --url downloads")
    p.set_defaults(func=_cmd_fetch)

    p = sub.add_parser("stats", help="Table-style summary rows for datasets")
    _add_common(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("centrality", help="compute metric scores to CSV")
    _add_common(p)
    p.add_argument("--metrics", default=None, help="comma list, default all")
    p.add_argument("--dsc-t", type=int, default=5, dest="dsc_t")
    p.set_defaults(func=_cmd_centrality)

    for cmd, fn in (("simulate", _cmd_simulate), ("evaluate", _cmd_evaluate)):
        p = sub.add_parser(cmd)
        _add_common(p)
        p.add_argument("--lambda-ratios", default="1,2,5,10")
        p.add_argument("--times", default="1-30")
        p.add_argument("--runs", type=int, default=1000)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--p", type=float, default=0.005)
        p.add_argument("--dsc-t", type=int, default=5, dest="dsc_t")
        p.add_argument("--workers", type=int, default=None)
        p.set_defaults(func=fn)

    p = sub.add_parser("aggregate", help="mean relative performance across grids")
    p.add_argument("--grids", nargs="+", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("report", help="render a grid CSV as an SVG heatmap")
    p.add_argument("--grid", required=True)
    p.add_argument("--channel", choices=("r", "precision"), default="r")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("run", help="full chain: stats, metrics, simulation, reports")
    _add_common(p)
    p.add_argument("--config", default=None, help="key = value experiment file")
    p.add_argument("--lambda-ratios", default=None)
    p.add_argument("--times", default=None)
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--top-fraction", type=float, default=None, dest="top_fraction")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--allow-large", action="store_true", dest="allow_large")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpreadbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
