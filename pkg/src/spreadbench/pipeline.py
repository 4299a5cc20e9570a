"""Experiment orchestration: configs, cached execution, report bundles.

A run loads each dataset, computes the metric scores, simulates influence
curves for every node at each spreading-rate ratio (with a fingerprint-keyed
cache), evaluates the metric grids, and writes CSV tables, SVG heatmaps, hub
scatter tables and a manifest. Reruns with the same spec and master seed are
byte-identical; the manifest carries content hashes for every artifact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import centrality as ct
from .datasets import REGISTRY, resolve_dataset, sha256_file
from .epidemic import (InfluenceResult, SimulationConfig, config_from_lambda_ratio,
                       influence_curves, result_fingerprint)
from .errors import ParameterError, SpreadbenchError
from .evaluation import (AGGREGATE_CSV_HEADER, GRID_CSV_HEADER, EvaluationCell,
                         aggregate_csv_rows, aggregate_datasets,
                         evaluate_metrics, grid_csv_rows)
from .graphs import STATS_CSV_HEADER, degree_stats, load_graph, stats_csv_row
from .report import HUB_SCATTER_HEADER, hub_scatter_rows, render_heatmap

LARGE_NODE_COUNT = 50_000


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything a `run` needs; file values can be overridden by CLI flags."""

    datasets: tuple[str, ...]
    lambda_ratios: tuple[float, ...] = (1.0, 2.0, 5.0, 10.0)
    times: tuple[int, ...] = tuple(range(1, 31))
    metrics: tuple[str, ...] = ct.METRICS
    runs: int = 1000
    master_seed: int = 1
    mu: float = 1.0
    p: float = 0.005
    top_fraction: float = 0.05
    scatter_t: int = 5
    dsc_t: int = 5
    out_dir: str = "out"
    allow_large: bool = False
    workers: int | None = None

    def __post_init__(self):
        if not self.datasets:
            raise ParameterError("experiment needs at least one dataset")
        if any(r <= 0 for r in self.lambda_ratios):
            raise ParameterError("lambda ratios must be positive")
        if list(self.times) != sorted(set(self.times)) or self.times[0] < 1:
            raise ParameterError("times must be strictly increasing positive steps")
        unknown = set(self.metrics) - set(ct.METRICS)
        if unknown:
            raise ParameterError(f"unknown metrics: {sorted(unknown)}")
        if self.scatter_t not in self.times:
            raise ParameterError("scatter_t must be one of the evaluated times")


_LIST_FIELDS = {"datasets": str, "metrics": str, "lambda_ratios": float, "times": int}
_SCALAR_FIELDS = {"runs": int, "master_seed": int, "mu": float, "p": float,
                  "top_fraction": float, "scatter_t": int, "dsc_t": int,
                  "out_dir": str, "allow_large": lambda s: s.lower() in ("1", "true", "yes"),
                  "workers": int}


def parse_times(text: str) -> tuple[int, ...]:
    """Accept '1-30', '1,2,5,10' or a mix like '1-5,10,20'."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return tuple(out)


def parse_config_file(path: str | Path) -> dict:
    """Key = value experiment config; '#' starts a comment."""
    values: dict = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line without '=': {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key == "times":
            values[key] = parse_times(val)
        elif key in _LIST_FIELDS:
            conv = _LIST_FIELDS[key]
            values[key] = tuple(conv(v.strip()) for v in val.split(",") if v.strip())
        elif key in _SCALAR_FIELDS:
            values[key] = _SCALAR_FIELDS[key](val)
        else:
            raise ParameterError(f"unknown config key {key!r}")
    return values


def build_spec(file_values: dict | None = None, **overrides) -> ExperimentSpec:
    merged = dict(file_values or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    names = {f.name for f in fields(ExperimentSpec)}
    unknown = set(merged) - names
    if unknown:
        raise ParameterError(f"unknown spec fields: {sorted(unknown)}")
    return ExperimentSpec(**merged)


def set_worker_count(workers: int | None) -> int:
    """Pin the simulation thread count; results never depend on this number."""
    from .epidemic import set_workers

    return set_workers(workers)


def dataset_name(spec: str) -> str:
    """Short name for output paths: registry key, or the file stem."""
    return spec if spec in REGISTRY else Path(spec).stem


def _write(path: Path, text: str, artifacts: list[Path]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    artifacts.append(path)


SCORES_CSV_HEADER = "node_label,metric,score,parameters"


def scores_csv_lines(g, scores: dict[str, ct.CentralityScores]) -> list[str]:
    lines = [SCORES_CSV_HEADER]
    for metric in scores:
        cs = scores[metric]
        par = ";".join(f"{k}={v!r}" for k, v in sorted(cs.params.items()))
        for i in range(g.n):
            val = cs.scores[i]
            val_s = str(int(val)) if np.issubdtype(cs.scores.dtype, np.integer) else repr(float(val))
            lines.append(f"{g.labels[i]},{metric},{val_s},{par}")
    return lines


def cached_influence(g, config: SimulationConfig, cache_dir: Path,
                     counters: dict) -> InfluenceResult:
    """Simulate or reuse a cached result keyed by the config fingerprint."""
    fp = result_fingerprint(g, config)
    cache_file = cache_dir / f"{fp}.npz"
    if cache_file.exists():
        counters["hits"] += 1
        return InfluenceResult.load(cache_file)
    counters["misses"] += 1
    result = influence_curves(g, None, config)
    cache_dir.mkdir(parents=True, exist_ok=True)
    result.save(cache_file)
    return result


def run_experiment(spec: ExperimentSpec) -> dict:
    """Execute the full chain for every dataset; returns the manifest dict.

    A failing dataset is recorded in the manifest and does not abort the
    others.
    """
    set_worker_count(spec.workers)
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cache_dir = out / "cache"
    artifacts: list[Path] = []
    errors: dict[str, str] = {}
    cache_counters = {"hits": 0, "misses": 0}
    stats_lines = [STATS_CSV_HEADER]
    grids_by_dataset: dict[str, list[EvaluationCell]] = {}
    horizon = max(spec.times)

    for raw_name in spec.datasets:
        name = dataset_name(raw_name)
        try:
            path = resolve_dataset(raw_name)
            g = load_graph(path)
            if g.n > LARGE_NODE_COUNT and not spec.allow_large:
                raise ParameterError(
                    f"{name}: {g.n} nodes is above the desk-scale limit "
                    f"({LARGE_NODE_COUNT}); estimated cost is "
                    f"{spec.runs} runs x {g.n} seeds x {len(spec.lambda_ratios)} "
                    f"ratios = {spec.runs * g.n * len(spec.lambda_ratios):,} "
                    f"simulations. Pass --allow-large to proceed.")
            stats = degree_stats(g)
            stats_lines.append(stats_csv_row(name, g, stats))

            scores_all = ct.compute_all(g, mu=spec.mu, dsc_t=spec.dsc_t)
            scores = {m: scores_all[m] for m in ct.METRICS if m in spec.metrics}
            ds_dir = out / name
            _write(ds_dir / "scores.csv",
                   "\n".join(scores_csv_lines(g, scores)) + "\n", artifacts)

            score_vectors = {m: cs.scores.astype(np.float64)
                             for m, cs in scores.items()}
            cells: list[EvaluationCell] = []
            for ratio in spec.lambda_ratios:
                config = config_from_lambda_ratio(
                    stats, ratio, mu=spec.mu, runs=spec.runs,
                    horizon=horizon, master_seed=spec.master_seed)
                result = cached_influence(g, config, cache_dir, cache_counters)
                cells.extend(evaluate_metrics(score_vectors, result.q_t,
                                              result.q_inf, ratio,
                                              spec.times, spec.p))
                scatter = hub_scatter_rows(
                    g, scores_all["degree"].scores,
                    scores_all["social_capital"].scores,
                    scores_all["clustering"].scores,
                    result.q_t[:, spec.scatter_t - 1], spec.top_fraction)
                _write(ds_dir / f"hub_scatter_lambda{ratio:g}_t{spec.scatter_t}.csv",
                       "\n".join([HUB_SCATTER_HEADER] + scatter) + "\n", artifacts)

            grids_by_dataset[name] = cells
            _write(ds_dir / "grid.csv",
                   "\n".join([GRID_CSV_HEADER] + grid_csv_rows(name, cells)) + "\n",
                   artifacts)
            for channel in ("r", "precision"):
                _write(ds_dir / f"heatmap_{channel}.svg",
                       render_heatmap(cells, channel, title=f"{name}: {channel}"),
                       artifacts)
        except SpreadbenchError as exc:
            errors[name] = str(exc)

    _write(out / "stats.csv", "\n".join(stats_lines) + "\n", artifacts)

    if grids_by_dataset:
        agg = aggregate_datasets(grids_by_dataset.values())
        _write(out / "aggregate.csv",
               "\n".join([AGGREGATE_CSV_HEADER] + aggregate_csv_rows(agg)) + "\n",
               artifacts)
        pseudo = [EvaluationCell(metric=c.metric, lambda_ratio=c.lambda_ratio,
                                 t=c.t, r=None,
                                 precision=c.mean_normalized_precision or 0.0,
                                 normalized_r=c.mean_normalized_r,
                                 normalized_precision=c.mean_normalized_precision)
                  for c in agg]
        for channel in ("r", "precision"):
            _write(out / f"aggregate_heatmap_{channel}.svg",
                   render_heatmap(pseudo, channel,
                                  title=f"mean relative {channel} across datasets"),
                   artifacts)

    cache_files = sorted(cache_dir.glob("*.npz")) if cache_dir.exists() else []
    # workers and out_dir are execution knobs and hit/miss counters are
    # run-specific; all are kept out of the persisted manifest so that
    # equal-result bundles stay byte-identical.
    manifest = {
        "spec": {f.name: getattr(spec, f.name) if not isinstance(getattr(spec, f.name), tuple)
                 else list(getattr(spec, f.name)) for f in fields(spec)
                 if f.name not in ("workers", "out_dir")},
        "artifacts": [{"path": str(p.relative_to(out)),
                       "sha256": sha256_file(p),
                       "bytes": p.stat().st_size}
                      for p in sorted(artifacts)],
        "cache": {"files": [p.name for p in cache_files]},
        "errors": errors,
        "datasets_completed": sorted(grids_by_dataset),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return {**manifest,
            "cache": {**manifest["cache"], **cache_counters}}


def parse_grid_csv(path: str | Path) -> dict[str, list[EvaluationCell]]:
    """Read a long-format grid CSV back into cells, grouped by dataset."""
    grids: dict[str, list[EvaluationCell]] = {}
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != GRID_CSV_HEADER:
        raise ParameterError(f"{path}: not a grid CSV")
    for line in lines[1:]:
        if not line.strip():
            continue
        ds, metric, lam, t, r, prec, nr, npz = line.split(",")
        grids.setdefault(ds, []).append(EvaluationCell(
            metric=metric, lambda_ratio=float(lam),
            t=math.inf if t == "inf" else float(int(t)),
            r=float(r) if r else None, precision=float(prec),
            normalized_r=float(nr) if nr else None,
            normalized_precision=float(npz) if npz else None))
    return grids
