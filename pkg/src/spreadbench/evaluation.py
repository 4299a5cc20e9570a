"""Scoring centrality metrics against ground-truth influence.

Pearson correlation and top-share precision per (metric, lambda, t) cell,
normalization against the best metric within each cell, the relative gain
from targeting time-t optimal seeds, and cross-dataset aggregation of the
normalized values.

Ties in any top-k selection are broken by ascending node id after descending
score, on both the metric side and the ground-truth side, which keeps the
relative gain non-negative exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import UndefinedCorrelationError


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation; undefined inputs raise, never return 0."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise UndefinedCorrelationError("inputs must be equal-length vectors")
    if xa.size < 2:
        raise UndefinedCorrelationError("need at least two points")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sx = float(np.sqrt(np.dot(dx, dx)))
    sy = float(np.sqrt(np.dot(dy, dy)))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError("correlation undefined for a constant vector")
    return float(np.dot(dx, dy) / (sx * sy))


def top_k_indices(values: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest values; ties broken by ascending index."""
    values = np.asarray(values)
    order = np.lexsort((np.arange(values.size), -values))
    return order[:k]


def top_share_count(n: int, p: float) -> int:
    """Size of a top-p share of n items, at least 1, round-half-up."""
    return max(1, int(math.floor(p * n + 0.5)))


def precision_at(scores: np.ndarray, truth: np.ndarray, p: float) -> float:
    """Overlap fraction of the top-p sets by score and by ground truth."""
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must be in (0, 1], got {p}")
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    k = top_share_count(scores.size, p)
    top_scores = set(top_k_indices(scores, k).tolist())
    top_truth = set(top_k_indices(truth, k).tolist())
    return len(top_scores & top_truth) / k


def relative_gain(q_t: np.ndarray, q_inf: np.ndarray, p: float = 0.005) -> float:
    """Relative reach gain at time t from seeding by q(t) instead of q(inf).

    (Q(t|t) - Q(t|inf)) / Q(t|inf), where Q(t|s) is the mean q(t) over the
    top-p nodes ranked by the score s. Non-negative by construction.
    """
    q_t = np.asarray(q_t, dtype=np.float64)
    q_inf = np.asarray(q_inf, dtype=np.float64)
    k = top_share_count(q_t.size, p)
    by_t = top_k_indices(q_t, k)
    by_inf = top_k_indices(q_inf, k)
    q_tt = float(q_t[by_t].mean())
    q_ti = float(q_t[by_inf].mean())
    return (q_tt - q_ti) / q_ti


@dataclass(frozen=True)
class EvaluationCell:
    """One (metric, lambda, t) cell of the benchmark grid.

    t is a positive integer step or math.inf for late-time influence.
    Missing correlations (constant score vectors) carry None, and are
    excluded from the per-cell normalization.
    """

    metric: str
    lambda_ratio: float
    t: float
    r: float | None
    precision: float
    normalized_r: float | None = None
    normalized_precision: float | None = None


def _normalize(cells: list[EvaluationCell]) -> list[EvaluationCell]:
    """Normalize r and precision by the best metric within each (lambda, t)."""
    out: list[EvaluationCell] = []
    groups: dict[tuple[float, float], list[EvaluationCell]] = {}
    for c in cells:
        groups.setdefault((c.lambda_ratio, c.t), []).append(c)
    for group in groups.values():
        rs = [c.r for c in group if c.r is not None]
        best_r = max(rs) if rs else None
        best_p = max(c.precision for c in group)
        for c in group:
            norm_r = None
            if c.r is not None and best_r is not None and best_r > 0:
                norm_r = c.r / best_r
            norm_p = c.precision / best_p if best_p > 0 else None
            out.append(EvaluationCell(metric=c.metric, lambda_ratio=c.lambda_ratio,
                                      t=c.t, r=c.r, precision=c.precision,
                                      normalized_r=norm_r,
                                      normalized_precision=norm_p))
    return out


def evaluate_metrics(scores: Mapping[str, np.ndarray], q_t: np.ndarray,
                     q_inf: np.ndarray, lambda_ratio: float,
                     times: Sequence[int], p: float = 0.005,
                     include_inf: bool = True) -> list[EvaluationCell]:
    """Fill the (metric, t) grid for one lambda value.

    scores maps metric id to a length-N vector; q_t has shape (N, horizon)
    with column t-1 holding q(t); q_inf is length N. Every requested t must
    be within the simulated horizon.
    """
    horizon = q_t.shape[1]
    cells: list[EvaluationCell] = []
    targets: list[tuple[float, np.ndarray]] = []
    for t in times:
        if not (1 <= t <= horizon):
            raise ValueError(f"t={t} outside simulated horizon 1..{horizon}")
        targets.append((float(t), q_t[:, t - 1]))
    if include_inf:
        targets.append((math.inf, q_inf))
    for t_val, truth in targets:
        for metric, vec in scores.items():
            try:
                r = pearson(vec, truth)
            except UndefinedCorrelationError:
                r = None
            prec = precision_at(np.asarray(vec, dtype=np.float64), truth, p)
            cells.append(EvaluationCell(metric=metric, lambda_ratio=lambda_ratio,
                                        t=t_val, r=r, precision=prec))
    return _normalize(cells)


@dataclass(frozen=True)
class AggregateCell:
    """Cross-dataset mean of normalized performance for one (metric, lambda, t)."""

    metric: str
    lambda_ratio: float
    t: float
    mean_normalized_r: float | None
    mean_normalized_precision: float | None
    dataset_count: int


def aggregate_datasets(grids: Iterable[Sequence[EvaluationCell]]) -> list[AggregateCell]:
    """Average normalized values over datasets, per (metric, lambda, t).

    Cells missing in a dataset (undefined correlation) are skipped for that
    dataset rather than coerced to zero.
    """
    acc_r: dict[tuple[str, float, float], list[float]] = {}
    acc_p: dict[tuple[str, float, float], list[float]] = {}
    seen: dict[tuple[str, float, float], int] = {}
    for grid in grids:
        for c in grid:
            key = (c.metric, c.lambda_ratio, c.t)
            seen[key] = seen.get(key, 0) + 1
            if c.normalized_r is not None:
                acc_r.setdefault(key, []).append(c.normalized_r)
            if c.normalized_precision is not None:
                acc_p.setdefault(key, []).append(c.normalized_precision)
    out = []
    for key in sorted(seen, key=lambda k: (k[1], k[2], k[0])):
        rs = acc_r.get(key)
        ps = acc_p.get(key)
        out.append(AggregateCell(
            metric=key[0], lambda_ratio=key[1], t=key[2],
            mean_normalized_r=sum(rs) / len(rs) if rs else None,
            mean_normalized_precision=sum(ps) / len(ps) if ps else None,
            dataset_count=seen[key]))
    return out


GRID_CSV_HEADER = ("dataset,metric,lambda_ratio,t,r,precision,"
                   "normalized_r,normalized_precision")


def _fmt_t(t: float) -> str:
    return "inf" if math.isinf(t) else str(int(t))


def _fmt_opt(v: float | None) -> str:
    return "" if v is None else repr(v)


def grid_csv_rows(dataset: str, cells: Sequence[EvaluationCell]) -> list[str]:
    """Long-format rows, deterministically ordered."""
    ordered = sorted(cells, key=lambda c: (c.lambda_ratio, c.t, c.metric))
    return [f"{dataset},{c.metric},{c.lambda_ratio!r},{_fmt_t(c.t)},"
            f"{_fmt_opt(c.r)},{c.precision!r},{_fmt_opt(c.normalized_r)},"
            f"{_fmt_opt(c.normalized_precision)}"
            for c in ordered]


AGGREGATE_CSV_HEADER = ("metric,lambda_ratio,t,mean_normalized_r,"
                        "mean_normalized_precision,dataset_count")


def aggregate_csv_rows(cells: Sequence[AggregateCell]) -> list[str]:
    return [f"{c.metric},{c.lambda_ratio!r},{_fmt_t(c.t)},"
            f"{_fmt_opt(c.mean_normalized_r)},"
            f"{_fmt_opt(c.mean_normalized_precision)},{c.dataset_count}"
            for c in cells]
