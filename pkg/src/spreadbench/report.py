"""Report emission: SVG heatmaps and the hub scatter table.

Heatmaps use a diverging scale anchored at normalized values 0 (dark red),
0.5 (white) and 1 (dark blue). On the precision channel, a (lambda, t) column
where no metric reaches precision 0.1 is blacked out entirely.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .centrality import METRICS
from .evaluation import EvaluationCell, top_k_indices, top_share_count
from .graphs import Graph

_RED = (178, 24, 43)
_WHITE = (255, 255, 255)
_BLUE = (33, 102, 172)
_MISSING = "#d9d9d9"
_BLACK = "#000000"
_PRECISION_FLOOR = 0.1


def _lerp(a: tuple[int, int, int], b: tuple[int, int, int], f: float) -> str:
    rgb = tuple(round(a[i] + (b[i] - a[i]) * f) for i in range(3))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def diverging_color(value: float) -> str:
    """Map a normalized value in [0, 1] onto red -> white -> blue."""
    v = min(max(value, 0.0), 1.0)
    if v <= 0.5:
        return _lerp(_RED, _WHITE, v / 0.5)
    return _lerp(_WHITE, _BLUE, (v - 0.5) / 0.5)


def _fmt_t(t: float) -> str:
    return "inf" if math.isinf(t) else str(int(t))


def render_heatmap(cells: Sequence[EvaluationCell], channel: str = "r",
                   title: str = "") -> str:
    """SVG heatmap of normalized performance, metrics x (lambda, t) cells."""
    if channel not in ("r", "precision"):
        raise ValueError(f"channel must be 'r' or 'precision', got {channel!r}")
    if not cells:
        raise ValueError("empty grid")

    columns = sorted({(c.lambda_ratio, c.t) for c in cells})
    metrics = [m for m in METRICS if any(c.metric == m for c in cells)]
    metrics += sorted({c.metric for c in cells} - set(metrics))
    lookup = {(c.metric, c.lambda_ratio, c.t): c for c in cells}

    blackout = set()
    if channel == "precision":
        for col in columns:
            best = max(c.precision for c in cells
                       if (c.lambda_ratio, c.t) == col)
            if best < _PRECISION_FLOOR:
                blackout.add(col)

    cell_w, cell_h = 34, 22
    left, top = 150, 70
    legend_h = 46
    width = left + cell_w * len(columns) + 20
    height = top + cell_h * len(metrics) + legend_h + 30

    svg = ['<svg xmlns="http://www.w3.org/2000/svg" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif">']
    svg.append(f'<rect width="{width}" height="{height}" fill="#ffffff"/>')
    if title:
        svg.append(f'<text x="{width / 2}" y="20" text-anchor="middle" '
                   f'font-size="14">{title}</text>')

    prev_lam = None
    for ci, (lam, t) in enumerate(columns):
        x = left + ci * cell_w
        if lam != prev_lam:
            svg.append(f'<text x="{x + 2}" y="{top - 26}" font-size="10" '
                       f'fill="#333">&#955;/&#955;c={lam:g}</text>')
            prev_lam = lam
        svg.append(f'<text x="{x + cell_w / 2}" y="{top - 8}" font-size="9" '
                   f'text-anchor="middle" fill="#555">t={_fmt_t(t)}</text>')

    for ri, metric in enumerate(metrics):
        y = top + ri * cell_h
        svg.append(f'<text x="{left - 6}" y="{y + cell_h / 2 + 3}" font-size="10" '
                   f'text-anchor="end">{metric}</text>')
        for ci, col in enumerate(columns):
            x = left + ci * cell_w
            cell = lookup.get((metric, col[0], col[1]))
            if col in blackout:
                fill = _BLACK
            elif cell is None:
                fill = _MISSING
            else:
                value = cell.normalized_r if channel == "r" else cell.normalized_precision
                fill = _MISSING if value is None else diverging_color(value)
            svg.append(f'<rect x="{x}" y="{y}" width="{cell_w - 1}" '
                       f'height="{cell_h - 1}" fill="{fill}"/>')

    ly = top + cell_h * len(metrics) + 20
    for i in range(101):
        svg.append(f'<rect x="{left + i * 2}" y="{ly}" width="2" height="10" '
                   f'fill="{diverging_color(i / 100)}"/>')
    for anchor, lab in ((0.0, "0"), (0.5, "0.5"), (1.0, "1")):
        svg.append(f'<text x="{left + anchor * 200}" y="{ly + 22}" font-size="9" '
                   f'text-anchor="middle">{lab}</text>')
    svg.append(f'<text x="{left + 220}" y="{ly + 10}" font-size="9">'
               f'normalized {channel} (vs best metric)</text>')
    if channel == "precision":
        svg.append(f'<rect x="{left + 220}" y="{ly + 14}" width="10" height="10" '
                   f'fill="{_BLACK}"/>')
        svg.append(f'<text x="{left + 234}" y="{ly + 23}" font-size="9">'
                   f'no metric above {_PRECISION_FLOOR:g}</text>')
    svg.append("</svg>")
    return "\n".join(svg)


HUB_SCATTER_HEADER = ("node,degree,social_capital,clustering,q_t,"
                      "influence_rank,top50_by_influence")


def hub_scatter_rows(g: Graph, degree: np.ndarray, social: np.ndarray,
                     clustering: np.ndarray, q_t_at: np.ndarray,
                     top_fraction: float = 0.05) -> list[str]:
    """CSV rows for the hub panel: top nodes by degree, ranked by influence.

    Restricted to the top share of nodes by degree; influence_rank orders the
    displayed rows by q(t) (1 = most influential) and top50_by_influence
    flags global top-50 spreaders.
    """
    n = g.n
    n_rows = top_share_count(n, top_fraction)
    hubs = top_k_indices(np.asarray(degree, dtype=np.float64), n_rows)
    top50 = set(top_k_indices(q_t_at, min(50, n)).tolist())

    qsub = q_t_at[hubs]
    order = np.lexsort((hubs, -qsub))
    rank = np.empty(len(hubs), dtype=np.int64)
    rank[order] = np.arange(1, len(hubs) + 1)

    rows = []
    for pos, node in enumerate(hubs):
        node = int(node)
        rows.append(f"{g.labels[node]},{int(degree[node])},{int(social[node])},"
                    f"{float(clustering[node])!r},{float(q_t_at[node])!r},"
                    f"{rank[pos]},{int(node in top50)}")
    return rows
