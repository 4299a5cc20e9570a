"""Loading, validating and summarizing undirected simple graphs.

Edge lists are symmetrized, self-loops removed and duplicate edges collapsed;
node labels are remapped to a dense 0..N-1 range (sorted numerically when all
labels are integers, lexicographically otherwise) and the original labels are
kept for reporting. The adjacency is stored CSR-style with sorted neighbor
lists and is immutable after construction, so it can be shared freely across
parallel workers.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import DegenerateThresholdError, GraphParseError


@dataclass(frozen=True)
class ParseOptions:
    """How to read an edge-list text file.

    delimiter: None splits on any whitespace, otherwise the literal string.
    comment_prefixes: lines starting with any of these are skipped.
    require_numeric_ids: reject non-integer node tokens (with line number).
    drop_extra_columns: ignore weight/timestamp columns beyond the first two.
    """

    delimiter: str | None = None
    comment_prefixes: tuple[str, ...] = ("#", "%")
    require_numeric_ids: bool = False
    drop_extra_columns: bool = True


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph with compact sorted adjacency."""

    n: int
    edge_count: int
    indptr: np.ndarray          # int64, length n + 1
    indices: np.ndarray         # int32, neighbor ids sorted within each row
    labels: tuple[str, ...]     # internal id -> original label
    dropped_duplicates: int = 0
    dropped_self_loops: int = 0
    degree: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        deg = np.diff(self.indptr).astype(np.int64)
        deg.setflags(write=False)
        object.__setattr__(self, "degree", deg)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def content_hash(self) -> str:
        """SHA-256 over node count, adjacency and labels."""
        h = hashlib.sha256()
        h.update(str(self.n).encode())
        h.update(self.indptr.tobytes())
        h.update(self.indices.tobytes())
        h.update("\x00".join(self.labels).encode())
        return h.hexdigest()


@dataclass(frozen=True)
class GraphStats:
    """First two degree moments plus connectivity summary."""

    mean_degree: float
    mean_square_degree: float
    component_count: int
    giant_component_size: int
    lambda_c: float | None  # None when the mean-field threshold is degenerate

    def __post_init__(self):
        # variance non-negativity: <k^2> >= <k>^2 up to float rounding
        assert self.mean_square_degree >= self.mean_degree**2 - 1e-9


def _sort_labels(labels: set[str]) -> list[str]:
    try:
        return sorted(labels, key=int)
    except ValueError:
        return sorted(labels)


def _build_graph(label_edges: set[tuple[str, str]], all_labels: set[str],
                 dropped_duplicates: int, dropped_self_loops: int) -> Graph:
    ordered = _sort_labels(all_labels)
    index = {lab: i for i, lab in enumerate(ordered)}
    n = len(ordered)
    m = len(label_edges)

    us = np.empty(2 * m, dtype=np.int64)
    vs = np.empty(2 * m, dtype=np.int64)
    for pos, (a, b) in enumerate(label_edges):
        i, j = index[a], index[b]
        us[2 * pos], vs[2 * pos] = i, j
        us[2 * pos + 1], vs[2 * pos + 1] = j, i

    order = np.lexsort((vs, us))
    us, vs = us[order], vs[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, us + 1, 1)
    np.cumsum(indptr, out=indptr)
    indices = vs.astype(np.int32)

    return Graph(n=n, edge_count=m, indptr=indptr, indices=indices,
                 labels=tuple(ordered),
                 dropped_duplicates=dropped_duplicates,
                 dropped_self_loops=dropped_self_loops)


def graph_from_edges(edges: Iterable[tuple[int | str, int | str]],
                     isolated: Iterable[int | str] = ()) -> Graph:
    """Build a Graph from (u, v) pairs; handy for tests and generators."""
    label_edges: set[tuple[str, str]] = set()
    labels: set[str] = {str(x) for x in isolated}
    dup = loops = 0
    for u, v in edges:
        a, b = str(u), str(v)
        labels.add(a)
        labels.add(b)
        if a == b:
            loops += 1
            continue
        key = (a, b) if (a, b) <= (b, a) else (b, a)
        if key in label_edges:
            dup += 1
        else:
            label_edges.add(key)
    if not labels:
        raise GraphParseError("empty graph: no nodes")
    return _build_graph(label_edges, labels, dup, loops)


def _iter_lines(stream: IO) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8", errors="replace")
        yield lineno, raw


def load_edge_list(stream: IO, options: ParseOptions = ParseOptions()) -> Graph:
    """Parse an edge-list stream into a Graph.

    Duplicate edges are collapsed, self-loops removed and direction ignored;
    the counts of dropped lines are recorded on the returned Graph.
    """
    label_edges: set[tuple[str, str]] = set()
    labels: set[str] = set()
    dup = loops = 0
    saw_data = False

    for lineno, raw in _iter_lines(stream):
        line = raw.strip()
        if not line or line.startswith(options.comment_prefixes):
            continue
        tokens = line.split(options.delimiter)
        tokens = [t for t in tokens if t]
        if len(tokens) < 2:
            raise GraphParseError(f"expected two node tokens, got {line!r}", lineno)
        if len(tokens) > 2 and not options.drop_extra_columns:
            raise GraphParseError(f"unexpected extra columns in {line!r}", lineno)
        a, b = tokens[0], tokens[1]
        if options.require_numeric_ids:
            try:
                int(a), int(b)
            except ValueError:
                raise GraphParseError(f"non-numeric node token in {line!r}", lineno) from None
        saw_data = True
        labels.add(a)
        labels.add(b)
        if a == b:
            loops += 1
            continue
        key = (a, b) if (a, b) <= (b, a) else (b, a)
        if key in label_edges:
            dup += 1
        else:
            label_edges.add(key)

    if not saw_data:
        raise GraphParseError("empty input: no edges found")
    return _build_graph(label_edges, labels, dup, loops)


def load_graph(path: str | Path, options: ParseOptions | None = None) -> Graph:
    """Load an edge list from disk, sniffing a comma delimiter if needed."""
    path = Path(path)
    if options is None:
        delim = None
        with path.open("r", encoding="utf-8", errors="replace") as fh:
            for line in fh:
                s = line.strip()
                if not s or s.startswith(("#", "%")):
                    continue
                if "," in s:
                    delim = ","
                break
        options = ParseOptions(delimiter=delim)
    with path.open("r", encoding="utf-8", errors="replace") as fh:
        return load_edge_list(fh, options)


def write_edge_list(g: Graph, path: str | Path) -> None:
    """Serialize with original labels, one unordered edge per line."""
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write("% undirected simple graph\n")
        fh.write(f"% nodes {g.n} edges {g.edge_count}\n")
        for i in range(g.n):
            row = g.neighbors(i)
            for j in row[row > i]:
                fh.write(f"{g.labels[i]} {g.labels[int(j)]}\n")


def connected_components(g: Graph) -> tuple[np.ndarray, list[int]]:
    """Per-node component id plus component sizes.

    Component ids are assigned in order of the smallest contained node index,
    which makes them deterministic for a given Graph.
    """
    comp = np.full(g.n, -1, dtype=np.int64)
    sizes: list[int] = []
    stack: list[int] = []
    for start in range(g.n):
        if comp[start] >= 0:
            continue
        cid = len(sizes)
        comp[start] = cid
        stack.append(start)
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for v in g.neighbors(u):
                v = int(v)
                if comp[v] < 0:
                    comp[v] = cid
                    stack.append(v)
        sizes.append(size)
    return comp, sizes


def threshold_from_moments(mean_degree: float, mean_square_degree: float) -> float:
    """Degree-based mean-field epidemic threshold <k> / (<k^2> - <k>)."""
    if mean_square_degree <= mean_degree:
        raise DegenerateThresholdError(
            f"threshold undefined: <k^2>={mean_square_degree} <= <k>={mean_degree}")
    return mean_degree / (mean_square_degree - mean_degree)


def epidemic_threshold(stats: "GraphStats") -> float:
    """Threshold from a GraphStats record; raises when degenerate."""
    return threshold_from_moments(stats.mean_degree, stats.mean_square_degree)


def degree_stats(g: Graph) -> GraphStats:
    """Degree moments, component structure and (when defined) the threshold."""
    k = g.degree.astype(np.float64)
    mean_k = 2.0 * g.edge_count / g.n
    mean_k2 = float(np.mean(k * k))
    _, sizes = connected_components(g)
    try:
        lam_c = threshold_from_moments(mean_k, mean_k2)
    except DegenerateThresholdError:
        lam_c = None
    return GraphStats(mean_degree=mean_k, mean_square_degree=mean_k2,
                      component_count=len(sizes),
                      giant_component_size=max(sizes),
                      lambda_c=lam_c)


STATS_CSV_HEADER = ("dataset,nodes,edges,mean_degree,mean_square_degree,lambda_c,"
                    "components,giant_component,dropped_duplicates,dropped_self_loops")


def stats_csv_row(name: str, g: Graph, stats: GraphStats) -> str:
    lam = repr(stats.lambda_c) if stats.lambda_c is not None else ""
    return (f"{name},{g.n},{g.edge_count},{stats.mean_degree!r},"
            f"{stats.mean_square_degree!r},{lam},{stats.component_count},"
            f"{stats.giant_component_size},{g.dropped_duplicates},{g.dropped_self_loops}")
