"""Node scoring metrics.

Ten per-node scores over an immutable Graph: degree, social capital, H-index,
LocalRank, dynamics-sensitive score, coreness, eigenvector, betweenness,
closeness and the local clustering coefficient. Integer-valued metrics are
returned as int64 so they stay exact; the rest are float64.

All functions are pure; the per-source BFS loops (betweenness, closeness) are
compiled with numba but remain single pass in a fixed source order, so output
is bit-stable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit

from .errors import ParameterError
from .graphs import Graph, degree_stats

METRICS = (
    "degree",
    "social_capital",
    "h_index",
    "local_rank",
    "dynamics_sensitive",
    "k_core",
    "eigenvector",
    "betweenness",
    "closeness",
    "clustering",
)


@dataclass(frozen=True)
class CentralityScores:
    """Score vector tagged with metric identity and parameters."""

    metric: str
    scores: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.all(np.isfinite(self.scores)):
            raise ParameterError(f"{self.metric}: non-finite score produced")
        self.scores.setflags(write=False)


def _matvec(g: Graph, x: np.ndarray, row_ids: np.ndarray) -> np.ndarray:
    """y = A x for the 0/1 adjacency, via bincount over the edge list."""
    return np.bincount(row_ids, weights=x[g.indices], minlength=g.n)


def _row_ids(g: Graph) -> np.ndarray:
    return np.repeat(np.arange(g.n, dtype=np.int64), g.degree)


def degree(g: Graph) -> CentralityScores:
    """k_i: number of neighbors."""
    return CentralityScores("degree", g.degree.copy())


def social_capital(g: Graph) -> CentralityScores:
    """s_i = k_i + sum of neighbor degrees; local, integer-valued."""
    k = g.degree
    s = np.empty(g.n, dtype=np.int64)
    for i in range(g.n):
        s[i] = k[i] + int(k[g.neighbors(i)].sum())
    return CentralityScores("social_capital", s)


def h_index(g: Graph) -> CentralityScores:
    """Largest h such that h neighbors have degree >= h."""
    k = g.degree
    out = np.zeros(g.n, dtype=np.int64)
    for i in range(g.n):
        nd = np.sort(k[g.neighbors(i)])[::-1]
        h = 0
        for rank, d in enumerate(nd, start=1):
            if d >= rank:
                h = rank
            else:
                break
        out[i] = h
    return CentralityScores("h_index", out)


def local_rank(g: Graph) -> CentralityScores:
    """Neighborhood-size double sum reaching out to distance four.

    ball2[l] counts the nearest plus next-nearest neighbors of l (l itself
    excluded); the score of i sums ball2 over the neighbors of its neighbors.
    """
    n = g.n
    ball2 = np.zeros(n, dtype=np.int64)
    stamp = np.full(n, -1, dtype=np.int64)
    for l in range(n):
        count = 0
        stamp[l] = l
        for j in g.neighbors(l):
            j = int(j)
            if stamp[j] != l:
                stamp[j] = l
                count += 1
            for u in g.neighbors(j):
                u = int(u)
                if stamp[u] != l:
                    stamp[u] = l
                    count += 1
        ball2[l] = count
    inner = np.empty(n, dtype=np.int64)
    for j in range(n):
        inner[j] = int(ball2[g.neighbors(j)].sum())
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = int(inner[g.neighbors(i)].sum())
    return CentralityScores("local_rank", out)


def dynamics_sensitive(g: Graph, beta: float | None = None, mu: float = 1.0,
                       t: int = 5) -> CentralityScores:
    """Analytic early-spreading score from iterated infection operators.

    Accumulates s = sum_{j=0..t} H^j (beta A e) with H = beta A + (1 - mu) I,
    computed with sparse matvecs in O(t L). beta defaults to the graph's
    mean-field epidemic threshold.
    """
    if beta is None:
        stats = degree_stats(g)
        if stats.lambda_c is None:
            raise ParameterError("dynamics_sensitive: default beta undefined "
                                 "(degenerate epidemic threshold)")
        beta = stats.lambda_c * mu if mu > 0 else stats.lambda_c
    if not (0.0 <= beta <= 1.0) or not (0.0 <= mu <= 1.0):
        raise ParameterError(f"dynamics_sensitive: invalid probabilities "
                             f"beta={beta} mu={mu}")
    if t < 0:
        raise ParameterError(f"dynamics_sensitive: t must be >= 0, got {t}")
    rows = _row_ids(g)
    u = beta * g.degree.astype(np.float64)   # beta A e
    s = u.copy()
    for _ in range(t):
        u = beta * _matvec(g, u, rows) + (1.0 - mu) * u
        s += u
    return CentralityScores("dynamics_sensitive", s,
                            params={"beta": beta, "mu": mu, "t": t})


def k_core(g: Graph) -> CentralityScores:
    """Coreness: the pruning stage at which each node is removed.

    Batagelj-Zaversnik bucket peeling, O(N + L).
    """
    n = g.n
    deg = g.degree.copy()
    max_deg = int(deg.max()) if n else 0
    bin_start = np.zeros(max_deg + 2, dtype=np.int64)
    for d in deg:
        bin_start[d + 1] += 1
    np.cumsum(bin_start, out=bin_start)
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    fill = bin_start[:-1].copy()
    for v in range(n):
        pos[v] = fill[deg[v]]
        vert[pos[v]] = v
        fill[deg[v]] += 1
    core = deg.copy()
    for idx in range(n):
        v = vert[idx]
        for u in g.neighbors(v):
            u = int(u)
            if core[u] > core[v]:
                du = core[u]
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    vert[pu], vert[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bin_start[du] += 1
                core[u] -= 1
    return CentralityScores("k_core", core.astype(np.int64))


def eigenvector(g: Graph, tol: float = 1e-12, max_iter: int = 10000) -> CentralityScores:
    """Principal eigenvector of the adjacency matrix by power iteration.

    Iterates on A + I (same principal eigenvector, avoids the sign-flipping
    stall on bipartite graphs), starting from the uniform positive vector and
    normalizing to unit Euclidean length. Stops when successive iterates
    differ by less than tol in max-norm; non-convergence is reported in the
    params record rather than raised.
    """
    if g.edge_count < 1:
        raise ParameterError("eigenvector: graph has no edges")
    rows = _row_ids(g)
    x = np.full(g.n, 1.0 / np.sqrt(g.n))
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        y = _matvec(g, x, rows) + x
        norm = np.linalg.norm(y)
        y /= norm
        if np.max(np.abs(y - x)) < tol:
            x = y
            converged = True
            break
        x = y
    return CentralityScores("eigenvector", x,
                            params={"tol": tol, "max_iter": max_iter,
                                    "iterations": iterations,
                                    "converged": converged})


@njit(cache=True)
def _brandes(indptr, indices, n):
    """Betweenness via single-source BFS dependency accumulation.

    Accumulates over ordered source-target pairs; the caller halves the
    result to count unordered pairs once.
    """
    bc = np.zeros(n, dtype=np.float64)
    dist = np.empty(n, dtype=np.int64)
    sigma = np.empty(n, dtype=np.float64)
    delta = np.empty(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
            sigma[i] = 0.0
            delta[i] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        queue[0] = s
        head, tail = 0, 1
        m = 0
        while head < tail:
            v = queue[head]
            head += 1
            order[m] = v
            m += 1
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        for i in range(m - 1, -1, -1):
            w = order[i]
            coeff = (1.0 + delta[w]) / sigma[w]
            for p in range(indptr[w], indptr[w + 1]):
                v = indices[p]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    return bc


def betweenness(g: Graph) -> CentralityScores:
    """Shortest-path betweenness, unordered pairs counted once.

    Counting ordered pairs instead would scale every score by exactly 2 and
    cannot change any ranking or correlation.
    """
    bc = _brandes(g.indptr, g.indices, g.n)
    return CentralityScores("betweenness", bc / 2.0)


@njit(cache=True)
def _closeness_kernel(indptr, indices, n):
    out = np.zeros(n, dtype=np.float64)
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        total = 0
        while head < tail:
            v = queue[head]
            head += 1
            total += dist[v]
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue[tail] = w
                    tail += 1
        reached = tail  # component size, including s
        if reached > 1:
            out[s] = float((reached - 1) * (reached - 1)) / (float(n - 1) * float(total))
    return out


def closeness(g: Graph) -> CentralityScores:
    """Reciprocal mean shortest-path distance, component-rescaled.

    Within the component of i: C_i = (|G_i| - 1) / (N - 1) * 1 / d_i with d_i
    the mean distance to the other component members. Isolated nodes score 0.
    """
    if g.n == 1:
        return CentralityScores("closeness", np.zeros(1))
    return CentralityScores("closeness", _closeness_kernel(g.indptr, g.indices, g.n))


def clustering_coefficient(g: Graph) -> CentralityScores:
    """Local clustering c_i = 2 * (links among neighbors) / (k_i (k_i - 1))."""
    n = g.n
    nbr_sets = [set(map(int, g.neighbors(i))) for i in range(n)]
    out = np.zeros(n, dtype=np.float64)
    k = g.degree
    for i in range(n):
        if k[i] < 2:
            continue
        links2 = 0  # ordered count, each neighbor link seen twice
        for j in nbr_sets[i]:
            links2 += len(nbr_sets[i] & nbr_sets[j])
        out[i] = links2 / (k[i] * (k[i] - 1))
    return CentralityScores("clustering", out)


def compute_all(g: Graph, beta: float | None = None, mu: float = 1.0,
                dsc_t: int = 5, tol: float = 1e-12,
                max_iter: int = 10000) -> dict[str, CentralityScores]:
    """All ten metrics keyed by metric id, in the fixed METRICS order."""
    producers: dict[str, Callable[[], CentralityScores]] = {
        "degree": lambda: degree(g),
        "social_capital": lambda: social_capital(g),
        "h_index": lambda: h_index(g),
        "local_rank": lambda: local_rank(g),
        "dynamics_sensitive": lambda: dynamics_sensitive(g, beta=beta, mu=mu, t=dsc_t),
        "k_core": lambda: k_core(g),
        "eigenvector": lambda: eigenvector(g, tol=tol, max_iter=max_iter),
        "betweenness": lambda: betweenness(g),
        "closeness": lambda: closeness(g),
        "clustering": lambda: clustering_coefficient(g),
    }
    return {name: producers[name]() for name in METRICS}
