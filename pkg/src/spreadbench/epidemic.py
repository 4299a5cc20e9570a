"""Discrete-time SIR Monte Carlo engine with per-run reproducible streams.

Synchronous stepping: every currently infectious node first attempts to
infect each susceptible neighbor with probability beta (nodes infected this
step become infectious next step), then every node that entered the step
infectious recovers with probability mu. A run halts when no infectious node
remains.

The influence of a seed is tracked as the ever-infected fraction (I union R,
seed included): q(t) after t steps and q_inf at halting. Run j of seed i
draws from a counter-based stream derived from (master_seed, i, j), so the
results do not depend on worker count or scheduling; see `spreadbench.rng`.

For graphs with at most 12 nodes and mu = 1 the engine can be checked against
`exact_influence_small`, which enumerates the full outcome distribution.
"""
from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from .errors import ParameterError
from .graphs import Graph, GraphStats
from .rng import RNG_ID, RngStream

ENGINE_VERSION = "1"

_workers: int | None = None  # None resolves to os.cpu_count()


def set_workers(n: int | None) -> int:
    """Pin the simulation thread count. Results never depend on it."""
    global _workers
    if n is not None and n < 1:
        raise ParameterError(f"worker count must be >= 1, got {n}")
    _workers = n
    return effective_workers()


def effective_workers() -> int:
    return _workers if _workers is not None else (os.cpu_count() or 1)


_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_NODE_SALT = _U64(0xD1342543DE82EF95)
_RUN_SALT = _U64(0xDA942042E4DD58B5)
_INV_2_53 = 1.0 / 9007199254740992.0


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of a Monte Carlo influence estimation."""

    beta: float
    mu: float = 1.0
    runs: int = 1000
    horizon: int = 30
    master_seed: int = 1
    lambda_ratio: float | None = None  # provenance only; beta is authoritative

    def __post_init__(self):
        if not (0.0 <= self.beta <= 1.0):
            raise ParameterError(f"beta must be in [0, 1], got {self.beta}")
        if not (0.0 < self.mu <= 1.0):
            # mu = 0 would keep nodes infectious forever and the halting
            # condition (no infectious nodes) unreachable.
            raise ParameterError(f"mu must be in (0, 1], got {self.mu}")
        if self.runs < 1:
            raise ParameterError(f"runs must be >= 1, got {self.runs}")
        if self.horizon < 1:
            raise ParameterError(f"horizon must be >= 1, got {self.horizon}")


def config_from_lambda_ratio(stats: GraphStats, ratio: float, mu: float = 1.0,
                             runs: int = 1000, horizon: int = 30,
                             master_seed: int = 1) -> SimulationConfig:
    """Build a config with beta = ratio * lambda_c * mu.

    Refuses (rather than clamps) a ratio that would push beta above 1.
    """
    if stats.lambda_c is None:
        raise ParameterError("lambda ratio needs a non-degenerate epidemic threshold")
    if ratio <= 0:
        raise ParameterError(f"lambda ratio must be > 0, got {ratio}")
    beta = ratio * stats.lambda_c * mu
    if beta > 1.0:
        raise ParameterError(
            f"ratio {ratio} gives beta = {beta:.4f} > 1; refusing to clamp")
    return SimulationConfig(beta=beta, mu=mu, runs=runs, horizon=horizon,
                            master_seed=master_seed, lambda_ratio=ratio)


@dataclass(frozen=True)
class RunResult:
    """Trajectory of a single run: cumulative ever-infected per step."""

    counts: tuple[int, ...]  # counts[t-1] = ever-infected after step t
    halting_time: int

    @property
    def final_count(self) -> int:
        return self.counts[-1] if self.counts else 1


@dataclass(frozen=True)
class InfluenceCurve:
    """Per-seed time-resolved influence."""

    seed: int
    seed_label: str
    q_t: np.ndarray          # q(t) for t = 1..horizon
    q_inf: float
    runs: int
    fingerprint: str


@dataclass(frozen=True, eq=False)
class InfluenceResult:
    """Influence curves for a set of seeds under one config."""

    graph_hash: str
    config: SimulationConfig
    seeds: np.ndarray        # internal node ids
    seed_labels: tuple[str, ...]
    q_t: np.ndarray          # shape (len(seeds), horizon)
    q_inf: np.ndarray        # shape (len(seeds),)
    fingerprint: str

    def curve(self, pos: int) -> InfluenceCurve:
        return InfluenceCurve(seed=int(self.seeds[pos]),
                              seed_label=self.seed_labels[pos],
                              q_t=self.q_t[pos], q_inf=float(self.q_inf[pos]),
                              runs=self.config.runs, fingerprint=self.fingerprint)

    def save(self, path: str | Path) -> None:
        meta = {"graph_hash": self.graph_hash, "beta": repr(self.config.beta),
                "mu": repr(self.config.mu), "runs": self.config.runs,
                "horizon": self.config.horizon,
                "master_seed": self.config.master_seed,
                "lambda_ratio": repr(self.config.lambda_ratio),
                "fingerprint": self.fingerprint,
                "engine_version": ENGINE_VERSION, "rng": RNG_ID}
        np.savez(path, seeds=self.seeds, q_t=self.q_t, q_inf=self.q_inf,
                 seed_labels=np.array(self.seed_labels),
                 meta=np.array(json.dumps(meta, sort_keys=True)))

    @classmethod
    def load(cls, path: str | Path) -> "InfluenceResult":
        with np.load(path, allow_pickle=False) as z:
            meta = json.loads(str(z["meta"]))
            config = SimulationConfig(
                beta=float(meta["beta"]), mu=float(meta["mu"]),
                runs=int(meta["runs"]), horizon=int(meta["horizon"]),
                master_seed=int(meta["master_seed"]),
                lambda_ratio=None if meta["lambda_ratio"] == "None"
                else float(meta["lambda_ratio"]))
            return cls(graph_hash=meta["graph_hash"], config=config,
                       seeds=z["seeds"], seed_labels=tuple(z["seed_labels"]),
                       q_t=z["q_t"], q_inf=z["q_inf"],
                       fingerprint=meta["fingerprint"])


def result_fingerprint(g: Graph, config: SimulationConfig) -> str:
    """Cache key: graph content + dynamics + run budget + stream identity."""
    key = "|".join([
        g.content_hash(), f"beta={config.beta!r}", f"mu={config.mu!r}",
        f"runs={config.runs}", f"horizon={config.horizon}",
        f"master_seed={config.master_seed}", f"engine={ENGINE_VERSION}",
        f"rng={RNG_ID}",
    ])
    return hashlib.sha256(key.encode()).hexdigest()


# --------------------------------------------------------------------------
# Single-run reference implementation (pure Python)
# --------------------------------------------------------------------------

def simulate_run(g: Graph, seed_node: int, config: SimulationConfig,
                 rng_stream: RngStream) -> RunResult:
    """One SIR run; the readable reference the compiled kernel must match."""
    if not (0 <= seed_node < g.n):
        raise ParameterError(f"seed node {seed_node} out of range")
    beta, mu = config.beta, config.mu
    state = bytearray(g.n)  # 0 susceptible, 1 infectious, 2 removed
    state[seed_node] = 1
    frontier = [seed_node]
    ever = 1
    counts: list[int] = []
    while frontier:
        nxt: list[int] = []
        for u in frontier:
            for v in g.neighbors(u):
                v = int(v)
                if state[v] == 0 and rng_stream.uniform() < beta:
                    state[v] = 3
                    nxt.append(v)
                    ever += 1
        if mu >= 1.0:
            for u in frontier:
                state[u] = 2
        else:
            for u in frontier:
                if rng_stream.uniform() < mu:
                    state[u] = 2
                else:
                    nxt.append(u)
        for v in nxt:
            state[v] = 1
        counts.append(ever)
        frontier = nxt
    return RunResult(counts=tuple(counts), halting_time=len(counts))


# --------------------------------------------------------------------------
# Compiled kernel
# --------------------------------------------------------------------------

@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


@njit(inline="always")
def _stream_seed(master, node, run):
    s = _mix64(master)
    s = _mix64(s ^ (_U64(node + 1) * _NODE_SALT))
    s = _mix64(s ^ (_U64(run + 1) * _RUN_SALT))
    return s


@njit(cache=True, nogil=True)
def _simulate_seed_block(indptr, indices, n, seeds, lo, hi, beta, mu, runs,
                         horizon, master, qt_sums, qinf_sums):
    """Accumulate ever-infected sums for seeds[lo:hi] into the output rows.

    Serial within the block; callers parallelize over disjoint blocks, which
    cannot change the sums because every (seed, run) pair has its own stream
    and writes only to its own seed row.
    """
    state = np.zeros(n, dtype=np.uint8)
    frontier = np.empty(n, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    for si in range(lo, hi):
        seed = seeds[si]
        for rj in range(runs):
            s = _stream_seed(master, seed, rj)
            state[seed] = 1
            frontier[0] = seed
            fsize = 1
            touched[0] = seed
            ntouched = 1
            ever = 1
            step = 0
            while fsize > 0:
                nsize = 0
                for fi in range(fsize):
                    u = frontier[fi]
                    for p in range(indptr[u], indptr[u + 1]):
                        v = indices[p]
                        if state[v] == 0:
                            s = s + _GOLDEN
                            r = (_mix64(s) >> _U64(11)) * _INV_2_53
                            if r < beta:
                                state[v] = 3
                                nxt[nsize] = v
                                nsize += 1
                                touched[ntouched] = v
                                ntouched += 1
                                ever += 1
                if mu >= 1.0:
                    for fi in range(fsize):
                        state[frontier[fi]] = 2
                else:
                    for fi in range(fsize):
                        u = frontier[fi]
                        s = s + _GOLDEN
                        r = (_mix64(s) >> _U64(11)) * _INV_2_53
                        if r < mu:
                            state[u] = 2
                        else:
                            nxt[nsize] = u
                            nsize += 1
                for i in range(nsize):
                    state[nxt[i]] = 1
                step += 1
                if step <= horizon:
                    qt_sums[si, step - 1] += ever
                frontier, nxt = nxt, frontier
                fsize = nsize
            for t in range(step, horizon):
                qt_sums[si, t] += ever
            qinf_sums[si] += ever
            for i in range(ntouched):
                state[touched[i]] = 0


def _influence_sums(g: Graph, seeds: np.ndarray, config: SimulationConfig,
                    workers: int) -> tuple[np.ndarray, np.ndarray]:
    qt_sums = np.zeros((len(seeds), config.horizon), dtype=np.int64)
    qinf_sums = np.zeros(len(seeds), dtype=np.int64)
    master = _U64(config.master_seed & ((1 << 64) - 1))
    args = (g.indptr, g.indices, g.n, seeds)
    tail = (float(config.beta), float(config.mu), config.runs, config.horizon,
            master, qt_sums, qinf_sums)
    workers = min(workers, len(seeds))
    if workers <= 1:
        _simulate_seed_block(*args, 0, len(seeds), *tail)
        return qt_sums, qinf_sums
    bounds = np.linspace(0, len(seeds), workers + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_simulate_seed_block, *args,
                               int(bounds[w]), int(bounds[w + 1]), *tail)
                   for w in range(workers)]
        for f in futures:
            f.result()
    return qt_sums, qinf_sums


def _influence_sums_python(g: Graph, seeds: np.ndarray,
                           config: SimulationConfig) -> tuple[np.ndarray, np.ndarray]:
    """Same accumulation as the kernel, via simulate_run; used for testing."""
    horizon = config.horizon
    qt = np.zeros((len(seeds), horizon), dtype=np.int64)
    qinf = np.zeros(len(seeds), dtype=np.int64)
    for si, seed in enumerate(seeds):
        for rj in range(config.runs):
            stream = RngStream.for_run(config.master_seed, int(seed), rj)
            run = simulate_run(g, int(seed), config, stream)
            for t in range(1, horizon + 1):
                qt[si, t - 1] += run.counts[min(t, run.halting_time) - 1]
            qinf[si] += run.final_count
    return qt, qinf


def influence_curves(g: Graph, seeds: Sequence[int] | None,
                     config: SimulationConfig,
                     workers: int | None = None) -> InfluenceResult:
    """Monte Carlo influence curves for the given seeds (default: all nodes).

    q(t) is the mean over runs of the ever-infected fraction by step t; q_inf
    averages the final fraction with every run executed to halting, so
    q(t) <= q_inf holds exactly for every t. Worker threads split the seed
    set; the outcome is bit-identical for any worker count.
    """
    if seeds is None:
        seed_arr = np.arange(g.n, dtype=np.int64)
    else:
        seed_arr = np.asarray(sorted(int(s) for s in seeds), dtype=np.int64)
        if len(seed_arr) == 0:
            raise ParameterError("no seeds given")
        if seed_arr[0] < 0 or seed_arr[-1] >= g.n:
            raise ParameterError("seed node out of range")
    qt_sums, qinf_sums = _influence_sums(
        g, seed_arr, config,
        workers if workers is not None else effective_workers())
    denom = float(config.runs * g.n)
    return InfluenceResult(
        graph_hash=g.content_hash(), config=config, seeds=seed_arr,
        seed_labels=tuple(g.labels[int(i)] for i in seed_arr),
        q_t=qt_sums / denom, q_inf=qinf_sums / denom,
        fingerprint=result_fingerprint(g, config))


# --------------------------------------------------------------------------
# Exact oracle for small graphs
# --------------------------------------------------------------------------

def exact_influence_small(g: Graph, seed_node: int, beta: float,
                          mu: float = 1.0, horizon: int = 10
                          ) -> tuple[np.ndarray, float]:
    """Exact q(t) and q(inf) by enumerating the outcome distribution.

    Requires n <= 12 and mu = 1: with one-step infectiousness the process is
    Markov on (frontier set, ever-infected set) and every susceptible node v
    with m infectious neighbors turns infectious with probability
    1 - (1 - beta)^m, independently across v.
    """
    if g.n > 12:
        raise ParameterError(f"exact enumeration limited to 12 nodes, got {g.n}")
    if mu != 1.0:
        raise ParameterError("exact enumeration requires mu = 1")
    if not (0.0 <= beta <= 1.0):
        raise ParameterError(f"beta must be in [0, 1], got {beta}")
    if not (0 <= seed_node < g.n):
        raise ParameterError(f"seed node {seed_node} out of range")

    nbr_masks = [0] * g.n
    for i in range(g.n):
        for j in g.neighbors(i):
            nbr_masks[i] |= 1 << int(j)

    halted_ever = 0.0  # sum of prob * |ever| over halted trajectories

    def advance(states: dict[tuple[int, int], float]) -> dict[tuple[int, int], float]:
        nonlocal halted_ever
        nxt: dict[tuple[int, int], float] = {}
        for (frontier, ever), prob in states.items():
            cand: list[int] = []
            probs: list[float] = []
            for v in range(g.n):
                if ever & (1 << v):
                    continue
                m = (nbr_masks[v] & frontier).bit_count()
                if m > 0:
                    cand.append(v)
                    probs.append(1.0 - (1.0 - beta) ** m)
            for sub in range(1 << len(cand)):
                p = prob
                new_frontier = 0
                for ci, v in enumerate(cand):
                    if sub & (1 << ci):
                        p *= probs[ci]
                        new_frontier |= 1 << v
                    else:
                        p *= 1.0 - probs[ci]
                if p == 0.0:
                    continue
                key = (new_frontier, ever | new_frontier)
                nxt[key] = nxt.get(key, 0.0) + p
        survivors: dict[tuple[int, int], float] = {}
        for (frontier, ever), prob in nxt.items():
            if frontier == 0:
                halted_ever += prob * ever.bit_count()
            else:
                survivors[(frontier, ever)] = prob
        return survivors

    start = 1 << seed_node
    active: dict[tuple[int, int], float] = {(start, start): 1.0}
    q_t = np.empty(horizon, dtype=np.float64)
    for t in range(horizon):
        if active:
            active = advance(active)
        expected = halted_ever
        for (_, ever), prob in active.items():
            expected += prob * ever.bit_count()
        q_t[t] = expected / g.n

    while active:  # mu = 1 guarantees halting within n steps
        active = advance(active)

    return q_t, halted_ever / g.n
