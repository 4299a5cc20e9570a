import os
import sys
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = REPO_ROOT / "data"

sys.path.insert(0, str(Path(__file__).parent))  # for `oracles`

from spreadbench.graphs import Graph, graph_from_edges, load_graph  # noqa: E402


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def p3() -> Graph:
    return graph_from_edges([(0, 1), (1, 2)])


@pytest.fixture
def s4() -> Graph:
    """Star: hub 0 with three leaves."""
    return graph_from_edges([(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def triangle() -> Graph:
    return graph_from_edges([(0, 1), (1, 2), (0, 2)])


@pytest.fixture(scope="session")
def arenas_email() -> Graph:
    return load_graph(DATA_DIR / "arenas-email.txt")


def subprocess_env() -> dict:
    """Environment for CLI subprocesses: src/ on PYTHONPATH."""
    env = dict(os.environ)
    src = str(REPO_ROOT / "src")
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    return env


def write_random_edge_list(path: Path, n: int, p: float, seed: int) -> None:
    rng = np.random.default_rng(seed)
    with path.open("w") as fh:
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    fh.write(f"{i} {j}\n")
