"""Dataset registry and integrity-checked fetching.

The benchmark networks are public edge lists. Five desk-scale networks ship
with the repository under data/; the remaining entries carry their canonical
download URLs and can be fetched when the network is reachable. The `vidal`
interactome has no stable public URL and is treated as local-file-only.
"""
from __future__ import annotations

import hashlib
import json
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .errors import FetchError, IntegrityError


@dataclass(frozen=True)
class DatasetSource:
    name: str
    filename: str
    url: str | None
    sha256: str | None = None
    bundled: bool = False


REGISTRY: dict[str, DatasetSource] = {s.name: s for s in [
    DatasetSource("arenas-email", "arenas-email.txt",
                  "http://konect.cc/files/download.tsv.arenas-email.tar.bz2",
                  bundled=True),
    DatasetSource("petster-hamster", "petster-hamster.txt",
                  "http://konect.cc/files/download.tsv.petster-hamster.tar.bz2",
                  bundled=True),
    DatasetSource("yeast", "yeast.txt",
                  "http://www.linkprediction.org/index.php/link/resource/data",
                  bundled=True),
    DatasetSource("route-views", "route-views.txt",
                  "https://snap.stanford.edu/data/as20000102.txt.gz",
                  bundled=True),
    DatasetSource("arenas-pgp", "arenas-pgp.txt",
                  "http://konect.cc/files/download.tsv.arenas-pgp.tar.bz2",
                  bundled=True),
    DatasetSource("ca-astroph", "ca-astroph.txt",
                  "http://konect.cc/files/download.tsv.ca-AstroPh.tar.bz2"),
    DatasetSource("reactome", "reactome.txt",
                  "http://konect.cc/files/download.tsv.reactome.tar.bz2"),
    DatasetSource("human-protein", "human-protein.txt",
                  "http://konect.cc/files/download.tsv.maayan-vidal.tar.bz2"),
    DatasetSource("stelzl", "stelzl.txt",
                  "https://networkrepository.com/maayan-Stelzl.php"),
    DatasetSource("vidal", "vidal.txt", None),  # local-file-only
    DatasetSource("amazon", "amazon.txt",
                  "http://konect.cc/files/download.tsv.com-amazon.tar.bz2"),
    DatasetSource("cond-mat", "cond-mat.txt",
                  "http://networkscience.cn/index.php/data/"),
    DatasetSource("email-enron", "email-enron.txt",
                  "http://networkscience.cn/index.php/data/"),
    DatasetSource("facebook", "facebook.txt",
                  "http://networkscience.cn/index.php/data/"),
]}


def data_dir() -> Path:
    """Repository data directory holding the bundled networks."""
    return Path(__file__).resolve().parents[2] / "data"


def resolve_dataset(name_or_path: str, search_dir: Path | None = None) -> Path:
    """Map a registry name or a filesystem path to an edge-list file."""
    p = Path(name_or_path)
    if p.exists():
        return p
    base = search_dir if search_dir is not None else data_dir()
    entry = REGISTRY.get(name_or_path)
    if entry is not None:
        candidate = base / entry.filename
        if candidate.exists():
            return candidate
        raise FetchError(
            f"dataset {name_or_path!r} not found at {candidate}; "
            + ("fetch it first" if entry.url else "this dataset is local-file-only"))
    raise FetchError(f"unknown dataset {name_or_path!r} and no such file")


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _read_lockfile(lockfile: Path) -> dict[str, str]:
    if lockfile.exists():
        return json.loads(lockfile.read_text())
    return {}


def fetch_dataset(url: str, destination: str | Path,
                  lockfile: str | Path | None = None,
                  timeout: float = 60.0) -> Path:
    """Download a raw dataset file, recording and verifying its hash.

    A destination whose hash matches the lockfile entry is left untouched.
    A hash mismatch (existing file or fresh download) raises IntegrityError;
    network failures raise FetchError.
    """
    destination = Path(destination)
    lockfile = Path(lockfile) if lockfile is not None else destination.parent / "datasets.lock.json"
    lock = _read_lockfile(lockfile)
    key = destination.name

    if destination.exists() and key in lock:
        actual = sha256_file(destination)
        if actual == lock[key]:
            return destination  # no-op re-fetch
        raise IntegrityError(
            f"{destination} hash {actual} does not match lockfile {lock[key]}")

    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            payload = resp.read()
    except (urllib.error.URLError, OSError, ValueError) as exc:
        raise FetchError(f"failed to fetch {url}: {exc}") from exc

    digest = hashlib.sha256(payload).hexdigest()
    if key in lock and lock[key] != digest:
        raise IntegrityError(
            f"downloaded {url} hash {digest} does not match lockfile {lock[key]}")

    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_bytes(payload)
    lock[key] = digest
    lockfile.write_text(json.dumps(lock, indent=2, sort_keys=True) + "\n")
    return destination
