"""Download and cache the published corpora this package works with.

The manifest pins one canonical URL and a sha256 digest per (dataset,
split). Files are cached under a single directory and verified against
the digest both after download and on every cache hit, so a corrupted
cache heals itself and a changed upstream file is rejected instead of
silently parsed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from importlib import resources
from pathlib import Path

import requests
from filelock import FileLock

from .corpus import Corpus, parse_squad_json
from .errors import IntegrityError, TransportError, UsageError

logger = logging.getLogger(__name__)

# Environment overrides. The mirror variable replaces the leading
# "https://github.com/" of every manifest URL, for hosts that can only
# reach a proxy of it.
CACHE_ENV = "TRQG_CACHE_DIR"
MIRROR_ENV = "TRQG_DATASET_MIRROR"

_GITHUB_PREFIX = "https://github.com/"
_CHUNK = 1 << 16


def _manifest() -> dict:
    with resources.files("trqg.data").joinpath("datasets.json").open(
        "r", encoding="utf-8"
    ) as handle:
        return json.load(handle)


def available_datasets() -> dict[str, list[str]]:
    """Map each known dataset name to its available splits."""
    return {name: sorted(entry["splits"]) for name, entry in _manifest().items()}


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    xdg = os.environ.get("XDG_CACHE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".cache"
    return base / "trqg" / "datasets"


def _resolve(name: str, split: str) -> dict:
    manifest = _manifest()
    if name not in manifest:
        known = ", ".join(sorted(manifest))
        raise UsageError(f"unknown dataset {name!r}; known datasets: {known}")
    splits = manifest[name]["splits"]
    if split not in splits:
        known = ", ".join(sorted(splits))
        raise UsageError(
            f"dataset {name!r} has no split {split!r}; known splits: {known}"
        )
    return splits[split]


def _rewrite(url: str) -> str:
    mirror = os.environ.get(MIRROR_ENV)
    if mirror and url.startswith(_GITHUB_PREFIX):
        return mirror.rstrip("/") + "/" + url[len(_GITHUB_PREFIX) :]
    return url


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(_CHUNK), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _download(url: str, target: Path, expected_sha256: str) -> None:
    try:
        response = requests.get(url, stream=True, timeout=60)
    except (requests.ConnectionError, requests.Timeout) as err:
        raise TransportError(f"could not fetch {url}: {err}") from err
    if response.status_code != 200:
        raise TransportError(f"fetch of {url} returned HTTP {response.status_code}")

    digest = hashlib.sha256()
    fd, tmp_name = tempfile.mkstemp(dir=target.parent, suffix=".part")
    tmp = Path(tmp_name)
    try:
        with os.fdopen(fd, "wb") as handle:
            for chunk in response.iter_content(_CHUNK):
                handle.write(chunk)
                digest.update(chunk)
        actual = digest.hexdigest()
        if actual != expected_sha256:
            raise IntegrityError(
                f"digest mismatch for {url}: expected {expected_sha256}, got {actual}"
            )
        os.replace(tmp, target)
    finally:
        tmp.unlink(missing_ok=True)


def fetch_dataset(name: str, split: str, cache_dir: Path | str | None = None) -> Path:
    """Return the local path of a dataset file, downloading it if needed.

    A cached file whose digest matches the manifest is returned without
    network I/O. Concurrent fetches of the same file are serialized with
    an advisory lock; the download is written to a temp file and moved
    into place atomically, so readers never observe a partial file.
    """
    entry = _resolve(name, split)
    directory = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / f"{name}-{split}.json"

    with FileLock(str(target) + ".lock"):
        if target.exists():
            if _sha256(target) == entry["sha256"]:
                return target
            logger.warning("cached %s failed digest check, refetching", target.name)
            target.unlink()
        _download(_rewrite(entry["url"]), target, entry["sha256"])
    return target


def load_dataset(name: str, split: str, cache_dir: Path | str | None = None) -> Corpus:
    """Fetch a dataset and parse it into a Corpus."""
    path = fetch_dataset(name, split, cache_dir)
    return parse_squad_json(path.read_bytes())
