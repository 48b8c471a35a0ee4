"""On-disk cache of minimal resolutions.

One JSON file per key, named by the SHA-256 of the canonical key, plus a
plain-text index of ``hash<TAB>key`` lines. Files are written to a temporary
name and renamed into place, so concurrent writers of the same key leave one
intact file. Anything unreadable or carrying another version tag is a miss.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Optional, Union

from .proj_modules import ModulePresentation
from .resolution import Generator, Resolution, ResolutionStage, resolve_minimal

log = logging.getLogger(__name__)

CACHE_VERSION = "vbcensus-resolution-1"
ENV_VAR = "VBCENSUS_CACHE_DIR"
DEFAULT_DIRNAME = ".vbcensus-cache"
INDEX_NAME = "index.txt"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else Path.cwd() / DEFAULT_DIRNAME


def resolution_key(m: ModulePresentation, t_max: int, s_max: int, degree_cap: int) -> dict:
    return {
        "prime": m.prime,
        "module": m.descriptor(),
        "degrees": list(m.degrees),
        "actions": sorted([name, i, sorted(v.items())] for (name, i), v in m.actions.items()),
        "t_max": t_max,
        "s_max": s_max,
        "degree_cap": degree_cap,
    }


def _canonical(key: dict) -> str:
    return json.dumps(key, sort_keys=True, separators=(",", ":"))


def key_hash(key: dict) -> str:
    return hashlib.sha256(_canonical(key).encode()).hexdigest()


def _encode(res: Resolution) -> list:
    stages = []
    for st in res.stages:
        diffs = []
        for d in st.differential:
            if st.s == 0:
                diffs.append([[int(i), int(c)] for i, c in sorted(d.items())])
            else:
                diffs.append([[int(gi), list(mono), int(c)] for (gi, mono), c in sorted(d.items())])
        stages.append({"s": st.s, "generators": [[g.name, g.t] for g in st.generators], "differential": diffs})
    return stages


def _decode(data: list, module: ModulePresentation, t_max: int, s_max: int, cap: int) -> Resolution:
    stages = []
    for st in data:
        s = st["s"]
        gens = [Generator(name, s, t) for name, t in st["generators"]]
        diffs = []
        for d in st["differential"]:
            if s == 0:
                diffs.append({i: c for i, c in d})
            else:
                diffs.append({(gi, tuple(mono)): c for gi, mono, c in d})
        if len(diffs) != len(gens):
            raise ValueError("generator and differential counts differ")
        stages.append(ResolutionStage(s, gens, diffs))
    return Resolution(module, t_max, s_max, stages, cap)


def cache_store(key: dict, res: Resolution, cache_dir: Optional[Union[str, Path]] = None) -> Path:
    root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    root.mkdir(parents=True, exist_ok=True)
    h = key_hash(key)
    payload = {"version": CACHE_VERSION, "key": key, "stages": _encode(res)}
    target = root / f"{h}.json"
    fd, tmp = tempfile.mkstemp(dir=root, prefix=f".{h}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    with open(root / INDEX_NAME, "a") as fh:
        fh.write(f"{h}\t{_canonical(key)}\n")
    return target


def cache_load(key: dict, module: ModulePresentation, cache_dir: Optional[Union[str, Path]] = None) -> Optional[Resolution]:
    root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    path = root / f"{key_hash(key)}.json"
    try:
        with open(path) as fh:
            payload = json.load(fh)
        if payload.get("version") != CACHE_VERSION or payload.get("key") != json.loads(_canonical(key)):
            log.info("cache entry %s has a stale version or key; ignoring", path.name)
            return None
        return _decode(payload["stages"], module, key["t_max"], key["s_max"], key["degree_cap"])
    except FileNotFoundError:
        return None
    except (OSError, ValueError, KeyError, TypeError) as exc:
        log.info("cache entry %s unreadable (%s); ignoring", path.name, exc)
        return None


def cache_info(cache_dir: Optional[Union[str, Path]] = None) -> dict:
    root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    files = sorted(root.glob("*.json")) if root.exists() else []
    return {
        "path": str(root),
        "entries": len(files),
        "bytes": sum(f.stat().st_size for f in files),
        "version": CACHE_VERSION,
    }


def cache_clear(cache_dir: Optional[Union[str, Path]] = None) -> int:
    root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    if not root.exists():
        return 0
    count = 0
    for f in root.glob("*.json"):
        f.unlink()
        count += 1
    idx = root / INDEX_NAME
    if idx.exists():
        idx.unlink()
    return count


def resolve_cached(
    m: ModulePresentation,
    t_max: int,
    s_max: int,
    degree_cap: int,
    cache_dir: Optional[Union[str, Path]] = None,
    use_cache: bool = True,
) -> Resolution:
    """Load a resolution from disk or compute and store it."""
    if not use_cache or m.is_empty:
        return resolve_minimal(m, t_max, s_max, degree_cap)
    key = resolution_key(m, t_max, s_max, degree_cap)
    hit = cache_load(key, m, cache_dir)
    if hit is not None:
        return hit
    res = resolve_minimal(m, t_max, s_max, degree_cap)
    try:
        cache_store(key, res, cache_dir)
    except OSError as exc:
        log.warning("could not write cache entry: %s", exc)
    return res
