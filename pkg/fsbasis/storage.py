import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Dict, Optional

from fsbasis import __version__

log = logging.getLogger(__name__)

DEFAULT_CACHE_DIR = ".fs-basis-cache"


def cache_key(kind: str, ell: int, weight: Optional[str], degree: Optional[int]) -> str:
    raw = json.dumps([__version__, kind, ell, weight, degree])
    return hashlib.sha256(raw.encode()).hexdigest()


class ResultCache:
    """Report payloads keyed by job; memory first, then JSON files under the cache root."""

    def __init__(self, root: Optional[str] = None):
        self._root = root
        self.results: Dict[str, dict] = {}

    @property
    def root(self) -> Path:
        return Path(self._root or os.environ.get("FS_CACHE_DIR") or DEFAULT_CACHE_DIR)

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> Optional[dict]:
        if key in self.results:
            return self.results[key]
        path = self._path(key)
        if not path.exists():
            return None
        try:
            payload = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            log.warning("ignoring unreadable cache entry %s: %s", path, exc)
            return None
        log.debug("cache hit %s", key[:12])
        self.results[key] = payload
        return payload

    def put(self, key: str, payload: dict) -> dict:
        self.results[key] = payload
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            self._path(key).write_text(json.dumps(payload, sort_keys=True))
        except OSError as exc:
            log.warning("could not write cache entry %s: %s", key[:12], exc)
        return payload

    def clear(self) -> None:
        self.results.clear()


cache = ResultCache()
