"""
In-memory cache for computed results (spectra served over HTTP)
"""
from datetime import datetime, timedelta
from typing import Any, Optional
import hashlib
import json

from app.config import get_settings


class ResultCache:
    """TTL cache with a cap on entries; the oldest entry is evicted first"""

    def __init__(self, default_ttl: int = 600, max_entries: int = 32):
        self.cache = {}
        self.default_ttl = default_ttl
        self.max_entries = max_entries

    def _generate_key(self, prefix: str, **kwargs) -> str:
        """md5 of the prefix and the sorted keyword arguments"""
        key_data = {"prefix": prefix, "kwargs": sorted(kwargs.items())}
        key_string = json.dumps(key_data, sort_keys=True, default=str)
        return f"{prefix}:{hashlib.md5(key_string.encode()).hexdigest()}"

    def get(self, prefix: str, **kwargs) -> Optional[Any]:
        key = self._generate_key(prefix, **kwargs)
        if key in self.cache:
            value, expiry = self.cache[key]
            if datetime.now() < expiry:
                return value
            del self.cache[key]
        return None

    def set(self, prefix: str, value: Any, ttl: Optional[int] = None, **kwargs):
        key = self._generate_key(prefix, **kwargs)
        self.cache.pop(key, None)
        while len(self.cache) >= self.max_entries:
            # dicts keep insertion order
            del self.cache[next(iter(self.cache))]
        expiry = datetime.now() + timedelta(seconds=ttl or self.default_ttl)
        self.cache[key] = (value, expiry)

    def clear(self, prefix: Optional[str] = None):
        if prefix:
            for key in [k for k in self.cache if k.startswith(f"{prefix}:")]:
                del self.cache[key]
        else:
            self.cache.clear()

    def cleanup_expired(self):
        now = datetime.now()
        for key in [k for k, (_, expiry) in self.cache.items() if now >= expiry]:
            del self.cache[key]

    def __len__(self) -> int:
        return len(self.cache)


_settings = get_settings()
cache = ResultCache(default_ttl=_settings.cache_ttl, max_entries=_settings.cache_max_entries)
