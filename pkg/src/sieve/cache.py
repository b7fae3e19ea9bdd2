import logging
import os
from pathlib import Path
from typing import Optional

from ..config.settings import PRIME_CACHE_DIR
from ..errors import CacheCorruptionError
from .window import PrimeWindow, sieve_window

logger = logging.getLogger(__name__)


class PrimeCache:
 # Manager for PWIN files, one per sieved window
    def __init__(self, cache_dir: Optional[str] = None, workers: int = 1):
        self.cache_dir = Path(cache_dir or PRIME_CACHE_DIR)
        self.workers = workers

    def path_for(self, X: int, Y: int) -> Path:
        """Location of the cache file for the window (X, X+Y]"""
        return self.cache_dir / f"pwin_{X}_{Y}.bin"

    def build(self, X: int, Y: int) -> PrimeWindow:
        """Sieve the window and write its PWIN file, replacing any old one"""
        window = sieve_window(X, Y, workers=self.workers)
        path = self.path_for(X, Y)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(window.to_bytes())
        os.replace(tmp, path)
        logger.info(f"Cached {window.count()} primes of ({X}, {X + Y}] at {path}")
        return window

    def load(self, X: int, Y: int) -> Optional[PrimeWindow]:
        """Read a cached window; None if it was never built"""
        path = self.path_for(X, Y)
        if not path.exists():
            return None
        window = PrimeWindow.from_bytes(path.read_bytes())
        if (window.base, window.length) != (X, Y):
            raise CacheCorruptionError(
                f"{path} holds ({window.base}, {window.end}], expected ({X}, {X + Y}]"
            )
        return window

    def window(self, X: int, Y: int) -> PrimeWindow:
        """Cached window if present, else sieve and store it"""
        cached = self.load(X, Y)
        if cached is not None:
            logger.debug(f"Cache hit for ({X}, {X + Y}]")
            return cached
        return self.build(X, Y)

    def verify(self, X: int, Y: int) -> bool:
        """Re-sieve the window and byte-compare it with the stored file"""
        path = self.path_for(X, Y)
        if not path.exists():
            raise CacheCorruptionError(f"No cache file at {path}")
        stored = path.read_bytes()
        PrimeWindow.from_bytes(stored)
        fresh = sieve_window(X, Y, workers=self.workers).to_bytes()
        if stored != fresh:
            raise CacheCorruptionError(f"{path} differs from a fresh sieve of ({X}, {X + Y}]")
        logger.info(f"Verified {path}")
        return True

    def purge(self, X: Optional[int] = None, Y: Optional[int] = None) -> int:
        """Delete one cache file, or every PWIN file when no window is given"""
        if X is not None and Y is not None:
            targets = [self.path_for(X, Y)]
        elif self.cache_dir.is_dir():
            targets = sorted(self.cache_dir.glob("pwin_*.bin"))
        else:
            targets = []

        removed = 0
        for path in targets:
            if path.exists():
                path.unlink()
                removed += 1
        logger.info(f"Purged {removed} cache file(s) from {self.cache_dir}")
        return removed


# Global instance
prime_cache = PrimeCache()
