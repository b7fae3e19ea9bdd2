"""Prime windows: primality bitsets over (X, X+Y] built by a segmented sieve"""
import logging
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import isqrt
from typing import List, Tuple

import numpy as np
from typing_extensions import Self

from ..errors import CacheCorruptionError, PreconditionError

logger = logging.getLogger(__name__)

# Odd integers per segment
SEGMENT_ODDS = 1 << 20
MAX_END = (1 << 63) - 1

PWIN_MAGIC = b"PWIN"
PWIN_VERSION = 0x01
PWIN_HEADER = struct.Struct("<4sB6xQQ")


@dataclass(frozen=True, eq=False)
class PrimeWindow:
    """Primality of every integer n with base < n <= base + length.

    ``flags[d - 1]`` is set exactly when ``base + d`` is prime.
    """
    base: int
    length: int
    flags: np.ndarray

    def __post_init__(self):
        if self.flags.shape != (self.length,):
            raise PreconditionError(
                f"bitset holds {self.flags.shape[0]} offsets, window length is {self.length}"
            )
        self.flags.setflags(write=False)

    @property
    def end(self) -> int:
        return self.base + self.length

    @cached_property
    def _primes(self) -> np.ndarray:
        found = np.flatnonzero(self.flags).astype(np.int64) + (self.base + 1)
        found.setflags(write=False)
        return found

    def primes(self) -> np.ndarray:
        """Primes in the window, ascending, as int64"""
        return self._primes

    def count(self) -> int:
        return int(self._primes.shape[0])

    def covers(self, lo: int, hi: int) -> bool:
        """True if every integer in [lo, hi] lies inside the window"""
        if lo > hi:
            return True
        return self.base < lo and hi <= self.end

    def is_prime(self, n: int) -> bool:
        if not self.base < n <= self.end:
            raise PreconditionError(f"{n} lies outside the window ({self.base}, {self.end}]")
        return bool(self.flags[n - self.base - 1])

    def is_prime_array(self, values: np.ndarray) -> np.ndarray:
        """Vectorised primality lookup; values below 2 are never prime"""
        values = np.asarray(values, dtype=np.int64)
        inside = (values > self.base) & (values <= self.end)
        small = values < 2
        if not np.all(inside | small):
            missing = values[~(inside | small)]
            raise PreconditionError(
                f"window ({self.base}, {self.end}] does not cover "
                f"[{int(missing.min())}, {int(missing.max())}]"
            )
        result = np.zeros(values.shape, dtype=bool)
        result[inside] = self.flags[values[inside] - self.base - 1]
        return result

    def packed(self) -> bytes:
        """Bitset packed least-significant-bit first by offset"""
        return np.packbits(self.flags, bitorder="little").tobytes()

    def to_bytes(self) -> bytes:
        return PWIN_HEADER.pack(PWIN_MAGIC, PWIN_VERSION, self.base, self.length) + self.packed()

    @classmethod
    def from_bytes(cls, data: bytes) -> Self:
        if len(data) < PWIN_HEADER.size:
            raise CacheCorruptionError(f"file holds {len(data)} bytes, header needs {PWIN_HEADER.size}")
        magic, version, base, length = PWIN_HEADER.unpack_from(data)
        if magic != PWIN_MAGIC:
            raise CacheCorruptionError(f"bad magic {magic!r}")
        if version != PWIN_VERSION:
            raise CacheCorruptionError(f"unsupported version {version}")
        if data[5:11] != bytes(6):
            raise CacheCorruptionError("reserved header bytes are not zero")
        body = data[PWIN_HEADER.size:]
        expected = (length + 7) // 8
        if len(body) != expected:
            raise CacheCorruptionError(f"bitset holds {len(body)} bytes, expected {expected}")
        bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8), bitorder="little")
        if np.any(bits[length:]):
            raise CacheCorruptionError("padding bits after the last offset are set")
        return cls(base, length, bits[:length].astype(bool))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrimeWindow):
            return NotImplemented
        return (self.base == other.base and self.length == other.length
                and np.array_equal(self.flags, other.flags))

    def __hash__(self):
        return hash((self.base, self.length, self.packed()))


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit by a plain sieve of Eratosthenes"""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _sieve_odd_segment(task: Tuple[int, int, np.ndarray]) -> np.ndarray:
    """Flags for the odd integers first, first + 2, ..., first + 2 * (count - 1)"""
    first, count, base_primes = task
    flags = np.ones(count, dtype=bool)
    last = first + 2 * (count - 1)
    for p in base_primes:
        p = int(p)
        if p * p > last:
            break
        start = max(p * p, ((first + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        if start > last:
            continue
        flags[(start - first) // 2::p] = False
    if first == 1:
        flags[0] = False
    return flags


def sieve_window(X: int, Y: int, workers: int = 1) -> PrimeWindow:
    """Sieve the integers n with X < n <= X + Y.

    Odd integers are sieved in segments of SEGMENT_ODDS by the odd primes up
    to sqrt(X + Y); 2 is set directly. Segments are independent, so with
    workers > 1 they run in a process pool and are reassembled in order.

    X + Y is capped at 2^63 - 1 rather than 2^64 - 1: offsets and the
    primes handed back are signed 64-bit numpy integers.
    """
    if X < 0:
        raise PreconditionError(f"X must be >= 0, got {X}")
    if Y < 1:
        raise PreconditionError(f"Y must be >= 1, got {Y}")
    if X + Y > MAX_END:
        raise PreconditionError(f"X + Y = {X + Y} overflows the supported range (< 2^63)")

    lo, hi = X + 1, X + Y
    flags = np.zeros(Y, dtype=bool)

    odd_first = lo if lo % 2 else lo + 1
    odd_last = hi if hi % 2 else hi - 1
    if odd_last >= odd_first:
        total = (odd_last - odd_first) // 2 + 1
        base_primes = simple_sieve(isqrt(hi))[1:]
        tasks: List[Tuple[int, int, np.ndarray]] = []
        for offset in range(0, total, SEGMENT_ODDS):
            count = min(SEGMENT_ODDS, total - offset)
            tasks.append((odd_first + 2 * offset, count, base_primes))

        logger.info(f"Sieving ({X}, {hi}] in {len(tasks)} segment(s) with {len(base_primes)} base primes")
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                segments = list(executor.map(_sieve_odd_segment, tasks))
        else:
            segments = [_sieve_odd_segment(task) for task in tasks]

        flags[odd_first - lo::2] = np.concatenate(segments)

    if lo <= 2 <= hi:
        flags[2 - lo] = True

    return PrimeWindow(X, Y, flags)


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> np.ndarray:
    """Cached ascending primes <= limit"""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    return sieve_window(0, limit).primes()
