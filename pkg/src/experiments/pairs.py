"""Windowed binary sums over primes and the AP error term"""
import logging
import math
from typing import Optional

import numpy as np

from ..errors import PreconditionError
from ..sieve import PrimeWindow, PrimeCache, sieve_window, totient

logger = logging.getLogger(__name__)


def fetch_window(X: int, Y: int, cache: Optional[PrimeCache] = None, workers: int = 1) -> PrimeWindow:
    """(X, X+Y] from the cache when one is given, else a fresh sieve"""
    if cache is not None:
        return cache.window(X, Y)
    return sieve_window(X, Y, workers=workers)


def covering_window(lo: int, hi: int, cache: Optional[PrimeCache] = None,
                    workers: int = 1) -> Optional[PrimeWindow]:
    """Window containing every integer of [max(lo, 2), hi]; None when that range is empty"""
    lo = max(lo, 2)
    if hi < lo:
        return None
    return fetch_window(lo - 1, hi - lo + 1, cache, workers)


def require_coverage(aux: Optional[PrimeWindow], values: np.ndarray, what: str = "p3"):
    """Reject if the prime candidates >= 2 among values are not all inside aux"""
    needed = values[values >= 2]
    if needed.size == 0:
        return
    lo, hi = int(needed.min()), int(needed.max())
    if aux is None or not aux.covers(lo, hi):
        have = "no window" if aux is None else f"({aux.base}, {aux.end}]"
        logger.error(f"{what} range [{lo}, {hi}] not covered by {have}")
        raise PreconditionError(f"auxiliary window must cover {what} in [{lo}, {hi}], have {have}")


def _pair_sum(r: int, window2: PrimeWindow, q: int, a: int, weighted: bool,
              aux: Optional[PrimeWindow], twin: bool) -> float:
    if q < 1:
        raise PreconditionError(f"modulus must be positive, got {q}")
    p2 = window2.primes()
    p2 = p2[(p2 - a) % q == 0]
    p3 = p2 - r if twin else r - p2
    aux = window2 if aux is None else aux
    require_coverage(aux, p3)
    hit = (p3 >= 2)
    if np.any(hit):
        hit[hit] = aux.is_prime_array(p3[hit])
    if not weighted:
        return float(np.count_nonzero(hit))
    return math.fsum((np.log(p2[hit]) * np.log(p3[hit])).tolist())


def goldbach_pairs(r: int, window2: PrimeWindow, q: int = 1, a: int = 0, weighted: bool = True,
                   aux: Optional[PrimeWindow] = None) -> float:
    """Sum over p2 in window2, p2 = a (q), p3 = r - p2 prime, of log p2 log p3 (or 1)"""
    return _pair_sum(r, window2, q, a, weighted, aux, twin=False)


def twin_pairs(r: int, window2: PrimeWindow, q: int = 1, a: int = 0, weighted: bool = True,
               aux: Optional[PrimeWindow] = None) -> float:
    """As goldbach_pairs with p3 = p2 - r"""
    return _pair_sum(r, window2, q, a, weighted, aux, twin=True)


def ap_main_term(Y: float, q: int, a: int) -> float:
    """Y / phi(q) for reduced residues, 0 otherwise"""
    return Y / totient(q) if math.gcd(a, q) == 1 else 0.0


def ap_error(X: int, Y: int, q: int, a: int, window: Optional[PrimeWindow] = None) -> float:
    """Sum of log p over p in (X, X+Y], p = a (q), minus the main term"""
    if q < 1:
        raise PreconditionError(f"modulus must be positive, got {q}")
    if window is None:
        window = sieve_window(X, Y)
    elif not window.covers(X + 1, X + Y):
        raise PreconditionError(f"window ({window.base}, {window.end}] does not cover ({X}, {X + Y}]")
    p = window.primes()
    p = p[(p > X) & (p <= X + Y) & ((p - a) % q == 0)]
    return math.fsum(np.log(p).tolist()) - ap_main_term(Y, q, a)
