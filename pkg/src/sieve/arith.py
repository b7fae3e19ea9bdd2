"""Factorisation and the elementary arithmetic functions"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Iterable, List, Tuple

import numpy as np

from ..errors import PreconditionError
from .window import primes_up_to, sieve_window

logger = logging.getLogger(__name__)

MAX_FACTOR_INPUT = 1 << 63
TRIAL_FLOOR = 1 << 16
TRIAL_SEGMENT = 1 << 22


@dataclass(frozen=True)
class FactorSignature:
    n: int
    factors: Tuple[Tuple[int, int], ...]

    @property
    def big_omega(self) -> int:
        """Number of prime factors counted with multiplicity"""
        return sum(e for _, e in self.factors)

    @property
    def nu(self) -> int:
        """Number of distinct prime factors"""
        return len(self.factors)

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def tau(self) -> int:
        return math.prod(e + 1 for _, e in self.factors)

    @property
    def squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


@lru_cache(maxsize=4)
def _trial_primes(bound: int) -> List[int]:
    return primes_up_to(bound).tolist()


def _strip(m: int, primes: Iterable[int], factors: List[Tuple[int, int]]) -> Tuple[int, bool]:
    """Divide the primes out of m; True once p * p > m"""
    for p in primes:
        if p * p > m:
            return m, True
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    return m, False


def factorize(n: int) -> FactorSignature:
    """Factor n by trial division.

    The cached primes up to TRIAL_FLOOR go first; larger primes are sieved
    in segments only while the remaining cofactor m still has p * p <= m.
    """
    if n < 1:
        raise PreconditionError(f"factorize needs n >= 1, got {n}")
    if n > MAX_FACTOR_INPUT:
        raise PreconditionError(f"factorize supports n <= 2^63, got {n}")

    factors: List[Tuple[int, int]] = []
    m, done = _strip(n, _trial_primes(TRIAL_FLOOR), factors)
    lo = TRIAL_FLOOR
    if not done and isqrt(m) > 10**8:
        logger.warning(f"Trial division of {n} needs primes up to {isqrt(m)}")
    while not done and lo < isqrt(m):
        length = min(TRIAL_SEGMENT, isqrt(m) - lo)
        m, done = _strip(m, sieve_window(lo, length).primes().tolist(), factors)
        lo += length
    if m > 1:
        factors.append((m, 1))
    return FactorSignature(n, tuple(factors))


def is_almost_prime(n: int, s: int) -> bool:
    """True if n is a P_s, i.e. has at most s prime factors with multiplicity"""
    return factorize(n).big_omega <= s


def _positive(name: str, q: int):
    if q < 1:
        raise PreconditionError(f"{name} needs a positive integer, got {q}")


def totient(q: int) -> int:
    _positive("totient", q)
    result = q
    for p, _ in factorize(q).factors:
        result -= result // p
    return result


def moebius(q: int) -> int:
    _positive("moebius", q)
    sig = factorize(q)
    if not sig.squarefree:
        return 0
    return -1 if sig.nu % 2 else 1


def tau(q: int) -> int:
    _positive("tau", q)
    return factorize(q).tau


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def lcm(a: int, b: int) -> int:
    return math.lcm(a, b)


def divisor_sum(x: int) -> int:
    """D(x) = sum of tau(n) for n <= x, by the hyperbola method"""
    if x < 1:
        raise PreconditionError(f"divisor_sum needs x >= 1, got {x}")
    r = isqrt(x)
    i = np.arange(1, r + 1, dtype=np.int64)
    return 2 * int(np.sum(x // i)) - r * r


def voronoi_residual(x: int) -> float:
    """(D(x) - x log x - (2 gamma - 1) x) / (x^(1/3) log x)"""
    if x < 2:
        raise PreconditionError(f"voronoi_residual needs x >= 2, got {x}")
    log_x = math.log(x)
    main = x * log_x + (2 * np.euler_gamma - 1) * x
    return (divisor_sum(x) - main) / (x ** (1 / 3) * log_x)


def mertens_log_sum(v: float, w: float) -> float:
    """Sum of log p / (p - 2) over primes v <= p <= w, p != 2 (0 when w < 2)"""
    if w < 2:
        return 0.0
    if v < 2 or v > w:
        raise PreconditionError(f"mertens_log_sum needs 2 <= v <= w, got v={v}, w={w}")
    primes = primes_up_to(math.floor(w))
    primes = primes[(primes >= v) & (primes != 2)]
    return math.fsum((np.log(primes) / (primes - 2)).tolist())


def tau_table(limit: int) -> np.ndarray:
    """tau(n) for 0 <= n <= limit by sieving divisors (tau(0) = 0)"""
    table = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        table[d::d] += 1
    return table


def moebius_table(limit: int) -> np.ndarray:
    table = np.ones(limit + 1, dtype=np.int64)
    table[0] = 0
    for p in primes_up_to(limit).tolist():
        table[p::p] *= -1
        table[p * p::p * p] = 0
    return table


def totient_table(limit: int) -> np.ndarray:
    table = np.arange(limit + 1, dtype=np.int64)
    for p in primes_up_to(limit).tolist():
        table[p::p] -= table[p::p] // p
    return table
