"""Euler-product forms of the binary and ternary singular series"""
import logging
import math
from dataclasses import dataclass, asdict
from functools import lru_cache
from typing import Iterable, Optional, Set

import numpy as np

from ..config.settings import P_MAX
from ..errors import PreconditionError
from ..sieve import factorize, totient, primes_up_to

logger = logging.getLogger(__name__)

# Tail of a product whose factors are 1 + O(1/p^2)
TAIL_CONSTANT = 4.0


@dataclass(frozen=True)
class SingularValue:
    value: float
    tail_bound: float
    prime_cutoff: Optional[int] = None
    series_cutoff: Optional[int] = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise PreconditionError(f"singular value is not finite: {self.value}")
        if self.tail_bound < 0:
            raise PreconditionError(f"tail bound must be >= 0, got {self.tail_bound}")

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class ResidueClass:
    a: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise PreconditionError(f"modulus must be positive, got {self.q}")
        object.__setattr__(self, "a", self.a % self.q)

    @property
    def reduced(self) -> bool:
        return math.gcd(self.a, self.q) == 1


def product_tail(P_max: int) -> float:
    return TAIL_CONSTANT / (P_max * math.log(P_max))


def _check_cutoff(P_max: int):
    if P_max < 3:
        raise PreconditionError(f"P_max must be >= 3, got {P_max}")


def _exact_zero(P_max: int) -> SingularValue:
    return SingularValue(0.0, 0.0, prime_cutoff=P_max)


def _prime_divisors(*values: int) -> Set[int]:
    """Distinct primes dividing any of the non-zero values"""
    primes: Set[int] = set()
    for v in values:
        if v != 0:
            primes.update(factorize(abs(v)).primes)
    return primes


def _twin_factor(p: int) -> float:
    return 1 - 1 / (p - 1) ** 2


def _cubic_factor(p: int) -> float:
    return 1 + 1 / (p - 1) ** 3


@lru_cache(maxsize=8)
def twin_log_sum(P_max: int) -> float:
    """Sum of log(1 - 1/(p-1)^2) over odd primes p <= P_max"""
    p = primes_up_to(P_max)[1:].astype(np.float64)
    return math.fsum(np.log1p(-1 / (p - 1) ** 2).tolist())


@lru_cache(maxsize=8)
def cubic_log_sum(P_max: int) -> float:
    """Sum of log(1 + 1/(p-1)^3) over all primes p <= P_max"""
    p = primes_up_to(P_max).astype(np.float64)
    return math.fsum(np.log1p(1 / (p - 1) ** 3).tolist())


def _product(log_terms: Iterable[float], scale: float) -> float:
    return scale * math.exp(math.fsum(log_terms))


def binary_sing(r: int, P_max: int = P_MAX) -> SingularValue:
    """Twin/Goldbach constant 2 prod (1 - 1/(p-1)^2) prod_{p | r} (p-1)/(p-2)"""
    _check_cutoff(P_max)
    if r == 0:
        raise PreconditionError("binary_sing is undefined at r = 0")
    if r % 2:
        return _exact_zero(P_max)

    terms = [twin_log_sum(P_max)]
    for p in sorted(_prime_divisors(r) - {2}):
        terms.append(math.log((p - 1) / (p - 2)))
    return SingularValue(_product(terms, 2.0), product_tail(P_max), prime_cutoff=P_max)


def binary_sing_ap(r: int, q: int, a: int, P_max: int = P_MAX) -> SingularValue:
    """S(r, q, a): S(rq) / phi(q) when 2 | r and (a, q) = (a - r, q) = 1, else 0"""
    _check_cutoff(P_max)
    if q < 1:
        raise PreconditionError(f"modulus must be positive, got {q}")
    if r % 2 or math.gcd(a, q) != 1 or math.gcd(a - r, q) != 1:
        return _exact_zero(P_max)
    full = binary_sing(r * q, P_max)
    return SingularValue(full.value / totient(q), full.tail_bound / totient(q), prime_cutoff=P_max)


def ternary_one_ap(n: int, q: int, a: int, P_max: int = P_MAX) -> SingularValue:
    """T(n, q, a) for n = p1 + p2 + p3 with p1 = a (mod q).

    Non-reduced residues give 0.
    """
    _check_cutoff(P_max)
    if q < 1:
        raise PreconditionError(f"modulus must be positive, got {q}")
    if n < 1:
        raise PreconditionError(f"ternary target must be positive, got {n}")
    if math.gcd(a, q) != 1:
        return _exact_zero(P_max)

    terms = [cubic_log_sum(P_max)]
    for p in sorted(_prime_divisors(n, q)):
        if p <= P_max:
            terms.append(-math.log(_cubic_factor(p)))
        if q % p == 0:
            if (n - a) % p == 0:
                factor = p / (p - 1)
            else:
                factor = _twin_factor(p)
        else:
            # p | n
            factor = _twin_factor(p)
        if factor == 0:
            return _exact_zero(P_max)
        terms.append(math.log(factor))

    return SingularValue(_product(terms, 1 / totient(q)), product_tail(P_max), prime_cutoff=P_max)


def ternary_two_ap(n: int, q1: int, a1: int, q2: int, a2: int,
                   P_max: int = P_MAX, printed: bool = True) -> SingularValue:
    """T(n, q1, a1, q2, a2) for p1 = a1 (mod q1), p2 = a2 (mod q2).

    The printed Euler form carries a leading 1/2; with printed=False it is
    dropped, which is the value the G-sum series converges to.
    """
    _check_cutoff(P_max)
    if q1 < 1 or q2 < 1:
        raise PreconditionError(f"moduli must be positive, got q1={q1}, q2={q2}")
    if n < 1:
        raise PreconditionError(f"ternary target must be positive, got {n}")
    if math.gcd(math.gcd(q1, q2), n - a1 - a2) > 1:
        return _exact_zero(P_max)
    if math.gcd(a1, q1) != 1 or math.gcd(a2, q2) != 1:
        return _exact_zero(P_max)

    terms = [cubic_log_sum(P_max)]
    for p in sorted(_prime_divisors(n, q1, q2)):
        if p <= P_max:
            terms.append(-math.log(_cubic_factor(p)))
        in_q1, in_q2 = q1 % p == 0, q2 % p == 0
        if in_q1 and in_q2:
            # (F); p | n - a1 - a2 was excluded above
            factor = p / (p - 1)
        elif in_q1:
            factor = p / (p - 1) if (n - a1) % p == 0 else _twin_factor(p)
        elif in_q2:
            factor = p / (p - 1) if (n - a2) % p == 0 else _twin_factor(p)
        else:
            # (A)
            factor = _twin_factor(p)
        if factor == 0:
            return _exact_zero(P_max)
        terms.append(math.log(factor))

    scale = 1 / (totient(q1) * totient(q2))
    if printed:
        scale /= 2
    return SingularValue(_product(terms, scale), product_tail(P_max), prime_cutoff=P_max)
