"""Sieve density omega(d) for the almost-twin sieve and its checks"""
import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import List

import numpy as np

from ..errors import PreconditionError
from ..sieve import factorize, totient, primes_up_to

logger = logging.getLogger(__name__)


def _divisors(primes: List[int]) -> List[int]:
    """Divisors of a squarefree number given its primes"""
    return [math.prod(c) for k in range(len(primes) + 1) for c in combinations(primes, k)]


def _check_odd_squarefree(d: int):
    if d < 1 or d % 2 == 0:
        raise PreconditionError(f"omega_d needs a positive odd d, got {d}")
    if not factorize(d).squarefree:
        raise PreconditionError(f"omega_d needs a squarefree d, got {d}")


def omega_d(d: int, n: int) -> Fraction:
    """omega(d) by the divisor double sum over t | d, s | d/t"""
    _check_odd_squarefree(d)
    primes = list(factorize(d).primes)
    total = Fraction(0)

    for t in _divisors(primes):
        for s in _divisors([p for p in primes if (d // t) % p == 0]):
            mu = -1 if len(factorize(s).factors) % 2 else 1
            st, dt = s * t, d // t
            term = Fraction(mu, totient(st) * totient(dt))
            for p in primes:
                in_st, in_dt = st % p == 0, dt % p == 0
                twin = 1 - Fraction(1, (p - 1) ** 2)
                if (n + 2) % p and in_st != in_dt:
                    term *= twin
                if n % p == 0:
                    term /= twin
                else:
                    term /= 1 + Fraction(1, (p - 1) ** 3)
                if ((n + 2) % p == 0 and in_st != in_dt) or ((n + 4) % p and in_st and in_dt):
                    term *= Fraction(p, p - 1)
            total += term

    return d * total


def _check_odd_prime(ell: int):
    if ell < 3 or ell % 2 == 0 or factorize(ell).factors != ((ell, 1),):
        raise PreconditionError(f"expected an odd prime, got {ell}")


def omega_prime_case(ell: int, n: int) -> Fraction:
    """Closed form of omega(ell) selected by which of n, n+2, n+4 ell divides"""
    _check_odd_prime(ell)
    cube = (ell - 1) ** 3 + 1
    if n % ell == 0:
        return Fraction(ell * (2 * ell - 5), (ell - 1) * (ell - 2))
    if (n + 2) % ell == 0:
        return Fraction(ell * ell * (2 * ell - 3), cube)
    if (n + 4) % ell == 0:
        return Fraction(ell * (2 * ell * ell - 5 * ell + 1), cube)
    return Fraction(ell * (2 * ell * ell - 5 * ell), cube)


def printed_case_one(ell: int) -> Fraction:
    """The case ell | n entry as printed, 2 ell/(ell-2) - 1/(ell-1)"""
    _check_odd_prime(ell)
    return Fraction(2 * ell, ell - 2) - Fraction(1, ell - 1)


def condition_a_constant(n: int, ell_max: int) -> float:
    """A1 = max of 1/(1 - omega(ell)/ell) over odd primes ell <= ell_max"""
    a1 = 1.0
    for ell in primes_up_to(ell_max)[1:].tolist():
        ratio = omega_prime_case(ell, n) / ell
        if not 0 <= ratio < 1:
            logger.error(f"omega({ell})/{ell} = {ratio} for n = {n}")
            raise PreconditionError(f"condition (a) fails at ell = {ell}: omega/ell = {ratio}")
        a1 = max(a1, float(1 / (1 - ratio)))
    return a1


def _omega_over_p(n: int, p: np.ndarray) -> np.ndarray:
    """Float omega(p)/p for an array of odd primes"""
    residue = n % p
    p = p.astype(np.float64)
    cube = (p - 1) ** 3 + 1
    values = (2 * p * p - 5 * p) / cube
    values = np.where((residue + 4) % p == 0, (2 * p * p - 5 * p + 1) / cube, values)
    values = np.where((residue + 2) % p == 0, p * (2 * p - 3) / cube, values)
    values = np.where(residue == 0, (2 * p - 5) / ((p - 1) * (p - 2)), values)
    return values


def condition_b_constant(n: int, w_max: int, kappa: float = 2.0) -> float:
    """Smallest A2 with sum_{v<=p<=w} omega(p)/p log p <= kappa log(w/v) + A2 for 2 <= v <= w <= w_max.

    The worst (v, w) sit on primes, so this is a running maximum over the
    cumulative sums.
    """
    primes = primes_up_to(w_max)[1:]
    if primes.size == 0:
        return 0.0
    logs = np.log(primes.astype(np.float64))
    cumulative = np.cumsum(_omega_over_p(n, primes) * logs)
    before = np.concatenate(([0.0], cumulative[:-1]))
    best_start = np.maximum.accumulate(kappa * logs - before)
    return max(0.0, float(np.max(cumulative - kappa * logs + best_start)))
