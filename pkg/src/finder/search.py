"""Constructive search for constrained Goldbach representations"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..bounds import cor2_theta_threshold
from ..config.settings import CHUNK_SIZE
from ..errors import PreconditionError
from ..experiments.pairs import covering_window, fetch_window
from ..experiments.reduction import ordered_chunks
from ..sieve import PrimeCache, PrimeWindow, factorize

logger = logging.getLogger(__name__)

MODES = ("first", "all", "count")

Window = Tuple[int, int]
Triple = Tuple[int, int, int]


def _shifted_omega(p: int) -> int:
    """Omega(p + 2)"""
    return factorize(p + 2).big_omega


def shifted_omegas(primes: np.ndarray, workers: int = 1, chunk_size: int = CHUNK_SIZE) -> np.ndarray:
    """Omega(p + 2) for every p, in order"""
    values = ordered_chunks(_shifted_omega, [int(p) for p in primes], workers, chunk_size)
    return np.asarray(values, dtype=np.int64)


@dataclass
class RepresentationQuery:
    """n = p1 + p2 + p3 with p_i in (X_i, X_i + Y_i] for i = 1, 2.

    conditions holds (summand index, s) pairs, index 1..3, each asking that
    p_index + 2 be a P_s; joint_s bounds Omega((p1 + 2)(p2 + 2)).
    """
    n: int
    windows: Tuple[Window, Window]
    conditions: Tuple[Tuple[int, int], ...] = ()
    mode: str = "first"
    joint_s: Optional[int] = None

    def __post_init__(self):
        if self.n < 1 or self.n % 2 == 0:
            raise PreconditionError(f"n must be a positive odd integer, got {self.n}")
        if self.mode not in MODES:
            raise PreconditionError(f"mode must be one of {MODES}, got {self.mode}")
        if len(self.windows) != 2:
            raise PreconditionError(f"expected windows for p1 and p2, got {len(self.windows)}")
        for X, Y in self.windows:
            if X < 0 or Y < 0:
                raise PreconditionError(f"window ({X}, {X}+{Y}] is malformed")
        for index, s in self.conditions:
            if index not in (1, 2, 3) or s < 1:
                raise PreconditionError(f"condition (summand {index}, s = {s}) is malformed")
        self.windows = tuple(tuple(w) for w in self.windows)
        self.conditions = tuple(tuple(c) for c in self.conditions)

    def bound_for(self, index: int) -> Optional[int]:
        """Tightest s imposed on p_index + 2, or None"""
        bounds = [s for i, s in self.conditions if i == index]
        return min(bounds) if bounds else None

    def warnings(self) -> List[str]:
        warnings = []
        if self.n % 6 == 1:
            warnings.append(f"n = {self.n} = 1 (mod 6): almost-twin conditions may be unsatisfiable")
        (X1, Y1), (X2, Y2) = self.windows
        if self.n < X1 + X2 + Y1 + Y2:
            warnings.append(f"n = {self.n} < X1 + X2 + Y1 + Y2 = {X1 + X2 + Y1 + Y2}")
        for w in warnings:
            logger.warning(w)
        return warnings


@dataclass
class SearchResult:
    query: RepresentationQuery
    solutions: List[Triple] = field(default_factory=list)
    count: int = 0
    warnings: List[str] = field(default_factory=list)

    def rows(self) -> List[Dict[str, Any]]:
        if self.query.mode == "count":
            return [{"n": self.query.n, "count": self.count}]
        return [{"n": self.query.n, "p1": p1, "p2": p2, "p3": p3} for p1, p2, p3 in self.solutions]


def _omegas_if(primes: np.ndarray, needed: bool, workers: int, chunk_size: int) -> np.ndarray:
    if not needed:
        return np.zeros(primes.size, dtype=np.int64)
    return shifted_omegas(primes, workers, chunk_size)


def _admissible(primes: np.ndarray, omegas: np.ndarray, s: Optional[int]) -> np.ndarray:
    if s is None:
        return np.ones(primes.shape, dtype=bool)
    return omegas <= s


@dataclass(frozen=True)
class TernaryRow:
    """Solutions (p2, p3) for one p1, ascending in p2"""
    p2: np.ndarray
    omega2: np.ndarray
    aux: Optional[PrimeWindow]
    n: int
    s3: Optional[int]
    joint_s: Optional[int]

    def __call__(self, item: Tuple[int, int]) -> List[Tuple[int, int]]:
        p1, omega1 = item
        p3 = self.n - p1 - self.p2
        hit = p3 >= 2
        if np.any(hit):
            hit[hit] = self.aux.is_prime_array(p3[hit])
        if self.joint_s is not None:
            hit &= omega1 + self.omega2 <= self.joint_s
        found = []
        for p2, q3 in zip(self.p2[hit].tolist(), p3[hit].tolist()):
            if self.s3 is None or _shifted_omega(q3) <= self.s3:
                found.append((p2, q3))
        return found


def find_ternary(query: RepresentationQuery, cache: Optional[PrimeCache] = None, workers: int = 1,
                 chunk_size: int = CHUNK_SIZE) -> SearchResult:
    """Solutions of n = p1 + p2 + p3 under the query's constraints, lexicographic in (p1, p2).

    first mode walks p1 sequentially and stops at the first hit; all and count
    modes evaluate p1 in ordered chunks.
    """
    result = SearchResult(query, warnings=query.warnings())
    (X1, Y1), (X2, Y2) = query.windows
    p1 = fetch_window(X1, Y1, cache, workers).primes() if Y1 else np.empty(0, dtype=np.int64)
    p2 = fetch_window(X2, Y2, cache, workers).primes() if Y2 else np.empty(0, dtype=np.int64)

    omega1 = _omegas_if(p1, query.joint_s is not None or query.bound_for(1) is not None, workers, chunk_size)
    omega2 = _omegas_if(p2, query.joint_s is not None or query.bound_for(2) is not None, workers, chunk_size)
    keep1 = _admissible(p1, omega1, query.bound_for(1))
    keep2 = _admissible(p2, omega2, query.bound_for(2))
    p1, omega1 = p1[keep1], omega1[keep1]
    p2, omega2 = p2[keep2], omega2[keep2]

    if p1.size == 0 or p2.size == 0:
        logger.info(f"find_ternary(n={query.n}): a summand window holds no admissible primes")
        return result
    lo, hi = query.n - int(p1[-1]) - int(p2[-1]), query.n - int(p1[0]) - int(p2[0])
    if hi < 2:
        message = f"p3 range [{lo}, {hi}] holds no primes: n is too small for the windows"
        logger.warning(message)
        result.warnings.append(message)
        return result

    aux = covering_window(lo, hi, cache, workers)
    row = TernaryRow(p2, omega2, aux, query.n, query.bound_for(3), query.joint_s)
    items = list(zip(p1.tolist(), omega1.tolist()))

    if query.mode == "first":
        for item in items:
            found = row(item)
            if found:
                result.solutions = [(item[0], *found[0])]
                result.count = 1
                break
        return result

    per_p1 = ordered_chunks(row, items, workers, chunk_size)
    solutions = [(item[0], p2_, p3_) for item, found in zip(items, per_p1) for p2_, p3_ in found]
    result.count = len(solutions)
    if query.mode == "all":
        result.solutions = solutions
    logger.info(f"find_ternary(n={query.n}): {result.count} solution(s)")
    return result


@dataclass(frozen=True)
class BinarySearcher:
    """First (p2, r - p2) with r - p2 prime, over a fixed admissible p2 list"""
    p2: np.ndarray
    aux: Optional[PrimeWindow]

    def __call__(self, r: int) -> Optional[Tuple[int, int]]:
        if self.p2.size == 0:
            return None
        p3 = r - self.p2
        hit = p3 >= 2
        if np.any(hit):
            hit[hit] = self.aux.is_prime_array(p3[hit])
        found = np.flatnonzero(hit)
        if found.size == 0:
            return None
        i = int(found[0])
        return int(self.p2[i]), int(p3[i])


def _almost_twin_primes(window: PrimeWindow, s: Optional[int], workers: int, chunk_size: int) -> np.ndarray:
    p2 = window.primes()
    if s is None or p2.size == 0:
        return p2
    return p2[shifted_omegas(p2, workers, chunk_size) <= s]


def _binary_searcher(window: PrimeWindow, r_lo: int, r_hi: int, s: Optional[int],
                     cache: Optional[PrimeCache], workers: int, chunk_size: int) -> BinarySearcher:
    p2 = _almost_twin_primes(window, s, workers, chunk_size)
    aux = None
    if p2.size and r_lo <= r_hi:
        aux = covering_window(r_lo - int(p2[-1]), r_hi - int(p2[0]), cache, workers)
    return BinarySearcher(p2, aux)


def find_binary(r: int, window: PrimeWindow, s: Optional[int] = None, cache: Optional[PrimeCache] = None,
                workers: int = 1) -> Optional[Tuple[int, int]]:
    """Smallest p2 in window with p2 + 2 a P_s and r - p2 prime, as (p2, p3)"""
    if r < 4:
        raise PreconditionError(f"r must be >= 4, got {r}")
    return _binary_searcher(window, r, r, s, cache, workers, CHUNK_SIZE)(r)


def count_chen(window: PrimeWindow, workers: int = 1, chunk_size: int = CHUNK_SIZE) -> int:
    """Number of primes p in the window with p + 2 a P_2"""
    primes = window.primes()
    if primes.size == 0:
        return 0
    return int(np.count_nonzero(shifted_omegas(primes, workers, chunk_size) <= 2))


def cor2_exceptions(X1: int, X2: int, Y: int, s: int = 3, theta_report: Optional[float] = None,
                    cache: Optional[PrimeCache] = None, workers: int = 1,
                    chunk_size: int = CHUNK_SIZE) -> Dict[str, Any]:
    """Even 2k1 in (2X1, 2X1 + 2Y], 2k1 != 2 (6), with no 2k1 = p2 + p3 where p2 in (X2, X2 + Y], p2 + 2 = P_s.

    The measured exponent log Y / log X2 is reported next to theta_report
    (the threshold for s when not given); a shortfall is a warning only.
    """
    if Y < 1 or X1 < 1 or X2 < 1:
        raise PreconditionError(f"X1, X2 and Y must be positive, got X1={X1}, X2={X2}, Y={Y}")
    if theta_report is None:
        theta_report = cor2_theta_threshold(s)

    warnings = []
    theta = math.log(Y) / math.log(X2) if X2 > 1 else float("inf")
    if theta < theta_report:
        warnings.append(f"Y = X2^{theta:.4f} is below X2^{theta_report:.4f}")
    if X2 + Y > 2 * X1:
        warnings.append(f"X2 + Y = {X2 + Y} exceeds 2 X1 = {2 * X1}")
    for w in warnings:
        logger.warning(w)

    targets = [r for r in range(2 * X1 + 2, 2 * X1 + 2 * Y + 1, 2) if r % 6 != 2]
    searcher = _binary_searcher(fetch_window(X2, Y, cache, workers), 2 * X1 + 2, 2 * X1 + 2 * Y,
                                s, cache, workers, chunk_size)
    found = ordered_chunks(searcher, targets, workers, chunk_size)
    exceptions = [r for r, hit in zip(targets, found) if hit is None]
    total = len(targets)
    logger.info(f"cor2_exceptions: {len(exceptions)} of {total} targets without a representation")
    return {
        "X1": X1,
        "X2": X2,
        "Y": Y,
        "s": s,
        "theta": theta,
        "theta_report": theta_report,
        "exceptional_count": len(exceptions),
        "total": total,
        "exceptional_fraction": len(exceptions) / total if total else 0.0,
        "list": exceptions,
        "warnings": warnings,
    }
