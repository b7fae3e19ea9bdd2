"""Left-hand sides of the mean-value theorems at desk scale.

Every experiment reduces to a per-index row function (index = q, k1 or r)
evaluated by ordered_chunks and merged with fsum, so reports are identical
for any worker count. Row functions are small frozen dataclasses so they
pickle into worker processes.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import CHUNK_SIZE, P_MAX
from ..errors import PreconditionError
from ..sieve import PrimeCache, PrimeWindow
from ..singular import binary_h_integral, binary_sing_ap, h_integral, ternary_one_ap, ternary_two_ap
from .pairs import covering_window, fetch_window
from .reduction import merge_sum, ordered_chunks
from .spec import ExperimentReport, ExperimentSpec, Kind

logger = logging.getLogger(__name__)


def _primes_in(X: int, Y: int, cache: Optional[PrimeCache], workers: int) -> np.ndarray:
    if Y < 1:
        return np.empty(0, dtype=np.int64)
    return fetch_window(X, Y, cache, workers).primes()


def _weights_where(hit: np.ndarray, *factors: np.ndarray) -> np.ndarray:
    out = np.zeros(hit.shape, dtype=np.float64)
    product = np.ones(int(np.count_nonzero(hit)), dtype=np.float64)
    for f in factors:
        product = product * np.log(f[hit])
    out[hit] = product
    return out


@dataclass(frozen=True)
class BinaryContext:
    """p2 side of a binary problem, shared by every target r"""
    p2: np.ndarray
    aux: Optional[PrimeWindow]
    twin: bool = False
    weighted: bool = True

    @classmethod
    def build(cls, X2: int, Y: int, r_lo: int, r_hi: int, twin: bool = False, weighted: bool = True,
              cache: Optional[PrimeCache] = None, workers: int = 1) -> "BinaryContext":
        p2 = _primes_in(X2, Y, cache, workers)
        aux = None
        if p2.size and r_lo <= r_hi:
            if twin:
                lo, hi = int(p2[0]) - r_hi, int(p2[-1]) - r_lo
            else:
                lo, hi = r_lo - int(p2[-1]), r_hi - int(p2[0])
            aux = covering_window(lo, hi, cache, workers)
        return cls(p2, aux, twin, weighted)

    def partners(self, r: int) -> np.ndarray:
        return self.p2 - r if self.twin else r - self.p2

    def weights(self, r: int) -> np.ndarray:
        """Per p2: log p2 log p3 (or 1) when p3 is prime, else 0"""
        p3 = self.partners(r)
        hit = p3 >= 2
        if np.any(hit):
            hit[hit] = self.aux.is_prime_array(p3[hit])
        if not self.weighted:
            return hit.astype(np.float64)
        return _weights_where(hit, self.p2, p3)

    def residue_sums(self, r: int, q: int) -> np.ndarray:
        return np.bincount(self.p2 % q, weights=self.weights(r), minlength=q)

    def cutoff_count(self, targets: Sequence[int]) -> int:
        """Number of (r, p2) whose partner p3 falls below 2"""
        t = np.asarray(targets, dtype=np.int64)
        if self.p2.size == 0 or t.size == 0:
            return 0
        if self.twin:
            return int(np.searchsorted(self.p2, t + 2, side="left").sum())
        return int((self.p2.size - np.searchsorted(self.p2, t - 2, side="right")).sum())


@dataclass(frozen=True)
class BinaryResidualRow:
    """sum over q of |pairs(2k, q, a) - S(2k, q, a) * main| for one k (squared when asked)"""
    ctx: BinaryContext
    moduli: Tuple[int, ...]
    a: int
    X2: int
    Y: int
    P_max: int
    squared: bool = False

    def main_term(self, r: int, q: int) -> float:
        sing = binary_sing_ap(r, q, self.a, self.P_max).value
        if sing == 0:
            return 0.0
        if self.ctx.weighted:
            return sing * self.Y
        return sing * binary_h_integral(self.X2, self.Y, r)

    def __call__(self, k: int) -> float:
        r = 2 * k
        w = self.ctx.weights(r)
        parts = []
        for q in self.moduli:
            total = float(np.bincount(self.ctx.p2 % q, weights=w, minlength=q)[self.a % q])
            d = total - self.main_term(r, q)
            parts.append(d * d if self.squared else abs(d))
        return math.fsum(parts)


@dataclass(frozen=True)
class BvRow:
    primes: np.ndarray
    Y: int

    def __call__(self, q: int) -> float:
        sums = np.bincount(self.primes % q, weights=np.log(self.primes), minlength=q)
        reduced = np.gcd(np.arange(q), q) == 1
        main = self.Y / int(np.count_nonzero(reduced))
        return float(np.max(np.abs(sums[reduced] - main)))


@dataclass(frozen=True)
class ConjectureRow:
    ctx: BinaryContext
    Q: int
    Y: int
    P_max: int

    def __call__(self, r: int) -> float:
        w = self.ctx.weights(r)
        parts = []
        for q in range(1, self.Q + 1):
            sums = np.bincount(self.ctx.p2 % q, weights=w, minlength=q)
            a = np.arange(q)
            admissible = (np.gcd(a, q) == 1) & (np.gcd(a - r, q) == 1)
            if not np.any(admissible):
                continue
            main = binary_sing_ap(r, q, int(a[admissible][0]), self.P_max).value * self.Y
            parts.append(float(np.max(np.abs(sums[admissible] - main))))
        return math.fsum(parts)


def _run_rows(row, indices: Sequence[int], workers: int, chunk_size: int) -> List[Tuple[int, float]]:
    values = ordered_chunks(row, indices, workers, chunk_size)
    return list(zip(indices, values))


def _report(kind: Kind, rows: List[Tuple[int, float]], main_scale: float, scale_formula: str,
            spec: ExperimentSpec, index_name: str, warnings: List[str]) -> ExperimentReport:
    lhs = merge_sum([value for _, value in rows])
    logger.info(f"{kind.value}: lhs = {lhs:.6g} over {len(rows)} rows, scale {scale_formula} = {main_scale:.6g}")
    return ExperimentReport(
        kind=kind.value,
        lhs=lhs,
        main_scale=float(main_scale),
        scale_formula=scale_formula,
        log_scale=spec.log_scale,
        A_display=spec.A_display,
        index_name=index_name,
        rows=rows,
        warnings=warnings,
        params=spec.to_dict(),
    )


def _cutoff_warning(count: int) -> List[str]:
    if not count:
        return []
    message = f"{count} terms cut off because p3 would fall below 2"
    logger.warning(message)
    return [message]


def _group_by_residue(ks: Sequence[int], values: Sequence[float], q: int, a: int, max_over_a: bool) -> float:
    """Sum of values over k with 2k = a (q), or the largest such sum over all a"""
    residues = (2 * np.asarray(ks, dtype=np.int64)) % q
    sums = np.bincount(residues, weights=np.asarray(values, dtype=np.float64), minlength=q)
    return float(sums.max()) if max_over_a else float(sums[a % q])


def bv_lhs(X: int, Y: int, Q: int, workers: int = 1, cache: Optional[PrimeCache] = None,
           chunk_size: int = CHUNK_SIZE) -> ExperimentReport:
    """sum over q <= Q of max over reduced a of |ap_error(X, Y, q, a)|"""
    spec = ExperimentSpec(Kind.THM3_BV, X1=X, Y=Y, Q=Q)
    warnings = spec.hypothesis_warnings()
    primes = _primes_in(X, Y, cache, workers)
    rows = _run_rows(BvRow(primes, Y), range(1, Q + 1), workers, chunk_size)
    return _report(Kind.THM3_BV, rows, Y, "Y", spec, "q", warnings)


def _k_range(X: int, length: int) -> List[int]:
    return list(range(X + 1, X + length + 1))


def _binary_rows(ks: List[int], X2: int, Y: int, moduli: Tuple[int, ...], a: int, weighted: bool,
                 squared: bool, P_max: int, workers: int, cache: Optional[PrimeCache],
                 chunk_size: int) -> Tuple[List[Tuple[int, float]], List[str]]:
    targets = [2 * k for k in ks]
    r_lo, r_hi = (targets[0], targets[-1]) if targets else (1, 0)
    ctx = BinaryContext.build(X2, Y, r_lo, r_hi, weighted=weighted, cache=cache, workers=workers)
    row = BinaryResidualRow(ctx, moduli, a, X2, Y, P_max, squared)
    return _run_rows(row, ks, workers, chunk_size), _cutoff_warning(ctx.cutoff_count(targets))


def kawada_lhs(X1: int, X2: int, Y: int, Q2: int, a2: int, weighted: bool = True, P_max: int = P_MAX,
               workers: int = 1, cache: Optional[PrimeCache] = None,
               chunk_size: int = CHUNK_SIZE) -> ExperimentReport:
    """sum over k1 in (X1, X1+Y], q2 <= Q2 of |pairs(2k1, q2, a2) - S(2k1, q2, a2) Y|"""
    spec = ExperimentSpec(Kind.THM4_KAWADA, X1=X1, X2=X2, Y=Y, Q2=Q2, a2=a2, weighted=weighted, P_max=P_max)
    warnings = spec.hypothesis_warnings()
    rows, cut = _binary_rows(_k_range(X1, Y), X2, Y, tuple(range(1, Q2 + 1)), a2, weighted, False,
                             P_max, workers, cache, chunk_size)
    return _report(Kind.THM4_KAWADA, rows, Y * Y, "Y^2", spec, "k1", warnings + cut)


def thm5_lhs(X1: int, X2: int, Y: int, Q1: int, Q2: int, a1: int, a2: int, weighted: bool = True,
             max_over_a: bool = False, R: Optional[int] = None, P_max: int = P_MAX, workers: int = 1,
             cache: Optional[PrimeCache] = None, chunk_size: int = CHUNK_SIZE) -> ExperimentReport:
    """sum over q1 <= Q1, k1 in (X1, X1+R] with 2k1 = a1 (q1), q2 <= Q2 of the binary residual.

    R defaults to Y. With weighted=False pairs are counted and the main term
    uses the integral of 1/(log t log(2k1 - t)) instead of Y.
    """
    R = Y if R is None else R
    spec = ExperimentSpec(Kind.THM5, X1=X1, X2=X2, Y=Y, R=R, Q1=Q1, Q2=Q2, a1=a1, a2=a2,
                          weighted=weighted, max_over_a=max_over_a, P_max=P_max)
    warnings = spec.hypothesis_warnings()
    ks = _k_range(X1, R)
    k_rows, cut = _binary_rows(ks, X2, Y, tuple(range(1, Q2 + 1)), a2, weighted, False,
                               P_max, workers, cache, chunk_size)
    values = [v for _, v in k_rows]
    rows = [(q1, _group_by_residue(ks, values, q1, a1, max_over_a)) for q1 in range(1, Q1 + 1)]
    return _report(Kind.THM5, rows, R * Y, "R*Y", spec, "q1", warnings + cut)


def thm7_lhs(X1: int, X2: int, Y: int, R: int, Q: int, a: int, max_over_a: bool = False,
             P_max: int = P_MAX, workers: int = 1, cache: Optional[PrimeCache] = None,
             chunk_size: int = CHUNK_SIZE) -> ExperimentReport:
    """sum over q <= Q, k1 in (X1, X1+R] with 2k1 = a (q) of |pairs(2k1) - S(2k1) Y|"""
    spec = ExperimentSpec(Kind.THM7, X1=X1, X2=X2, Y=Y, R=R, Q=Q, a=a, max_over_a=max_over_a, P_max=P_max)
    warnings = spec.hypothesis_warnings()
    ks = _k_range(X1, R)
    k_rows, cut = _binary_rows(ks, X2, Y, (1,), 0, True, False, P_max, workers, cache, chunk_size)
    values = [v for _, v in k_rows]
    rows = [(q, _group_by_residue(ks, values, q, a, max_over_a)) for q in range(1, Q + 1)]
    return _report(Kind.THM7, rows, R * Y, "R*Y", spec, "q", warnings + cut)


def thm6_variance(X1: int, R: int, X2: int, Y: int, P_max: int = P_MAX, workers: int = 1,
                  cache: Optional[PrimeCache] = None, chunk_size: int = CHUNK_SIZE) -> ExperimentReport:
    """sum over k in (X1, X1+R] of |pairs(2k) - S(2k) Y|^2"""
    spec = ExperimentSpec(Kind.THM6_VARIANCE, X1=X1, X2=X2, Y=Y, R=R, P_max=P_max)
    warnings = spec.hypothesis_warnings()
    rows, cut = _binary_rows(_k_range(X1, R), X2, Y, (1,), 0, True, True, P_max, workers, cache, chunk_size)
    return _report(Kind.THM6_VARIANCE, rows, R * Y * Y, "R*Y^2", spec, "k", warnings + cut)


def conjecture_lhs(X1: int, R: int, X2: int, Y: int, Q: int, equation: str = "goldbach",
                   P_max: int = P_MAX, workers: int = 1, cache: Optional[PrimeCache] = None,
                   chunk_size: int = CHUNK_SIZE) -> ExperimentReport:
    """sum over even r in (X1, X1+R], q <= Q of max* over a with (a - r, q) = 1 of the residual"""
    if equation not in ("goldbach", "twin"):
        raise PreconditionError(f"equation must be goldbach or twin, got {equation}")
    kind = Kind.CONJECTURE_TWIN if equation == "twin" else Kind.CONJECTURE_GOLDBACH
    spec = ExperimentSpec(kind, X1=X1, X2=X2, Y=Y, R=R, Q=Q, P_max=P_max)
    warnings = spec.hypothesis_warnings()
    rs = [r for r in range(X1 + 1, X1 + R + 1) if r % 2 == 0]
    r_lo, r_hi = (rs[0], rs[-1]) if rs else (1, 0)
    ctx = BinaryContext.build(X2, Y, r_lo, r_hi, twin=equation == "twin", cache=cache, workers=workers)
    rows = _run_rows(ConjectureRow(ctx, Q, Y, P_max), rs, workers, chunk_size)
    return _report(kind, rows, R * Y, "R*Y", spec, "r", warnings + _cutoff_warning(ctx.cutoff_count(rs)))


@dataclass(frozen=True)
class TernaryContext:
    """p1 primes and the matrix W[i, j] = weight of (p1_i, p2_j, n - p1_i - p2_j)"""
    p1: np.ndarray
    p2: np.ndarray
    W: np.ndarray
    cutoffs: int

    @classmethod
    def build(cls, n: int, X1: int, Y1: int, X2: int, Y2: int, weighted: bool = True,
              cache: Optional[PrimeCache] = None, workers: int = 1) -> "TernaryContext":
        p1 = _primes_in(X1, Y1, cache, workers)
        p2 = _primes_in(X2, Y2, cache, workers)
        if p1.size == 0 or p2.size == 0:
            return cls(p1, p2, np.zeros((p1.size, p2.size)), 0)
        p3 = n - p1[:, None] - p2[None, :]
        hit = p3 >= 2
        aux = covering_window(int(p3.min()), int(p3.max()), cache, workers)
        if np.any(hit):
            hit[hit] = aux.is_prime_array(p3[hit])
        cutoffs = int(np.count_nonzero(p3 < 2))
        if weighted:
            P1 = np.broadcast_to(p1[:, None], p3.shape)
            P2 = np.broadcast_to(p2[None, :], p3.shape)
            W = _weights_where(hit, P1, P2, p3)
        else:
            W = hit.astype(np.float64)
        return cls(p1, p2, W, cutoffs)


@dataclass(frozen=True)
class Thm1Row:
    p1: np.ndarray
    column_sums: Tuple[np.ndarray, ...]
    moduli2: Tuple[int, ...]
    n: int
    a1: int
    a2: int
    scale: float
    P_max: int

    def __call__(self, q1: int) -> float:
        in_class = (self.p1 - self.a1) % q1 == 0
        parts = []
        for q2, col in zip(self.moduli2, self.column_sums):
            main = ternary_two_ap(self.n, q1, self.a1, q2, self.a2, self.P_max, printed=False).value
            parts.append(abs(float(col[in_class].sum()) - main * self.scale))
        return math.fsum(parts)


def thm1_lhs(n: int, X1: int, X2: int, Y: int, Q1: int, Q2: int, a1: int, a2: int,
             weighted: bool = True, P_max: int = P_MAX, workers: int = 1,
             cache: Optional[PrimeCache] = None, chunk_size: int = CHUNK_SIZE) -> ExperimentReport:
    """sum over q1 <= Q1, q2 <= Q2 of |ternary sum - T(n, q1, a1, q2, a2) Y^2|.

    The main term uses the series-consistent two-AP value; weighted=False
    counts triples against T * H(X1, X2, Y, n).
    """
    spec = ExperimentSpec(Kind.THM1, n=n, X1=X1, X2=X2, Y=Y, Q1=Q1, Q2=Q2, a1=a1, a2=a2,
                          weighted=weighted, P_max=P_max)
    warnings = spec.hypothesis_warnings()
    ctx = TernaryContext.build(n, X1, Y, X2, Y, weighted, cache, workers)
    moduli2 = tuple(range(1, Q2 + 1))
    column_sums = tuple(ctx.W[:, (ctx.p2 - a2) % q2 == 0].sum(axis=1) for q2 in moduli2)
    scale = Y * Y if weighted else h_integral(X1, X2, Y, n)
    row = Thm1Row(ctx.p1, column_sums, moduli2, n, a1, a2, scale, P_max)
    rows = _run_rows(row, list(range(1, Q1 + 1)), workers, chunk_size)
    return _report(Kind.THM1, rows, Y * Y, "Y^2", spec, "q1", warnings + _cutoff_warning(ctx.cutoffs))


@dataclass(frozen=True)
class Thm2Row:
    p1: np.ndarray
    row_sums: np.ndarray
    n: int
    a: int
    scale: float
    max_over_a: bool
    P_max: int

    def residual(self, q: int, a: int, sums: np.ndarray) -> float:
        main = ternary_one_ap(self.n, q, a, self.P_max).value
        return abs(float(sums[a % q]) - main * self.scale)

    def __call__(self, q: int) -> float:
        sums = np.bincount(self.p1 % q, weights=self.row_sums, minlength=q)
        if not self.max_over_a:
            return self.residual(q, self.a, sums)
        reduced = [a for a in range(q) if math.gcd(a, q) == 1]
        return max(self.residual(q, a, sums) for a in reduced)


def thm2_lhs(n: int, X1: int, Y1: int, X2: int, Y2: int, Q: int, a: int, max_over_a: bool = False,
             P_max: int = P_MAX, workers: int = 1, cache: Optional[PrimeCache] = None,
             chunk_size: int = CHUNK_SIZE) -> ExperimentReport:
    """sum over q <= Q of |ternary sum with p1 = a (q) - T(n, q, a) Y1 Y2| (or max* over a)"""
    spec = ExperimentSpec(Kind.THM2, n=n, X1=X1, Y1=Y1, X2=X2, Y2=Y2, Q=Q, a=a,
                          max_over_a=max_over_a, P_max=P_max)
    warnings = spec.hypothesis_warnings()
    ctx = TernaryContext.build(n, X1, Y1, X2, Y2, True, cache, workers)
    row = Thm2Row(ctx.p1, ctx.W.sum(axis=1), n, a, Y1 * Y2, max_over_a, P_max)
    rows = _run_rows(row, list(range(1, Q + 1)), workers, chunk_size)
    return _report(Kind.THM2, rows, Y1 * Y2, "Y1*Y2", spec, "q", warnings + _cutoff_warning(ctx.cutoffs))
