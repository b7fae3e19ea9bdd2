"""Empirical ratios for the two large-sieve-type lemmas on residue-class sums"""
import logging
import math
from typing import Optional

import numpy as np

from ..config.settings import SEED
from ..errors import PreconditionError

logger = logging.getLogger(__name__)

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
LCG_MASK = (1 << 64) - 1


class Lcg64:
 # 64-bit linear congruential generator with the MMIX constants
    def __init__(self, seed: int = SEED):
        self.state = seed & LCG_MASK

    def next_uniform(self) -> float:
        """Uniform in [0, 1) from the top 53 bits of the next state"""
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) & LCG_MASK
        return (self.state >> 11) / float(1 << 53)

    def unit_box(self, count: int) -> np.ndarray:
        """count complex numbers with real and imaginary parts uniform in [-1, 1)"""
        values = np.empty(count, dtype=np.complex128)
        for i in range(count):
            re = 2 * self.next_uniform() - 1
            im = 2 * self.next_uniform() - 1
            values[i] = complex(re, im)
        return values


def _moduli(Q: float) -> range:
    """q ~ Q, i.e. Q <= q < 2Q"""
    return range(math.ceil(Q), math.ceil(2 * Q))


def _check(kind: str, M: int, N: int, Q: float, a: int):
    if Q < 1:
        raise PreconditionError(f"Q must be >= 1, got {Q}")
    if kind == "lemma1":
        if not (Q <= M and N <= M and M >= a and N >= 1):
            raise PreconditionError(f"lemma1 needs Q <= M, 1 <= N <= M and M >= a; got M={M}, N={N}, Q={Q}, a={a}")
    elif kind == "lemma2":
        if M < 2 or N < 2:
            raise PreconditionError(f"lemma2 needs M, N >= 2; got M={M}, N={N}")
    else:
        raise PreconditionError(f"kind must be lemma1 or lemma2, got {kind}")


def _class_sums(n: np.ndarray, v: np.ndarray, q: int) -> np.ndarray:
    residues = n % q
    re = np.bincount(residues, weights=v.real, minlength=q)
    im = np.bincount(residues, weights=v.imag, minlength=q)
    return np.hypot(re, im)


def lemma_lhs(kind: str, v: np.ndarray, M: int, Q: float, a: int = 0) -> float:
    """sum over q ~ Q of |sum_{n = a (q)} v_n| (lemma1) or max over a of it (lemma2); v indexed by n = M+1..M+N"""
    n = np.arange(M + 1, M + 1 + v.size, dtype=np.int64)
    parts = []
    for q in _moduli(Q):
        sums = _class_sums(n, v, q)
        parts.append(float(sums.max()) if kind == "lemma2" else float(sums[a % q]))
    return math.fsum(parts)


def lemma_rhs(kind: str, v: np.ndarray, M: int, Q: float) -> float:
    """Stated envelope with implied constant 1"""
    N = v.size
    norm = math.sqrt(math.fsum((np.abs(v) ** 2).tolist()))
    if kind == "lemma1":
        return math.sqrt(N + Q ** (2 / 3) * M ** (1 / 3)) * math.log(M + 1) ** 1.5 * norm
    return math.sqrt(N * math.log(Q + 1) + Q * Q) * norm


def lemma_ratio(kind: str, v: np.ndarray, M: int, Q: float, a: int = 0) -> float:
    """LHS / RHS for one vector; 0 for the zero vector"""
    _check(kind, M, v.size, Q, a)
    rhs = lemma_rhs(kind, v, M, Q)
    if rhs == 0:
        return 0.0
    return lemma_lhs(kind, v, M, Q, a) / rhs


def hm_lemma_ratio(kind: str, M: int, N: int, Q: float, a: int = 0, trials: int = 1,
                   rng_seed: Optional[int] = None) -> float:
    """Largest LHS/RHS over seeded pseudo-random unit-box vectors"""
    _check(kind, M, N, Q, a)
    rng = Lcg64(SEED if rng_seed is None else rng_seed)
    best = 0.0
    for _ in range(trials):
        best = max(best, lemma_ratio(kind, rng.unit_box(N), M, Q, a))
    logger.info(f"{kind}: max ratio {best:.6g} over {trials} trials (M={M}, N={N}, Q={Q})")
    return best
