"""Series forms of the singular series via exponential sums over reduced residues.

Each series is a sum over squarefree s <= S_max of

    weight(s) * sum*_{b (s)} e(-target * b / s) * prod_k C_k(b),

where C_k(b) = sum*_{c (s), c = a_k ((q_k, s))} e(b c / s). The inner sums
C_k are read off an inverse FFT of the admissible-residue indicator. The
single-term functions (hs_term, g_sum, f_sum) evaluate the same sums by
direct loops and serve as the reference form.
"""
import logging
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np

from ..config.settings import S_MAX
from ..errors import NumericalError, PreconditionError
from ..sieve import moebius, moebius_table, totient, totient_table
from .euler import SingularValue

logger = logging.getLogger(__name__)

IMAG_TOLERANCE = 1e-9
SERIES_TAIL_CONSTANT = 4.0

Constraint = Tuple[int, int]  # (q, a): residues c with c = a mod (q, s)


def _reduced_mask(s: int) -> np.ndarray:
    return np.gcd(np.arange(s, dtype=np.int64), s) == 1


def _admissible_mask(s: int, q: int, a: int) -> np.ndarray:
    g = math.gcd(q, s)
    c = np.arange(s, dtype=np.int64)
    return _reduced_mask(s) & ((c - a) % g == 0)


def _twiddle(target: int, b: np.ndarray, s: int) -> np.ndarray:
    """e(-target * b / s) with the product reduced mod s first"""
    return np.exp(-2j * np.pi * ((target % s) * b % s) / s)


def _direct_inner(b: np.ndarray, c: np.ndarray, s: int) -> np.ndarray:
    """C(b) = sum over c of e(b c / s), one row per b"""
    return np.exp(2j * np.pi * (np.outer(b, c) % s) / s).sum(axis=1)


def _fft_inner(mask: np.ndarray) -> np.ndarray:
    """C(b) for every b (mod s) from the indicator of admissible c"""
    return mask.size * np.fft.ifft(mask.astype(np.complex128))


def _checked_real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOLERANCE:
        raise NumericalError(f"{what} has imaginary part {value.imag:.3e}")
    return value.real


def _check_s(s: int):
    if s < 1:
        raise PreconditionError(f"s must be >= 1, got {s}")


def _phi_lcm(q: int, s: int) -> int:
    g = math.gcd(q, s)
    return totient(q) * totient(s) // totient(g)


def _direct_sum(target: int, s: int, constraints: Sequence[Constraint]) -> complex:
    reduced = np.flatnonzero(_reduced_mask(s))
    total = _twiddle(target, reduced, s)
    for q, a in constraints:
        admissible = np.flatnonzero(_admissible_mask(s, q, a))
        total = total * _direct_inner(reduced, admissible, s)
    return complex(total.sum())


def hs_term(s: int, r: int, q: int, a: int) -> complex:
    """H_s(r, q, a) by the direct double sum over reduced b and c"""
    _check_s(s)
    if q < 1:
        raise PreconditionError(f"modulus must be positive, got {q}")
    mu = moebius(s)
    if mu == 0:
        return 0j
    weight = mu / (totient(s) * _phi_lcm(q, s))
    return weight * _direct_sum(r, s, [(q, a)])


def g_sum(n: int, a1: int, q1: int, a2: int, q2: int, s: int) -> complex:
    """G(n; a1, q1, a2, q2, s) = sum*_b sum*_c sum*_d e(-(n - d - c) b / s)"""
    _check_s(s)
    return _direct_sum(n, s, [(q2, a2), (q1, a1)])


def f_sum(n: int, a: int, q: int, s: int) -> complex:
    """F(n; a, q, s) = sum*_b sum*_c e(-(n - c) b / s)"""
    _check_s(s)
    return _direct_sum(n, s, [(q, a)])


def _series_values(targets: Sequence[int], constraints: List[Constraint], S_max: int,
                   weight: Callable[[int, int], float], what: str) -> List[SingularValue]:
    """Partial sums over squarefree s <= S_max for every target at once.

    weight(s, mu(s)) scales each term. For each s one forward FFT of the
    reduced-residue inner product gives the twiddled sum for every target
    residue mod s.
    """
    if S_max < 1:
        raise PreconditionError(f"S_max must be >= 1, got {S_max}")
    t = np.asarray(targets, dtype=np.int64)
    mu_table = moebius_table(S_max)
    real_parts: List[np.ndarray] = []
    imag_parts: List[np.ndarray] = []

    for s in np.flatnonzero(mu_table).tolist():
        w = weight(s, int(mu_table[s]))
        if w == 0:
            continue
        inner = _reduced_mask(s).astype(np.complex128)
        for q, a in constraints:
            inner = inner * _fft_inner(_admissible_mask(s, q, a))
        terms = w * np.fft.fft(inner)[t % s]
        real_parts.append(terms.real)
        imag_parts.append(terms.imag)

    logger.info(f"{what}: summed {len(real_parts)} squarefree terms up to {S_max} for {t.size} target(s)")
    values = []
    for i, target in enumerate(t.tolist()):
        value = complex(math.fsum(part[i] for part in real_parts), math.fsum(part[i] for part in imag_parts))
        values.append(SingularValue(_checked_real(value, f"{what} at {target}"), SERIES_TAIL_CONSTANT / S_max,
                                    series_cutoff=S_max))
    return values


def _series(target: int, constraints: List[Constraint], S_max: int,
            weight: Callable[[int, int], float], what: str) -> SingularValue:
    return _series_values([target], constraints, S_max, weight, what)[0]


def _series_weights(S_max: int):
    phi = totient_table(max(S_max, 1))

    def phi_lcm(q: int, s: int) -> int:
        g = math.gcd(q, s)
        return totient(q) * int(phi[s]) // int(phi[g])

    return phi, phi_lcm


def binary_sing_series_table(rs: Sequence[int], S_max: int = S_MAX) -> List[SingularValue]:
    """binary_sing_series at every r in rs, sharing one pass over s"""
    phi, _ = _series_weights(S_max)
    return _series_values(rs, [], S_max, lambda s, mu: 1 / float(phi[s]) ** 2, "binary series")


def binary_sing_series(r: int, S_max: int = S_MAX) -> SingularValue:
    """sum_s mu^2(s)/phi^2(s) sum*_b e(-r b / s)"""
    return binary_sing_series_table([r], S_max)[0]


def hs_series_table(rs: Sequence[int], q: int, a: int, S_max: int = S_MAX) -> List[SingularValue]:
    if q < 1:
        raise PreconditionError(f"modulus must be positive, got {q}")
    phi, phi_lcm = _series_weights(S_max)
    return _series_values(rs, [(q, a)], S_max,
                          lambda s, mu: mu / (float(phi[s]) * phi_lcm(q, s)),
                          f"H_s series q={q} a={a}")


def hs_series(r: int, q: int, a: int, S_max: int = S_MAX) -> SingularValue:
    """sum_s H_s(r, q, a)"""
    return hs_series_table([r], q, a, S_max)[0]


def ternary_two_ap_series_table(ns: Sequence[int], q1: int, a1: int, q2: int, a2: int,
                                S_max: int = S_MAX) -> List[SingularValue]:
    if q1 < 1 or q2 < 1:
        raise PreconditionError(f"moduli must be positive, got q1={q1}, q2={q2}")
    phi, phi_lcm = _series_weights(S_max)
    return _series_values(ns, [(q2, a2), (q1, a1)], S_max,
                          lambda s, mu: mu / (float(phi[s]) * phi_lcm(q2, s) * phi_lcm(q1, s)),
                          f"two-AP series q1={q1} a1={a1} q2={q2} a2={a2}")


def ternary_two_ap_series(n: int, q1: int, a1: int, q2: int, a2: int,
                          S_max: int = S_MAX) -> SingularValue:
    """sum_s mu(s) G(n; a1, q1, a2, q2, s) / (phi(s) phi([q2; s]) phi([q1; s]))"""
    return ternary_two_ap_series_table([n], q1, a1, q2, a2, S_max)[0]


def ternary_one_ap_series_table(ns: Sequence[int], q: int, a: int, S_max: int = S_MAX) -> List[SingularValue]:
    if q < 1:
        raise PreconditionError(f"modulus must be positive, got {q}")
    phi, phi_lcm = _series_weights(S_max)
    return _series_values(ns, [(q, a)], S_max,
                          lambda s, mu: 1 / (float(phi[s]) ** 2 * phi_lcm(q, s)),
                          f"one-AP series q={q} a={a}")


def ternary_one_ap_series(n: int, q: int, a: int, S_max: int = S_MAX) -> SingularValue:
    """sum_s mu^2(s)/phi^2(s) F(n; a, q, s) / phi([q; s])"""
    return ternary_one_ap_series_table([n], q, a, S_max)[0]
