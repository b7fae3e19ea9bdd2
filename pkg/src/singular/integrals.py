"""Main-term integrals for the unweighted counting variants"""
import logging
import math
from typing import Callable

from ..config.settings import P_MAX
from ..errors import PreconditionError
from .euler import ternary_one_ap

logger = logging.getLogger(__name__)

REL_TOL = 1e-8
MAX_DEPTH = 40


def _simpson(fa: float, fm: float, fb: float, a: float, b: float) -> float:
    return (b - a) / 6 * (fa + 4 * fm + fb)


def _refine(f: Callable[[float], float], a: float, b: float, fa: float, fm: float, fb: float,
            whole: float, tol: float, depth: int) -> float:
    m = (a + b) / 2
    lm, rm = (a + m) / 2, (m + b) / 2
    flm, frm = f(lm), f(rm)
    left = _simpson(fa, flm, fm, a, m)
    right = _simpson(fm, frm, fb, m, b)
    delta = left + right - whole
    if abs(delta) <= 15 * tol:
        return left + right + delta / 15
    if depth <= 0:
        logger.warning(f"Simpson depth exhausted on [{a}, {b}], residual {delta:.3e}")
        return left + right + delta / 15
    return (_refine(f, a, m, fa, flm, fm, left, tol / 2, depth - 1)
            + _refine(f, m, b, fm, frm, fb, right, tol / 2, depth - 1))


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     rel_tol: float = REL_TOL, max_depth: int = MAX_DEPTH) -> float:
    """Integral of f over [a, b] to relative tolerance rel_tol"""
    if b == a:
        return 0.0
    fa, fm, fb = f(a), f((a + b) / 2), f(b)
    whole = _simpson(fa, fm, fb, a, b)
    tol = rel_tol * abs(whole) if whole else rel_tol
    return _refine(f, a, b, fa, fm, fb, whole, tol, max_depth)


def binary_h_integral(X2: float, Y: float, target: float) -> float:
    """Integral over t in [X2, X2 + Y] of dt / (log t * log(target - t))"""
    if Y < 0:
        raise PreconditionError(f"Y must be >= 0, got {Y}")
    if X2 <= 1:
        raise PreconditionError(f"log t <= 0 at t = X2 = {X2}; need X2 > 1")
    if target - X2 - Y <= 1:
        raise PreconditionError(
            f"log(target - t) <= 0 at t = X2 + Y: target - X2 - Y = {target - X2 - Y}, need > 1"
        )
    return adaptive_simpson(lambda t: 1 / (math.log(t) * math.log(target - t)), X2, X2 + Y)


def h_integral(X1: float, X2: float, Y: float, n: float) -> float:
    """H(X1, X2, Y, n): integral over v in [X1, X1 + Y] of binary_h_integral(X2, Y, n - v) / log v"""
    if Y < 0:
        raise PreconditionError(f"Y must be >= 0, got {Y}")
    if X1 <= 1:
        raise PreconditionError(f"log v <= 0 at v = X1 = {X1}; need X1 > 1")
    if X2 <= 1:
        raise PreconditionError(f"log t <= 0 at t = X2 = {X2}; need X2 > 1")
    slack = n - (X1 + Y) - (X2 + Y)
    if slack <= 1:
        raise PreconditionError(
            f"log(n - v - t) <= 0 at the far corner: n - (X1 + Y) - (X2 + Y) = {slack}, need > 1"
        )
    return adaptive_simpson(lambda v: binary_h_integral(X2, Y, n - v) / math.log(v), X1, X1 + Y)


def xi(X1: float, X2: float, Y: float, n: int, P_max: int = P_MAX) -> float:
    """Sieve main term: H/2 * prod_{p | n}(1 - 1/(p-1)^2) * prod_{p not | n}(1 + 1/(p-1)^3)"""
    return 0.5 * h_integral(X1, X2, Y, n) * ternary_one_ap(n, 1, 0, P_max).value
