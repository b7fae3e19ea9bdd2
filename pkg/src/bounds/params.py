"""Sieve-constant inequalities and the corollary thresholds derived from them"""
import logging
import math
from dataclasses import dataclass, asdict
from typing import Dict, Iterable, List, NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..config.settings import NU_KAPPA
from ..errors import PreconditionError

logger = logging.getLogger(__name__)

ZETA_GRID_POINTS = 100_000
ZETA_EDGE = 1e-4
MU_MARGIN = 1e-6
TARGET_R = 9

CASE2_ETA_RANGE = (0.463, 0.5)
STATED_CASE2_BOUND = 0.782


def lambda_s(s: int) -> float:
    """s + 1 - log(4 / (1 + 3^-s)) / log 3"""
    if s < 1:
        raise PreconditionError(f"s must be >= 1, got {s}")
    return s + 1 - math.log(4 / (1 + 3.0 ** -s)) / math.log(3)


def _check_zeta(zeta, nu_kappa: float):
    z = np.asarray(zeta)
    if np.any(z <= 0) or np.any(z >= nu_kappa):
        raise PreconditionError(f"zeta must lie in (0, nu_kappa = {nu_kappa}), got {zeta}")


def hr_rhs(kappa: float, zeta, mu: float, nu_kappa: float = NU_KAPPA):
    """(1 + z) mu - 1 + (k + z) log(nu / z) - k - z (mu - k) / nu; vectorised over zeta"""
    _check_zeta(zeta, nu_kappa)
    return ((1 + zeta) * mu - 1 + (kappa + zeta) * np.log(nu_kappa / zeta)
            - kappa - zeta * (mu - kappa) / nu_kappa)


@dataclass
class SieveParams:
    kappa: float = 2.0
    zeta: float = 0.360
    mu: float = 4.628
    nu_kappa: float = NU_KAPPA
    theta: float = 0.933
    theta1: float = 0.933
    theta2: float = 0.933
    eta: float = 0.5
    s: int = 3
    r: int = TARGET_R
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.alpha is None:
            self.alpha = 0.5 - 1 / (4 * self.theta)
        if self.kappa <= 1:
            raise PreconditionError(f"kappa must be > 1, got {self.kappa}")
        if not 0 < self.zeta < self.nu_kappa:
            raise PreconditionError(f"zeta must lie in (0, {self.nu_kappa}), got {self.zeta}")
        if not 0 < self.alpha < 1:
            raise PreconditionError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def delta(self) -> float:
        """mu written as 4 + delta"""
        return self.mu - 4

    def rhs(self) -> float:
        return float(hr_rhs(self.kappa, self.zeta, self.mu, self.nu_kappa))

    def satisfied(self) -> bool:
        """True if r strictly exceeds the inequality's right-hand side"""
        return self.r > self.rhs()

    def to_dict(self) -> dict:
        row = asdict(self)
        row.update(delta=self.delta, rhs=self.rhs(), satisfied=self.satisfied())
        return row


class MinR(NamedTuple):
    r: int
    zeta: float
    rhs: float


def min_r(kappa: float, mu: float, nu_kappa: float = NU_KAPPA) -> MinR:
    """Smallest integer r exceeding min over zeta of hr_rhs.

    A grid scan over (1e-4, nu_kappa - 1e-4) locates the minimum; a
    golden-section search refines it inside the neighbouring grid cells.
    """
    grid = np.linspace(ZETA_EDGE, nu_kappa - ZETA_EDGE, ZETA_GRID_POINTS)
    values = hr_rhs(kappa, grid, mu, nu_kappa)
    i = int(np.argmin(values))
    zeta, best = float(grid[i]), float(values[i])

    if 0 < i < grid.size - 1:
        f = lambda z: float(hr_rhs(kappa, z, mu, nu_kappa))
        try:
            result = minimize_scalar(f, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                                     method="golden", options={"xtol": 1e-12})
            if result.fun < best and 0 < result.x < nu_kappa:
                zeta, best = float(result.x), float(result.fun)
        except ValueError as e:
            logger.debug(f"Golden refinement skipped: {e}")

    return MinR(math.floor(best) + 1, zeta, best)


def mu_of_theta(theta: float) -> float:
    """Smallest admissible mu for level theta, 4 / (2 theta - 1)"""
    if theta <= 0.5:
        raise PreconditionError(f"theta must exceed 1/2, got {theta}")
    return 4 / (2 * theta - 1)


def _theta_feasible(theta: float, kappa: float, nu_kappa: float, r: int) -> bool:
    return min_r(kappa, mu_of_theta(theta) + MU_MARGIN, nu_kappa).r <= r


def _smallest_feasible_theta(step: float, kappa: float, nu_kappa: float, r: int) -> float:
    """Bisection on the theta grid; feasibility is monotone since min_r grows with mu"""
    lo, hi = int(round(0.5 / step)) + 1, int(round(1 / step))
    if not _theta_feasible(hi * step, kappa, nu_kappa, r):
        raise PreconditionError(f"r = {r} is infeasible even at theta = 1")
    while lo < hi:
        mid = (lo + hi) // 2
        if _theta_feasible(mid * step, kappa, nu_kappa, r):
            hi = mid
        else:
            lo = mid + 1
    return round(hi * step, 10)


@dataclass(frozen=True)
class Cor1Thresholds:
    theta_min: float
    theta_exact: float
    mu_min: float

    def to_dict(self) -> dict:
        return {"theta_min": self.theta_min, "theta_exact": self.theta_exact, "mu_min": self.mu_min}


def cor1_thresholds(kappa: float = 2.0, nu_kappa: float = NU_KAPPA, r: int = TARGET_R) -> Cor1Thresholds:
    """Smallest theta with r feasible, on the 1e-3 reporting grid and the 1e-4 grid"""
    theta_min = _smallest_feasible_theta(1e-3, kappa, nu_kappa, r)
    theta_exact = _smallest_feasible_theta(1e-4, kappa, nu_kappa, r)
    logger.info(f"theta_min = {theta_min}, theta_exact = {theta_exact} for r = {r}")
    return Cor1Thresholds(theta_min, theta_exact, mu_of_theta(theta_exact))


def cor2_theta_threshold(s: int) -> float:
    """Solution of 1/theta = (1 - 1/(2 theta)) Lambda_s, i.e. 1/Lambda_s + 1/2"""
    return 1 / lambda_s(s) + 0.5


def cor2_eta_floor(s: int) -> float:
    """Solution of (3/2 - 1/(2 eta)) Lambda_s = 1"""
    return 1 / (3 - 2 / lambda_s(s))


def _case2_terms(eta: float, s: int):
    return 1 / eta - 1, (1.5 - 1 / (2 * eta)) * lambda_s(s)


@dataclass(frozen=True)
class Cor4Region:
    eta: float
    theta1: float
    feasible: bool
    binding: str  # case1, case2_interval, case2_sieve or none
    threshold: float
    case1_eta_threshold: float
    case2_theta_threshold: Optional[float]

    def to_dict(self) -> dict:
        return asdict(self)


def cor4_region(eta: float, theta1: float, s: int = 3) -> Cor4Region:
    """Admissibility of (eta, theta1) under the two alternative conditions"""
    if theta1 <= 0:
        raise PreconditionError(f"theta1 must be positive, got {theta1}")
    eta_threshold = 1 / (1 + 1 / theta1)
    case1 = cor2_theta_threshold(s) <= theta1 <= 1 and eta_threshold < eta <= 1

    theta_threshold = None
    case2 = False
    term = None
    lo, hi = CASE2_ETA_RANGE
    if lo <= eta <= hi:
        interval, sieve = _case2_terms(eta, s)
        smallest = min(interval, sieve)
        term = "case2_interval" if interval <= sieve else "case2_sieve"
        theta_threshold = 1 / smallest if smallest > 0 else math.inf
        case2 = theta_threshold < theta1 <= 1

    if case1:
        binding, threshold = "case1", eta_threshold
    elif case2:
        binding, threshold = term, theta_threshold
    else:
        binding = "none"
        threshold = theta_threshold if theta_threshold is not None else eta_threshold
    return Cor4Region(eta, theta1, case1 or case2, binding, threshold, eta_threshold, theta_threshold)


@dataclass(frozen=True)
class Cor4Infimum:
    eta_crossing: float
    infimum: float
    restricted_eta: float
    restricted_infimum: float
    stated_bound: float = STATED_CASE2_BOUND

    def to_dict(self) -> dict:
        return asdict(self)


def _case2_supremum(s: int, lo: float, hi: float):
    """(eta, value) maximising min(1/eta - 1, (3/2 - 1/(2 eta)) Lambda_s) on [lo, hi]"""
    gap = lambda eta: _case2_terms(eta, s)[0] - _case2_terms(eta, s)[1]
    if gap(lo) > 0 > gap(hi):
        eta = brentq(gap, lo, hi, xtol=1e-14)
    elif gap(lo) <= 0:
        eta = lo
    else:
        eta = hi
    return eta, min(_case2_terms(eta, s))


def cor4_case2_infimum(s: int = 3) -> Cor4Infimum:
    """Infimum of the case-2 theta1 threshold, at the crossing of the two terms"""
    eta, best = _case2_supremum(s, 1 / 3 + 1e-12, 0.5)
    lo, hi = CASE2_ETA_RANGE
    eta_r, best_r = _case2_supremum(s, lo, hi)
    result = Cor4Infimum(eta, 1 / best, eta_r, 1 / best_r)
    if result.infimum < STATED_CASE2_BOUND:
        logger.warning(f"Computed infimum {result.infimum} is below the stated bound {STATED_CASE2_BOUND}")
    return result


def scan_rhs(kappa: float, mu: float, nu_kappa: float, zetas: Iterable[float]) -> List[Dict]:
    return [{"kappa": kappa, "zeta": z, "mu": mu, "nu_kappa": nu_kappa,
             "rhs": float(hr_rhs(kappa, z, mu, nu_kappa))} for z in zetas]


def scan_min_r(kappa: float, mus: Iterable[float], nu_kappa: float = NU_KAPPA) -> List[Dict]:
    rows = []
    for mu in mus:
        best = min_r(kappa, mu, nu_kappa)
        rows.append({"kappa": kappa, "mu": mu, "nu_kappa": nu_kappa,
                     "r": best.r, "zeta": best.zeta, "rhs": best.rhs})
    return rows


def scan_cor4(etas: Iterable[float], theta1s: Iterable[float], s: int = 3) -> List[Dict]:
    theta1s = list(theta1s)
    return [cor4_region(eta, t, s).to_dict() for eta in etas for t in theta1s]


def frange(start: float, stop: float, step: float) -> List[float]:
    """Inclusive float grid, rounded to the step's precision"""
    if step <= 0:
        raise PreconditionError(f"step must be positive, got {step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    digits = max(0, -int(math.floor(math.log10(step)))) + 2
    return [round(start + i * step, digits) for i in range(count)]
