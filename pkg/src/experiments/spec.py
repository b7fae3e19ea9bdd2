"""Declarative experiment descriptions and their reports"""
import logging
import math
from dataclasses import dataclass, field, asdict, fields, replace
from enum import Enum
from typing import Any, Dict, List, Tuple

from ..config.settings import A_DISPLAY, P_MAX, SEED
from ..errors import ConfigError

logger = logging.getLogger(__name__)


class Kind(str, Enum):
    THM1 = "thm1"
    THM2 = "thm2"
    THM3_BV = "thm3_bv"
    THM4_KAWADA = "thm4_kawada"
    THM5 = "thm5"
    THM6_VARIANCE = "thm6_variance"
    THM7 = "thm7"
    CONJECTURE_GOLDBACH = "conjecture_goldbach"
    CONJECTURE_TWIN = "conjecture_twin"
    LEMMA1 = "lemma1"
    LEMMA2 = "lemma2"


Q_RULES = ("fixed", "bv")
INT_FIELDS = ("X1", "X2", "Y", "Y1", "Y2", "R", "n", "Q", "Q1", "Q2", "a", "a1", "a2", "M", "N", "trials", "seed", "P_max")


@dataclass
class ExperimentSpec:
    kind: Kind
    X1: int = 0
    X2: int = 0
    Y: int = 0
    Y1: int = 0
    Y2: int = 0
    R: int = 0
    n: int = 0
    Q: int = 1
    Q1: int = 1
    Q2: int = 1
    a: int = 1
    a1: int = 1
    a2: int = 1
    weighted: bool = True
    max_over_a: bool = False
    A_display: float = A_DISPLAY
    M: int = 0
    N: int = 0
    trials: int = 1
    seed: int = SEED
    theta: float = 0.9
    r_exponent: float = 0.5
    q_rule: str = "fixed"
    P_max: int = P_MAX

    def __post_init__(self):
        try:
            self.kind = Kind(self.kind)
        except ValueError:
            raise ConfigError(f"Unknown experiment kind: {self.kind}")
        if self.q_rule not in Q_RULES:
            raise ConfigError(f"q_rule must be one of {Q_RULES}, got {self.q_rule}")

    @classmethod
    def field_names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "ExperimentSpec":
        unknown = set(values) - set(cls.field_names())
        if unknown:
            raise ConfigError(f"Unknown experiment keys: {', '.join(sorted(unknown))}")
        if "kind" not in values:
            raise ConfigError("Experiment needs a 'kind'")
        return cls(**values)

    def with_values(self, **changes) -> "ExperimentSpec":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        row = asdict(self)
        row["kind"] = self.kind.value
        return row

    @property
    def log_scale(self) -> float:
        """L = log Y, with the kind's own interval length"""
        scale = {Kind.THM2: self.Y2, Kind.LEMMA1: self.N, Kind.LEMMA2: self.N}.get(self.kind, self.Y)
        return math.log(scale) if scale > 1 else 0.0

    def hypothesis_warnings(self) -> List[str]:
        """Theorem hypotheses that fail at this scale; advisory only"""
        checks = _HYPOTHESES.get(self.kind, ())
        warnings = [message.format(s=self) for test, message in checks if not test(self)]
        for w in warnings:
            logger.warning(f"{self.kind.value}: {w}")
        return warnings

    def range_errors(self) -> List[str]:
        """Parameters outside the ranges every kind accepts"""
        problems = []
        for name in INT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                problems.append(f"{name} must be an integer, got {value!r}")
            elif value < 0:
                problems.append(f"{name} must be >= 0, got {value}")
        for name in ("Q", "Q1", "Q2", "trials"):
            value = getattr(self, name)
            if isinstance(value, int) and value < 1:
                problems.append(f"{name} must be >= 1, got {value}")
        for name, floor in _LENGTHS.get(self.kind, ()):
            value = getattr(self, name)
            if isinstance(value, int) and value < floor:
                problems.append(f"{self.kind.value} needs {name} >= {floor}, got {value}")
        if isinstance(self.P_max, int) and self.P_max < 3:
            problems.append(f"P_max must be >= 3, got {self.P_max}")
        if isinstance(self.seed, int) and not 0 <= self.seed < 2 ** 64:
            problems.append(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        for name in ("theta", "r_exponent", "A_display"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                problems.append(f"{name} must be a number, got {value!r}")
        if problems:
            return problems
        if not 0 < self.theta <= 1:
            problems.append(f"theta must lie in (0, 1], got {self.theta}")
        if not 0 < self.r_exponent <= 1:
            problems.append(f"r_exponent must lie in (0, 1], got {self.r_exponent}")
        if self.A_display < 0:
            problems.append(f"A_display must be >= 0, got {self.A_display}")
        return problems


def _odd(n: int) -> bool:
    return n % 2 == 1


_HYPOTHESES = {
    Kind.THM1: (
        (lambda s: _odd(s.n), "n = {s.n} is not odd"),
        (lambda s: s.n >= s.X1 + s.X2 + 2 * s.Y, "n = {s.n} < X1 + X2 + 2Y"),
        (lambda s: s.X1 >= s.Y and s.X2 >= s.Y, "X1, X2 must be >= Y"),
        (lambda s: s.a1 <= s.n - s.X1 - s.Y, "a1 > n - X1 - Y"),
    ),
    Kind.THM2: (
        (lambda s: _odd(s.n), "n = {s.n} is not odd"),
        (lambda s: s.X1 >= s.Y1 and s.X2 >= s.Y2, "X1 >= Y1 and X2 >= Y2 fail"),
        (lambda s: s.Y1 <= s.Y2, "Y1 = {s.Y1} exceeds Y2 = {s.Y2}"),
        (lambda s: s.n - s.X1 - s.Y1 - s.X2 - s.Y2 >= 0, "n - X1 - Y1 - X2 - Y2 < 0"),
        (lambda s: s.a <= s.n - s.X1 - s.Y1, "a > n - X1 - Y1"),
    ),
    Kind.THM3_BV: (
        (lambda s: s.X1 >= s.Y, "X = {s.X1} < Y = {s.Y}"),
        (lambda s: s.Q <= max(1.0, s.Y / math.sqrt(max(s.X1, 1))), "Q = {s.Q} exceeds Y / sqrt(X)"),
    ),
    Kind.THM4_KAWADA: (
        (lambda s: s.X2 <= 2 * s.X1 - s.Y, "X2 = {s.X2} > 2 X1 - Y: p3 range is cut off at 0"),
        (lambda s: s.Y <= s.X1 and s.Y <= s.X2, "Y must not exceed X1 or X2"),
    ),
    Kind.THM5: (
        (lambda s: s.Y <= s.X2 <= 2 * s.X1 - s.Y, "Y <= X2 <= 2 X1 - Y fails"),
        (lambda s: s.a1 <= s.X1, "a1 > X1"),
    ),
    Kind.THM6_VARIANCE: (
        (lambda s: 2 * s.X1 - s.X2 - s.Y >= 0, "2 X1 - X2 - Y < 0"),
        (lambda s: 2 * s.X1 - s.X2 - s.Y <= 0 or 0.5 <= s.Y / (2 * s.X1 - s.X2 - s.Y) <= 2,
         "Y is not comparable to 2 X1 - X2 - Y"),
        (lambda s: s.R <= s.Y, "R = {s.R} exceeds Y"),
    ),
    Kind.THM7: (
        (lambda s: 2 * s.X1 - s.X2 - s.Y >= 0, "2 X1 - X2 - Y < 0"),
        (lambda s: s.R <= s.Y, "R = {s.R} exceeds Y"),
        (lambda s: s.a <= s.X1, "a > X1"),
    ),
    Kind.CONJECTURE_GOLDBACH: (
        (lambda s: s.X1 - s.X2 - s.Y >= 0, "r - p2 can fall below X1 - X2 - Y < 0"),
    ),
    Kind.LEMMA1: (
        (lambda s: s.Q <= s.M and s.N <= s.M and s.M >= s.a, "needs Q <= M, N <= M, M >= a"),
    ),
    Kind.LEMMA2: (
        (lambda s: s.M >= 2 and s.N >= 2, "needs M, N >= 2"),
    ),
}

# Interval lengths each kind sums over
_LENGTHS = {
    Kind.THM1: (("Y", 1),),
    Kind.THM2: (("Y1", 1), ("Y2", 1)),
    Kind.THM3_BV: (("Y", 1),),
    Kind.THM4_KAWADA: (("Y", 1),),
    Kind.THM5: (("Y", 1),),
    Kind.THM6_VARIANCE: (("Y", 1), ("R", 1)),
    Kind.THM7: (("Y", 1), ("R", 1)),
    Kind.CONJECTURE_GOLDBACH: (("Y", 1), ("R", 1)),
    Kind.CONJECTURE_TWIN: (("Y", 1), ("R", 1)),
    Kind.LEMMA1: (("M", 1), ("N", 1)),
    Kind.LEMMA2: (("M", 2), ("N", 2)),
}


@dataclass
class ExperimentReport:
    kind: str
    lhs: float
    main_scale: float
    scale_formula: str
    log_scale: float
    A_display: float = A_DISPLAY
    index_name: str = "q"
    rows: List[Tuple[int, float]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def normalized(self) -> float:
        return self.lhs / self.main_scale if self.main_scale else 0.0

    @property
    def normalized_la(self) -> float:
        """normalized * L^A, the quantity the bounds claim stays O(1)"""
        return self.normalized * self.log_scale ** self.A_display

    def summary(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "lhs": self.lhs,
            "main_scale": self.main_scale,
            "scale_formula": self.scale_formula,
            "normalized": self.normalized,
            "L": self.log_scale,
            "A_display": self.A_display,
            "normalized_LA": self.normalized_la,
            "rows": len(self.rows),
            "warnings": list(self.warnings),
            "params": dict(self.params),
        }

    def breakdown(self) -> List[Dict[str, Any]]:
        return [{self.index_name: index, "partial": value} for index, value in self.rows]
