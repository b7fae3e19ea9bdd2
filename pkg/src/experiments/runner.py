import logging
import math
from typing import Dict, List, Optional, Sequence

from ..config.settings import CHUNK_SIZE, WORKERS, validate_config
from ..errors import ConfigError, PreconditionError
from ..sieve import PrimeCache
from ..utils.report import save_report, print_report_summary
from .golden import GoldenCheck, GoldenStore
from .lemmas import hm_lemma_ratio
from .spec import ExperimentReport, ExperimentSpec, Kind
from .theorems import (
    bv_lhs,
    conjecture_lhs,
    kawada_lhs,
    thm1_lhs,
    thm2_lhs,
    thm5_lhs,
    thm6_variance,
    thm7_lhs,
)

logger = logging.getLogger(__name__)


class ExperimentRunner:
 # Runs experiments, decay ladders and golden checks
    def __init__(self, workers: int = WORKERS, cache: Optional[PrimeCache] = None,
                 chunk_size: int = CHUNK_SIZE, golden: Optional[GoldenStore] = None):
        if not validate_config():
            raise ConfigError("Invalid configuration. Please check your settings.")
        if workers < 1:
            raise ConfigError(f"workers must be >= 1, got {workers}")

        self.workers = workers
        self.cache = cache
        self.chunk_size = chunk_size
        self.golden = golden

    def _common(self, spec: ExperimentSpec) -> dict:
        return {"P_max": spec.P_max, "workers": self.workers, "cache": self.cache, "chunk_size": self.chunk_size}

    def run(self, spec: ExperimentSpec) -> ExperimentReport:
        """Evaluate one experiment"""
        logger.info(f"Running {spec.kind.value}")
        kind = spec.kind

        if kind == Kind.THM3_BV:
            report = bv_lhs(spec.X1, spec.Y, spec.Q, workers=self.workers, cache=self.cache,
                            chunk_size=self.chunk_size)
        elif kind == Kind.THM4_KAWADA:
            report = kawada_lhs(spec.X1, spec.X2, spec.Y, spec.Q2, spec.a2, spec.weighted, **self._common(spec))
        elif kind == Kind.THM5:
            report = thm5_lhs(spec.X1, spec.X2, spec.Y, spec.Q1, spec.Q2, spec.a1, spec.a2,
                              weighted=spec.weighted, max_over_a=spec.max_over_a,
                              R=spec.R or None, **self._common(spec))
        elif kind == Kind.THM6_VARIANCE:
            report = thm6_variance(spec.X1, spec.R, spec.X2, spec.Y, **self._common(spec))
        elif kind == Kind.THM7:
            report = thm7_lhs(spec.X1, spec.X2, spec.Y, spec.R, spec.Q, spec.a, spec.max_over_a,
                              **self._common(spec))
        elif kind == Kind.THM1:
            report = thm1_lhs(spec.n, spec.X1, spec.X2, spec.Y, spec.Q1, spec.Q2, spec.a1, spec.a2,
                              weighted=spec.weighted, **self._common(spec))
        elif kind == Kind.THM2:
            report = thm2_lhs(spec.n, spec.X1, spec.Y1, spec.X2, spec.Y2, spec.Q, spec.a, spec.max_over_a,
                              **self._common(spec))
        elif kind in (Kind.CONJECTURE_GOLDBACH, Kind.CONJECTURE_TWIN):
            equation = "twin" if kind == Kind.CONJECTURE_TWIN else "goldbach"
            report = conjecture_lhs(spec.X1, spec.R, spec.X2, spec.Y, spec.Q, equation, **self._common(spec))
        else:
            report = self._run_lemma(spec)

        report.A_display = spec.A_display
        return report

    def _run_lemma(self, spec: ExperimentSpec) -> ExperimentReport:
        ratio = hm_lemma_ratio(spec.kind.value, spec.M, spec.N, spec.Q, spec.a, spec.trials, spec.seed)
        return ExperimentReport(
            kind=spec.kind.value,
            lhs=ratio,
            main_scale=1.0,
            scale_formula="max LHS/RHS",
            log_scale=spec.log_scale,
            A_display=spec.A_display,
            index_name="trials",
            rows=[(spec.trials, ratio)],
            warnings=spec.hypothesis_warnings(),
            params=spec.to_dict(),
        )

    def golden_name(self, spec: ExperimentSpec) -> str:
        return f"{spec.kind.value}_M{spec.M}_N{spec.N}_Q{spec.Q}_seed{spec.seed}"

    def check_golden(self, spec: ExperimentSpec, report: ExperimentReport) -> GoldenCheck:
        """Regression check of a lemma ratio against its stored golden value"""
        if spec.kind not in (Kind.LEMMA1, Kind.LEMMA2):
            raise PreconditionError(f"golden checks apply to lemma experiments, not {spec.kind.value}")
        store = self.golden or GoldenStore()
        return store.check(self.golden_name(spec), report.lhs)

    def scale_spec(self, spec: ExperimentSpec, Y: int) -> ExperimentSpec:
        """The experiment re-parameterised at interval length Y.

        X = Y^(1/theta), R = Y^r_exponent and, under the bv rule,
        Q = Y / sqrt(X) / 10; the remaining windows are placed so each
        kind's p3 range stays consistent.
        """
        X = int(round(Y ** (1 / spec.theta)))
        R = max(1, int(round(Y ** spec.r_exponent)))
        q = max(1, int(Y / math.sqrt(X) / 10)) if spec.q_rule == "bv" else None
        kind = spec.kind

        if kind == Kind.THM3_BV:
            return spec.with_values(X1=X, Y=Y, Q=q or spec.Q)
        if kind == Kind.THM4_KAWADA:
            return spec.with_values(X1=X, X2=X, Y=Y, Q2=q or spec.Q2)
        if kind == Kind.THM5:
            return spec.with_values(X1=X, X2=X, Y=Y, R=0, Q2=q or spec.Q2)
        if kind in (Kind.THM6_VARIANCE, Kind.THM7):
            X1 = max(X, 2 * Y)
            return spec.with_values(X1=X1, X2=2 * X1 - 2 * Y, Y=Y, R=R, Q=q or spec.Q)
        if kind == Kind.THM1:
            n = 2 * X + 2 * Y + 1
            return spec.with_values(n=n, X1=X, X2=X, Y=Y, Q1=q or spec.Q1, Q2=q or spec.Q2)
        if kind == Kind.THM2:
            n = 2 * X + R + 2 * Y
            n += 1 - n % 2
            return spec.with_values(n=n, X1=X, X2=X, Y1=R, Y2=Y, Q=q or spec.Q)
        if kind == Kind.CONJECTURE_GOLDBACH:
            return spec.with_values(X1=2 * X + Y, X2=X, Y=Y, R=R, Q=q or spec.Q)
        if kind == Kind.CONJECTURE_TWIN:
            return spec.with_values(X1=R, X2=X, Y=Y, R=R, Q=q or spec.Q)
        return spec.with_values(N=Y, M=max(spec.M, Y))

    def decay_report(self, spec: ExperimentSpec, ladder: Sequence[int]) -> List[Dict]:
        """One row per rung with the normalized value and its ratio to the previous rung"""
        rows: List[Dict] = []
        previous = None
        for Y in ladder:
            scaled = self.scale_spec(spec, Y)
            report = self.run(scaled)
            ratio = report.normalized / previous if previous else None
            if previous is not None and report.normalized > previous:
                logger.warning(f"{spec.kind.value}: normalized value rose from {previous:.6g} "
                               f"to {report.normalized:.6g} at Y = {Y}")
            rows.append({
                "Y": Y,
                "X1": scaled.X1,
                "X2": scaled.X2,
                "R": scaled.R,
                "Q": max(scaled.Q, scaled.Q1, scaled.Q2),
                "lhs": report.lhs,
                "main_scale": report.main_scale,
                "normalized": report.normalized,
                "normalized_LA": report.normalized_la,
                "ratio": ratio,
                "warnings": len(report.warnings),
            })
            previous = report.normalized
        return rows

    def save(self, report: ExperimentReport, base_path: str, config: Optional[Dict] = None):
        summary = report.summary()
        if config is not None:
            summary["config"] = config
        save_report(summary, report.breakdown(), base_path)

    def print_summary(self, report: ExperimentReport):
        print_report_summary(report.summary())
