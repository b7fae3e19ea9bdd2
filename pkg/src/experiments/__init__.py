"""Numerical experiments comparing prime sums in short intervals with their main terms"""
from .spec import ExperimentSpec, ExperimentReport, Kind, Q_RULES
from .pairs import goldbach_pairs, twin_pairs, ap_error, ap_main_term, fetch_window, covering_window
from .reduction import ordered_chunks, chunk_bounds, merge_sum
from .theorems import (
    bv_lhs,
    kawada_lhs,
    thm5_lhs,
    thm6_variance,
    thm7_lhs,
    conjecture_lhs,
    thm1_lhs,
    thm2_lhs,
)
from .lemmas import Lcg64, lemma_lhs, lemma_rhs, lemma_ratio, hm_lemma_ratio
from .golden import GoldenStore, GoldenCheck
from .runner import ExperimentRunner
