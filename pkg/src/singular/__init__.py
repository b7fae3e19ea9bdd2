"""Singular series, main-term integrals and sieve densities"""
from .euler import (
    SingularValue,
    ResidueClass,
    binary_sing,
    binary_sing_ap,
    ternary_one_ap,
    ternary_two_ap,
)
from .series import (
    hs_term,
    hs_series,
    hs_series_table,
    g_sum,
    f_sum,
    binary_sing_series,
    binary_sing_series_table,
    ternary_one_ap_series,
    ternary_one_ap_series_table,
    ternary_two_ap_series,
    ternary_two_ap_series_table,
)
from .integrals import adaptive_simpson, h_integral, binary_h_integral, xi
from .omega import (
    omega_d,
    omega_prime_case,
    printed_case_one,
    condition_a_constant,
    condition_b_constant,
)
