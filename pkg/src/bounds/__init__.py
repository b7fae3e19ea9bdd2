"""Sieve-parameter inequalities and corollary thresholds"""
from .params import (
    SieveParams,
    MinR,
    Cor1Thresholds,
    Cor4Region,
    Cor4Infimum,
    lambda_s,
    hr_rhs,
    min_r,
    mu_of_theta,
    cor1_thresholds,
    cor2_theta_threshold,
    cor2_eta_floor,
    cor4_region,
    cor4_case2_infimum,
    scan_rhs,
    scan_min_r,
    scan_cor4,
    frange,
)
