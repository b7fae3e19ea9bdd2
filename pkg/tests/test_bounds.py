import numpy as np
import pytest

from src.bounds import (
    SieveParams,
    cor1_thresholds,
    cor2_eta_floor,
    cor2_theta_threshold,
    cor4_case2_infimum,
    cor4_region,
    frange,
    hr_rhs,
    lambda_s,
    min_r,
    mu_of_theta,
    scan_cor4,
    scan_min_r,
    scan_rhs,
)
from src.errors import PreconditionError


def test_rhs_below_nine_at_stated_constants():
    value = float(hr_rhs(2, 0.360, 4.628, 4.42))
    assert 8.99 < value < 9.00


def test_hr_rhs_is_vectorised():
    zetas = np.array([0.2, 0.36, 1.0])
    values = hr_rhs(2, zetas, 4.628, 4.42)
    assert values.shape == (3,)
    assert values[1] == pytest.approx(float(hr_rhs(2, 0.36, 4.628, 4.42)))


@pytest.mark.parametrize("zeta", [0.0, -0.1, 4.42, 5.0])
def test_hr_rhs_rejects_zeta_outside_range(zeta):
    with pytest.raises(PreconditionError):
        hr_rhs(2, zeta, 4.628, 4.42)


def test_min_r_is_nine():
    best = min_r(2, 4.628, 4.42)
    assert best.r == 9
    assert best.rhs == pytest.approx(8.9984, abs=1e-3)
    assert best.zeta == pytest.approx(0.361, abs=5e-3)
    assert best.rhs <= float(hr_rhs(2, 0.360, 4.628, 4.42))


def test_lambda_three():
    assert 2.7710 < lambda_s(3) < 2.7720
    assert lambda_s(3) >= 2.771
    with pytest.raises(PreconditionError):
        lambda_s(0)


def test_cor1_theta_thresholds():
    thresholds = cor1_thresholds()
    assert 0.9325 <= thresholds.theta_min <= 0.9335
    assert thresholds.theta_exact <= thresholds.theta_min
    assert thresholds.mu_min == pytest.approx(mu_of_theta(thresholds.theta_exact))
    assert min_r(2, mu_of_theta(0.932), 4.42).r > 9
    assert min_r(2, mu_of_theta(0.933), 4.42).r == 9


def test_mu_of_theta_domain():
    assert mu_of_theta(1.0) == pytest.approx(4.0)
    with pytest.raises(PreconditionError):
        mu_of_theta(0.5)


def test_cor2_thresholds():
    assert 0.8605 < cor2_theta_threshold(3) < 0.8610
    assert 0.4385 < cor2_eta_floor(3) < 0.4395
    assert cor2_eta_floor(2) == pytest.approx(0.5237, abs=1e-4)


def test_cor4_case1_threshold():
    region = cor4_region(0.5, 0.861)
    assert 0.462 < region.case1_eta_threshold < 0.463
    assert region.feasible
    assert region.binding == "case1"


def test_cor4_case2_interval_binding():
    region = cor4_region(0.47, 0.9)
    assert region.feasible
    assert region.binding == "case2_interval"
    assert region.case2_theta_threshold == pytest.approx(1 / (1 / 0.47 - 1))


def test_cor4_infeasible_point():
    region = cor4_region(0.47, 0.85)
    assert not region.feasible
    assert region.binding == "none"


def test_cor4_case2_infimum():
    result = cor4_case2_infimum()
    assert result.infimum >= 0.782
    assert result.infimum == pytest.approx(cor2_theta_threshold(3), abs=1e-9)
    assert result.eta_crossing == pytest.approx(0.46261, abs=1e-4)
    assert result.restricted_eta == pytest.approx(0.463)
    assert result.restricted_infimum == pytest.approx(0.8622, abs=1e-4)
    assert result.stated_bound == 0.782


def test_sieve_params_defaults():
    params = SieveParams()
    assert params.alpha == pytest.approx(0.5 - 1 / (4 * 0.933))
    assert params.delta == pytest.approx(0.628)
    assert params.satisfied()
    row = params.to_dict()
    assert row["r"] == 9
    assert 8.99 < row["rhs"] < 9.0


def test_sieve_params_rejects_bad_values():
    with pytest.raises(PreconditionError):
        SieveParams(kappa=1.0)
    with pytest.raises(PreconditionError):
        SieveParams(zeta=5.0)


def test_scans():
    zetas = frange(0.3, 0.4, 0.02)
    assert zetas == [0.3, 0.32, 0.34, 0.36, 0.38, 0.4]
    rows = scan_rhs(2, 4.628, 4.42, zetas)
    assert [row["zeta"] for row in rows] == zetas
    mu_rows = scan_min_r(2, [4.5, 4.628, 5.0])
    assert [row["r"] for row in mu_rows] == sorted(row["r"] for row in mu_rows)
    cor4_rows = scan_cor4([0.45, 0.47, 0.5], [0.85, 0.9])
    assert len(cor4_rows) == 6
    with pytest.raises(PreconditionError):
        frange(0, 1, 0)
