import math

import numpy as np
import pytest

from arith.catalog import builtin_spec
from arith.errors import GridError
from arith.prime_analysis import (
    HALASZ_CONSTANT,
    c_coefficients,
    class_filter,
    exponent_bundle,
    gamma0_values,
    good_partition_density,
    lambda_mangoldt_sum,
    mertens_sum,
    pretentious_distance,
    residue_filter,
    rho_min,
    s_kappa,
    sigma_diff_sum,
    sigma_of,
    tau_grid,
    trig_inequality_check,
)

# constante de Meissel–Mertens
MERTENS_M = 0.2614972128


def test_mertens_second_theorem():
    x = 10**5
    assert mertens_sum(x) == pytest.approx(math.log(math.log(x)) + MERTENS_M, abs=2e-3)
    assert mertens_sum(1) == 0.0


def test_mertens_sums_split_by_residue():
    x = 10**4
    total = mertens_sum(x)
    split = mertens_sum(x, residue_filter(4, 1)) + mertens_sum(x, residue_filter(4, 3)) + 0.5
    assert split == pytest.approx(total, rel=1e-14)


def test_class_filter_uses_partition():
    spec = builtin_spec("dirichlet-mod4")
    assert mertens_sum(1000, class_filter(spec, 0)) == pytest.approx(0.5)


def test_lambda_mangoldt_sum_small():
    result = lambda_mangoldt_sum(10)
    assert result.value == pytest.approx(1.6947, abs=1e-4)
    assert result.predicted == pytest.approx(math.log(10) - np.euler_gamma)
    with pytest.raises(ValueError):
        lambda_mangoldt_sum(1)


def test_lambda_mangoldt_sum_residual_is_small():
    assert abs(lambda_mangoldt_sum(10**6).residual) < 1e-2


def test_unit_does_not_pretend_away_from_itself(unit):
    assert pretentious_distance(unit, 0.0, 10**4) == pytest.approx(0.0, abs=1e-14)
    assert pretentious_distance(unit, 1.0, 10**4) > 0.5


def test_liouville_distance_to_one(liouville):
    x = 10**4
    assert pretentious_distance(liouville, 0.0, x) == pytest.approx(2 * mertens_sum(x), rel=1e-12)


def test_tau_grid_is_fine_near_zero():
    x = 10**4
    s1 = sigma_of(x) - 1
    grid = tau_grid(x, 50.0, s1 / 4)
    assert np.all(np.diff(grid) > 0)
    assert grid[0] == pytest.approx(-50.0)
    assert grid[-1] == pytest.approx(50.0)
    assert 0.0 in grid
    near = grid[np.abs(grid) <= 10 * s1]
    assert np.max(np.diff(near)) <= s1 / 4 + 1e-12


def test_rho_min_for_liouville(liouville):
    report = rho_min(liouville, 10**4)
    assert report.rho > 0
    assert report.minima.shape == (1,)
    assert report.distances.shape[1] == len(report.taus)


def test_rho_min_of_unit_is_zero_at_origin(unit):
    report = rho_min(unit, 10**4)
    assert report.rho == pytest.approx(0.0, abs=1e-12)
    assert report.minimizers[0] == 0.0


def test_rho_min_rejects_small_exponent(liouville):
    with pytest.raises(GridError):
        rho_min(liouville, 10**4, D_exp=2.0)
    with pytest.raises(GridError):
        rho_min(liouville, 10**4, grid_step=1.0)


def test_distance_csv(liouville, tmp_path):
    path = rho_min(liouville, 10**4).to_csv(tmp_path / "d.csv")
    assert path.read_text().splitlines()[0] == "tau,D_1,D_total"


def test_sigma_diff_degenerates_at_zero():
    result = sigma_diff_sum(10**4, 0.0, prime_cutoff=10**4)
    assert result.degenerate
    assert result.lhs == 0.0


def test_sigma_diff_has_tail():
    result = sigma_diff_sum(10**4, 3.0, prime_cutoff=10**4)
    assert result.tail > 0
    assert result.ratio > 0


def test_gamma0_and_c_coefficients(unit):
    g0 = gamma0_values(unit)
    assert g0[0] == pytest.approx(HALASZ_CONSTANT * (math.pi / 2) ** 3)
    c = c_coefficients(unit, non_decreasing=True)
    assert c[0] == pytest.approx(0.5 * min(0.25, g0[0] / (1 + g0[0])))


def test_s_kappa_positive(unit):
    assert s_kappa(unit, 10**4, 0.5) == pytest.approx(mertens_sum(10**4) - mertens_sum(100), rel=1e-12)


def test_exponent_bundle_unit(unit):
    bundle = exponent_bundle(unit, 10**4)
    assert bundle.non_decreasing
    assert bundle.reasonable
    assert bundle.lambda_t > 0
    assert 0 < bundle.kappa < 1
    with pytest.raises(ValueError):
        exponent_bundle(unit, 10)


def test_good_partition_density():
    measured, expected = good_partition_density(1.0, (0.0, 0.5), 10**5)
    assert 0.7 < measured / expected < 1.5
    with pytest.raises(ValueError):
        good_partition_density(1.0, (0.5, 0.5), 10**5)


def test_trig_inequality_holds():
    check = trig_inequality_check(3000, m_max=8, seed=1)
    assert check.violations == 0
    assert check.max_ratio <= 1.0
