import math

import numpy as np
import pytest

from arith.catalog import builtin_spec, random_spec
from arith.errors import SieveConfigError
from arith.primes import factorize
from arith.sieve import (
    delta_identity_residual,
    lambda_convolution_identity,
    mangoldt_step_function,
    mangoldt_weighted_partials,
    partial_summation_residual,
    quadrature_checkpoints,
    selberg_constant,
    selberg_sum,
    short_interval_ratio,
    sieve_table,
    step_integral,
)

RANDOM = random_spec(seed=5, radius=(0.5, 1.5), arg_spread=2.0)


def brute_force(sign_of, n_max):
    return np.cumsum([0] + [sign_of(factorize(n)) for n in range(1, n_max + 1)])


def test_unit_partial_sums(unit):
    table = sieve_table(unit, [10, 100, 1000])
    assert table.M_g.real.tolist() == [10, 100, 1000]
    assert table.M_abs.tolist() == [10, 100, 1000]
    assert table.N_g[0].real == pytest.approx(math.lgamma(11), rel=1e-14)
    assert table.L_g[0].real == pytest.approx(sum(1 / n for n in range(1, 11)), rel=1e-14)


def test_liouville_strong_against_brute_force(liouville):
    cps = [1, 17, 500, 2000]
    expected = brute_force(lambda f: (-1) ** len(f), 2000)
    table = sieve_table(liouville, cps)
    assert table.M_g.real.tolist() == [expected[c] for c in cps]


def test_liouville_complete_against_brute_force():
    cps = [100, 999, 2000]
    expected = brute_force(lambda f: (-1) ** sum(k for _, k in f), 2000)
    table = sieve_table(builtin_spec("liouville-complete"), cps)
    assert table.M_g.real.tolist() == [expected[c] for c in cps]
    assert table.M_abs.tolist() == cps


def test_segment_length_does_not_change_sums():
    cps = [1000, 5000, 20000]
    coarse = sieve_table(RANDOM, cps)
    fine = sieve_table(RANDOM, cps, segment_length=257)
    np.testing.assert_allclose(fine.M_g, coarse.M_g, rtol=1e-12)
    np.testing.assert_allclose(fine.L_abs, coarse.L_abs, rtol=1e-12)


def test_worker_count_is_bit_exact():
    cps = [3000, 20000]
    one = sieve_table(RANDOM, cps, segment_length=1024, worker_count=1)
    four = sieve_table(RANDOM, cps, segment_length=1024, worker_count=4)
    assert np.array_equal(one.M_g, four.M_g)
    assert np.array_equal(one.N_abs, four.N_abs)


def test_table_lookup_and_subset(unit):
    table = sieve_table(unit, [10, 20, 30])
    assert table.at(20)["M_g"] == 20
    assert table.subset([10, 30]).checkpoints.tolist() == [10, 30]
    with pytest.raises(SieveConfigError):
        table.index(15)


def test_table_csv(unit, tmp_path):
    path = sieve_table(unit, [10, 100]).to_csv(tmp_path / "unit.csv")
    lines = path.read_text().splitlines()
    assert lines[0].startswith("x,Re M_g")
    assert lines[2].startswith("100,100.0")


def test_checkpoint_out_of_range(unit):
    with pytest.raises(SieveConfigError):
        sieve_table(unit, [0, 10])


@pytest.mark.parametrize("name", ["unit", "liouville", "liouville-complete"])
def test_convolution_identity(name):
    spec = builtin_spec(name)
    x = 10**4
    residual = lambda_convolution_identity(spec, x)
    N = abs(complex(sieve_table(spec, [x]).N_g[-1]))
    assert residual <= 1e-6 * (1 + N)


def test_convolution_identity_random():
    x = 10**4
    residual = lambda_convolution_identity(RANDOM, x)
    assert residual <= 1e-6 * (1 + abs(complex(sieve_table(RANDOM, [x]).N_g[-1])))


def test_partial_summation_identity():
    assert partial_summation_residual(RANDOM, 20000).relative_residual < 1e-2


def test_delta_identity(unit):
    check = delta_identity_residual(unit, 20000)
    assert check.relative_residual < 1e-2
    assert check.scale > 0


def test_quadrature_checkpoints_cover_dense_range():
    cps = quadrature_checkpoints(10**5)
    assert cps[:2000].tolist() == list(range(1, 2001))
    assert cps[-1] == 10**5
    assert np.all(np.diff(cps) > 0)


def test_step_integral_exact_on_unit_steps():
    cps = np.arange(1, 11)
    ones = np.ones(10)
    assert step_integral(cps, ones, "u2").real == pytest.approx(1 - 1 / 10)
    assert step_integral(cps, ones, "u1").real == pytest.approx(math.log(10))


def test_mangoldt_step_function(unit):
    powers, coeffs, partials = mangoldt_step_function(unit, 30)
    assert powers.tolist()[:5] == [2, 3, 4, 5, 7]
    assert partials[-1].real == pytest.approx(sum(math.log(p) for p, _ in
                                                  (factorize(int(q))[0] for q in powers)))
    with pytest.raises(SieveConfigError):
        mangoldt_step_function(unit, 10**12)


def test_mangoldt_weighted_partials_chebyshev(unit):
    v, sums = mangoldt_weighted_partials(unit, math.log(1000), 0.5)
    assert v[0] == 0.0
    # ψ(1000) ≈ 996.68
    assert sums[-1].real == pytest.approx(996.68, abs=0.01)


def test_short_interval_ratio(unit):
    assert short_interval_ratio(unit, 1000, 2.0) == pytest.approx(1.0)
    with pytest.raises(SieveConfigError):
        short_interval_ratio(unit, 10, 2.0)


def test_selberg_constant_rho_one_is_trivial():
    value, tail = selberg_constant(1.0, 10**4)
    assert value == pytest.approx(1.0, abs=1e-12)
    assert tail >= 0


def test_selberg_sum_rejects_bad_input():
    with pytest.raises(SieveConfigError):
        selberg_sum(0.0, 100)


@pytest.mark.slow
def test_selberg_second_order_ratio():
    x = 10**6
    F, _ = selberg_constant(2.0, 10**7)
    ratio = selberg_sum(2.0, x) / (x * math.log(x) * F)
    assert abs(ratio - 1) <= 0.10
