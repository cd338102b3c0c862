import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arith.catalog import builtin_spec
from arith.dirichlet import (
    class_euler_product,
    dirichlet_mean_square,
    euler_product,
    g0_bound,
    g0_factor,
    halasz_pointwise,
    halasz_sweep,
    intbound_exponent,
    j_integral,
    montgomery_majorant_check,
    montgomery_trial,
    parseval_oracle,
    zero_free_check,
    zeta,
)
from arith.errors import GridError, RefusalError, SieveConfigError, ZetaPrecisionWarning

ZETA4_OVER_ZETA2 = (math.pi**4 / 90) / (math.pi**2 / 6)


class TestZeta:
    def test_even_values(self):
        assert zeta(2) == pytest.approx(math.pi**2 / 6, rel=1e-12)
        assert zeta(4) == pytest.approx(math.pi**4 / 90, rel=1e-12)

    def test_against_mpmath_off_axis(self):
        s = 1.5 + 10j
        expected = complex(mpmath.zeta(mpmath.mpc(s.real, s.imag)))
        assert abs(zeta(s) - expected) < 1e-9

    def test_large_imaginary_part_uses_more_terms(self):
        s = 1.2 + 300j
        expected = complex(mpmath.zeta(mpmath.mpc(s.real, s.imag)))
        assert abs(zeta(s) - expected) < 1e-8

    @pytest.mark.parametrize("k", [2, 3])
    def test_laurent_expansion_at_pole(self, k):
        h = 10.0**-k
        assert zeta(1 + h) - 1 / h == pytest.approx(np.euler_gamma, abs=h / 10)

    def test_rejects_left_of_abscissa(self):
        with pytest.raises(ValueError):
            zeta(1.0)
        with pytest.raises(ValueError):
            zeta(0.5 + 3j)

    def test_warns_near_pole(self):
        with pytest.warns(ZetaPrecisionWarning):
            zeta(1.0005)


class TestEulerProduct:
    def test_unit_reproduces_zeta(self, unit):
        result = euler_product(unit, 2)
        assert result.value.real == pytest.approx(math.pi**2 / 6, rel=1e-5)
        assert abs(result.value.imag) < 1e-12
        assert result.tail_bound > 0

    def test_liouville_complete_is_zeta_ratio(self):
        result = euler_product(builtin_spec("liouville-complete"), 2)
        assert result.value.real == pytest.approx(ZETA4_OVER_ZETA2, rel=1e-5)

    def test_absolute_uses_modulus(self):
        spec = builtin_spec("liouville")
        plain = euler_product(spec, 2)
        absolute = euler_product(spec, 2, absolute=True)
        assert absolute.absolute
        assert absolute.value.real == pytest.approx(euler_product(builtin_spec("unit"), 2).value.real, rel=1e-12)
        assert plain.value.real < absolute.value.real

    def test_class_products_multiply_to_total(self):
        spec = builtin_spec("dirichlet-mod4")
        s = 1.3 + 2j
        total = euler_product(spec, s).value
        # χ_4(2) = 0: o fator do primo excepcional é 1
        assert complex(np.prod(class_euler_product(spec, s))) == pytest.approx(total, rel=1e-10)

    def test_rejects_bad_inputs(self, unit):
        with pytest.raises(ValueError):
            euler_product(unit, 1.0)
        with pytest.raises(SieveConfigError):
            euler_product(unit, 2, cutoff=100)


class TestG0:
    def test_unit_value_at_two(self, unit):
        result = g0_factor(unit, 2)
        assert result.value.real == pytest.approx(1.0465, abs=1e-3)
        assert result.bound == pytest.approx(3.411, abs=1e-3)
        assert result.within_bound

    def test_bound_formula(self):
        assert g0_bound(1.0) == pytest.approx(2 * math.exp(2) * math.log(2) ** 4)

    def test_small_b_evaluated_at_one(self):
        result = g0_factor(builtin_spec("half"), 1.5 + 4j)
        assert result.bound == pytest.approx(g0_bound(1.0))


class TestHalaszPointwise:
    def test_liouville_point_not_skipped(self, liouville):
        point = halasz_pointwise(liouville, 10**4, 0.0)
        assert not point.skipped
        assert point.lhs > 0
        assert point.bounds["easy"] > 0
        assert point.bounds["remdecay"] == pytest.approx(1.0)

    def test_cb_bounds_only_inside_cb(self, liouville):
        assert halasz_pointwise(liouville, 10**4, 0.5).bounds["haldecay"] is not None
        point = halasz_pointwise(builtin_spec("half"), 10**4, 0.5)
        assert point.bounds["haldecay"] is None
        assert point.ratios["intbound"] is None

    def test_sweep_collects_ratios(self, liouville, tmp_path):
        sweep = halasz_sweep(liouville, 10**4, taus=[-1.0, 0.0, 0.5, 3.0], workers=2)
        assert [p.tau for p in sweep.points] == [-1.0, 0.0, 0.5, 3.0]
        assert "easy" in sweep.max_ratios()
        header = sweep.to_csv(tmp_path / "sweep.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header.startswith("tau,G_abs,calG_sigma")


class TestZeroFree:
    def test_small_bound_has_no_zeros(self):
        verdict = zero_free_check(builtin_spec("half"), 1.1, 10.0)
        assert verdict.no_zeros_possible
        assert verdict.passed

    def test_rho2_clean_near_real_axis(self):
        verdict = zero_free_check(builtin_spec("rho2"), 1.2, 5.0)
        assert verdict.excluded_radius == pytest.approx(1.2 / math.log(2))
        assert verdict.passed

    @pytest.mark.parametrize("name", ["liouville", "liouville-complete"])
    def test_refusals(self, name):
        with pytest.raises(RefusalError):
            zero_free_check(builtin_spec(name), 1.1, 10.0)


class TestLineIntegrals:
    def test_grid_errors(self, unit):
        with pytest.raises(GridError):
            j_integral(unit, 1.5, 10.0)
        with pytest.raises(GridError):
            j_integral(unit, 1.2, 10.0, grid_step=0.5)

    def test_h_requires_a(self, unit):
        with pytest.raises(ValueError):
            j_integral(unit, 1.2, 10.0, integrand="H")

    def test_matches_parseval_for_same_polynomial(self, unit):
        sigma = 1.2
        line = j_integral(unit, sigma, 120.0, integrand="lambda", poly_length=200)
        oracle = parseval_oracle(unit, sigma, math.log(200))
        assert oracle.N == 200
        assert abs(line.total - oracle.value) / oracle.value <= 0.05

    def test_euler_integrands_are_positive(self, unit):
        g = j_integral(unit, 1.3, 20.0, integrand="G", cutoff=10**3)
        cal = j_integral(unit, 1.3, 20.0, integrand="calG", cutoff=10**3)
        h = j_integral(unit, 1.3, 20.0, integrand="H", A=1.0, cutoff=10**3)
        assert g.value == pytest.approx(cal.value, rel=1e-9)
        assert h.value == pytest.approx(0.0, abs=1e-9 * g.value)


class TestMontgomery:
    def test_majorant_holds(self):
        check = montgomery_majorant_check(20, seed=1)
        assert check.passed == check.trials == 20
        assert check.max_ratio <= 3.03
        assert check.families == {"phase": 7, "real": 7, "dominated": 6}

    def test_equal_real_coefficients_ratio_one(self):
        b = np.linspace(0.1, 1.0, 12)
        ns = np.arange(1, 13)
        ok, ratio = montgomery_trial(b, b, ns, 1.3, 25.0)
        assert ok
        assert ratio == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_equal_modulus_random_phases(self, seed):
        rng = np.random.default_rng(seed)
        ns = np.sort(rng.choice(np.arange(1, 201), size=30, replace=False))
        b = rng.uniform(0.0, 1.0, size=30)
        a = b * np.exp(2j * math.pi * rng.uniform(size=30))
        ok, ratio = montgomery_trial(a, b, ns, 1.05, 80.0)
        assert ok
        assert ratio <= 3 * 1.01

    def test_zero_majorant_is_vacuous_pass(self):
        ns = np.arange(1, 6)
        assert montgomery_trial(np.zeros(5), np.zeros(5), ns, 1.5, 10.0) == (True, None)

    def test_constant_polynomial(self):
        assert dirichlet_mean_square(np.array([1.0]), np.array([1]), 1.5, 7.0) == pytest.approx(14.0)

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            montgomery_majorant_check(0)


@given(st.floats(min_value=0.0, max_value=1e6), st.floats(min_value=0.0, max_value=1e6))
def test_intbound_exponent_monotone_below_half(u, v):
    lo, hi = sorted((u, v))
    assert intbound_exponent(lo) <= intbound_exponent(hi)
    assert 0 <= intbound_exponent(hi) < 0.5
