"""
Verificadores de teoremas: política de veredito e casos com resposta conhecida.
"""
import math

import pytest

from arith.catalog import builtin_spec, constant_spec
from arith.errors import RefusalError
from arith.mult_fn import Extension
from verify import (
    default_grid,
    r_h_lambda,
    verify_asymptotic,
    verify_compavg,
    verify_integral_average_chain,
    verify_lower_mean_value,
    verify_upper_explicit,
    verify_upper_general,
    verify_wirsing_ext,
    verify_wirsing_limit,
)
from verify.chains import compavg_window, logsum_band
from verify.reports import asymptotic_verdict, build_report, trend_slope
from verify.suite import LOWER_MEAN_VALUE_LIMIT

SMALL_GRID = [10**4, 10**5]


class TestBuildReport:
    def test_upper_mode(self, unit):
        assert build_report("t", unit, [10, 100, 1000], [1, 2, 5], [1, 1, 1]).verdict
        report = build_report("t", unit, [10, 100], [1, 20], [1, 1])
        assert not report.verdict
        assert report.fit_constant == 1.0
        assert report.max_ratio == 20.0

    def test_upper_mode_uses_floor(self, unit):
        report = build_report("t", unit, [10, 100], [0.001, 0.05], [1, 1])
        assert report.fit_constant == pytest.approx(0.01)
        assert report.verdict

    def test_lower_mode(self, unit):
        assert build_report("t", unit, [10, 100], [1, 0.5], [1, 1], mode="lower").verdict
        assert not build_report("t", unit, [10, 100], [1, 0.05], [1, 1], mode="lower").verdict
        assert not build_report("t", unit, [10, 100], [0, 1], [1, 1], mode="lower").verdict

    def test_band_mode(self, unit):
        assert build_report("t", unit, [10, 100], [1, 1.5], [1, 1], mode="band", band=(0.5, 2)).verdict
        assert not build_report("t", unit, [10, 100], [1, 3], [1, 1], mode="band", band=(0.5, 2)).verdict

    def test_limit_mode_reads_last_point(self, unit):
        assert build_report("t", unit, [10, 100], [0.2, 0.01], [1, 1], mode="limit").verdict
        assert not build_report("t", unit, [10, 100], [0.01, 0.1], [1, 1], mode="limit").verdict
        assert build_report("t", unit, [10, 100], [0.01, 0.1], [1, 1], mode="limit", tolerance=0.2).verdict

    def test_zero_rhs_leaves_ratio_undefined(self, unit):
        report = build_report("t", unit, [10, 100], [1, 1], [0, 1])
        assert report.series[0].ratio is None
        assert report.series[1].ratio == 1.0

    def test_csv_and_json(self, unit, tmp_path):
        report = build_report("t", unit, [10, 100], [1, 2], [1, 1])
        lines = report.to_csv(tmp_path / "r.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "schema_version,x,lhs,rhs,ratio"
        assert len(lines) == 3
        assert '"schema_version": 1' in report.to_json(tmp_path / "r.json").read_text(encoding="utf-8")


def test_asymptotic_verdict():
    assert asymptotic_verdict([0.0, 0.0], [1.0, 1.0]) == (0.0, 0.0, True)
    assert asymptotic_verdict([1.0, 2.0], [1.0, 1.0]) == (1.0, 2.0, True)
    assert not asymptotic_verdict([1.0, 20.0], [1.0, 1.0])[2]


def test_default_grid():
    grid = default_grid()
    assert grid[0] == 10**4 and grid[-1] == 10**7
    assert len(grid) == 7
    assert default_grid(extended=True)[-1] == 10**8


def test_trend_slope_flat():
    assert trend_slope([10, 100, 1000], [2.0, 2.0, 2.0]) == pytest.approx(0.0, abs=1e-12)


class TestHalaszVerifiers:
    def test_upper_general_unit_ratio_one(self, unit):
        report = verify_upper_general(unit, SMALL_GRID)
        assert report.ratios() == pytest.approx([1.0, 1.0])
        assert report.verdict

    def test_upper_explicit_refuses_outside_cb(self, unit):
        with pytest.raises(RefusalError):
            verify_upper_explicit(unit, SMALL_GRID)

    def test_upper_explicit_liouville_runs(self, liouville):
        report = verify_upper_explicit(liouville, SMALL_GRID)
        assert report.theorem == "upper-explicit"
        assert all(p.rhs > 0 for p in report.series)

    def test_asymptotic_refuses_outside_ca(self, liouville):
        with pytest.raises(RefusalError):
            verify_asymptotic(liouville, SMALL_GRID)

    def test_asymptotic_budget_shrinks(self):
        report = verify_asymptotic(builtin_spec("rotated-003"), [10**4, 10**5, 10**6])
        assert report.budget_monotone
        assert all(b > 0 for b in report.budget)
        assert len(report.A) == 3

    def test_r_h_vanishes_for_exact_main_term(self, unit):
        assert r_h_lambda(unit, 1.0, 1.0, SMALL_GRID).maximum == 0.0


class TestWirsing:
    def test_lower_mean_value_unit(self, unit):
        report = verify_lower_mean_value(unit, SMALL_GRID)
        assert report.verdict
        assert report.series[-1].ratio == pytest.approx(LOWER_MEAN_VALUE_LIMIT, rel=0.1)

    def test_lower_mean_value_refusals(self, liouville):
        with pytest.raises(RefusalError):
            verify_lower_mean_value(liouville, SMALL_GRID)
        with pytest.raises(RefusalError):
            verify_lower_mean_value(constant_spec(2.5, "big", Extension.COMPLETE), SMALL_GRID)

    def test_limit_for_even_sign_flip(self, unit):
        report = verify_wirsing_limit(builtin_spec("wirsing-g2-complete"), unit, SMALL_GRID)
        assert report.verdict
        assert report.series[-1].lhs < 1e-3
        assert complex(report.notes["product"][-1]) == pytest.approx(1 / 3)

    def test_limit_requires_domination(self, unit):
        with pytest.raises(RefusalError):
            verify_wirsing_limit(builtin_spec("rho2"), unit, SMALL_GRID)

    def test_ext_ii_identical_functions(self, unit):
        result = verify_wirsing_ext(unit, unit, SMALL_GRID, variant="ii")
        assert result.asymptotic.residual == pytest.approx([0.0, 0.0], abs=1e-12)
        assert result.asymptotic.verdict
        assert result.asymptotic.R1 is not None

    def test_ext_ii_requires_same_extension(self, unit):
        with pytest.raises(RefusalError):
            verify_wirsing_ext(builtin_spec("liouville-complete"), unit, SMALL_GRID, variant="ii")

    def test_ext_i_requires_vanishing_limit(self, unit):
        with pytest.raises(RefusalError):
            verify_wirsing_ext(unit, unit, SMALL_GRID, variant="i")

    def test_ext_i_liouville(self, liouville, unit):
        result = verify_wirsing_ext(liouville, unit, SMALL_GRID, variant="i")
        assert result.report.theorem == "wirsing-ext-i"
        assert len(result.asymptotic.F) == 2
        assert result.report.notes["in_cb"]


class TestChains:
    def test_unit_chain_passes(self, unit):
        chain = verify_integral_average_chain(unit, SMALL_GRID)
        assert [link.theorem for link in chain.links] == [
            "chain-denom", "chain-cheap", "chain-logsum", "chain-denompars",
        ]
        assert chain.verdict

    def test_logsum_band_constants(self, unit):
        lo, hi = logsum_band(unit, 10**5)
        assert lo == pytest.approx((1 - 2 / math.e) * 4**-2, rel=1e-12)
        assert 2.0 < hi < 2.2

    def test_compavg_window_shrinks(self):
        t = 10**6
        assert 0 < compavg_window(t, 0.4) < t

    @pytest.mark.parametrize("c", [0.0, 0.5, 0.7])
    def test_compavg_rejects_c(self, unit, c):
        with pytest.raises(ValueError):
            verify_compavg(unit, SMALL_GRID, c=c)

    def test_compavg_exact_main_term(self, unit):
        report = verify_compavg(unit, SMALL_GRID, A=1.0)
        assert report.max_ratio < 1e-9
        assert report.verdict
