import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arith.compensated import (
    CompensatedSum,
    ComplexCompensatedSum,
    cumulative_fsum,
    fsum_complex,
    fsum_real,
    two_sum,
)

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e300, max_value=1e300)


@given(finite, finite)
def test_two_sum_is_error_free(u, v):
    s, t = two_sum(u, v)
    assert Fraction(s) + Fraction(t) == Fraction(u) + Fraction(v)


def test_running_sum_survives_cancellation():
    acc = CompensatedSum()
    for y in (1e16, 1.0, -1e16):
        acc.add(y)
    assert acc.value == 1.0


def test_running_sum_of_tenths_matches_fsum():
    acc = CompensatedSum()
    for _ in range(10**5):
        acc.add(0.1)
    assert acc.value == pytest.approx(math.fsum([0.1] * 10**5), rel=4e-16)


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e10, max_value=1e10), max_size=80))
def test_running_sum_close_to_fsum(values):
    acc = CompensatedSum()
    for y in values:
        acc.add(y)
    exact = math.fsum(values)
    scale = math.fsum(abs(y) for y in values)
    assert abs(acc.value - exact) <= 1e-15 * abs(exact) + 1e-28 * scale


def test_complex_accumulator_adds_arrays():
    acc = ComplexCompensatedSum()
    acc.add_array(np.array([1e16 + 1j, 1.0, -1e16 - 1j]))
    acc.add(2j)
    assert acc.value == complex(1.0, 2.0)


def test_fsum_helpers():
    assert fsum_complex(np.array([1 + 1j, 1e16, -1e16])) == 1 + 1j
    assert fsum_real([0.1] * 10) == 1.0


def test_cumulative_prefixes():
    values = np.arange(1, 11, dtype=np.float64) * 0.1
    ends = np.array([3, 7, 10])
    out = cumulative_fsum(values, ends)
    expected = [math.fsum(values[:e]) for e in ends]
    assert out.tolist() == pytest.approx(expected, rel=1e-15)


def test_cumulative_prefixes_complex():
    values = np.exp(1j * np.arange(20))
    out = cumulative_fsum(values, np.array([5, 20]))
    assert out.dtype == np.complex128
    assert out[-1] == pytest.approx(fsum_complex(values), rel=1e-14)
