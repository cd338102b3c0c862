import math

import numpy as np
import pytest

from arith.primes import factorize, is_prime, mertens_third_oracle, p_over_phi, prime_powers_up_to, primes_up_to, simple_sieve


def test_prime_counts():
    assert len(primes_up_to(100)) == 25
    assert len(primes_up_to(10**5)) == 9592
    assert primes_up_to(1).size == 0


def test_table_shrinks_by_slicing():
    primes_up_to(1000)
    small = primes_up_to(30)
    assert small.tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert not small.flags.writeable


def test_simple_sieve_matches_shared_table():
    assert np.array_equal(simple_sieve(5000), primes_up_to(5000))


def test_prime_powers_sorted_with_bases():
    values, bases, exps = prime_powers_up_to(30)
    assert values.tolist() == [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]
    assert np.array_equal(bases.astype(np.int64) ** exps, values)


@pytest.mark.parametrize("n, expected", [
    (1, []),
    (2, [(2, 1)]),
    (360, [(2, 3), (3, 2), (5, 1)]),
    (9973, [(9973, 1)]),
    (2 * 99991, [(2, 1), (99991, 1)]),
])
def test_factorize(n, expected):
    assert factorize(n) == expected


def test_factorize_rejects_zero():
    with pytest.raises(ValueError):
        factorize(0)


def test_is_prime():
    assert is_prime(97)
    assert not is_prime(91)
    assert not is_prime(1)


def test_p_over_phi():
    assert p_over_phi([]) == 1.0
    assert p_over_phi([2, 3]) == pytest.approx(3.0)


def test_mertens_third_theorem_tends_to_one():
    assert mertens_third_oracle(10**6) == pytest.approx(1.0, abs=1e-2)
    assert math.isfinite(mertens_third_oracle(100))
