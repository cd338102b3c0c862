import math

import numpy as np
import pytest
from hypothesis import assume, given, settings as hyp_settings
from hypothesis import strategies as st
from pydantic import ValidationError

from arith.catalog import builtin_spec, constant_spec, random_spec
from arith.errors import SpecError
from arith.mult_fn import (
    EXCEPTIONAL,
    ClassParams,
    Extension,
    FunctionClass,
    PartitionKind,
    PrimePartition,
    classify,
    is_non_decreasing,
    load_spec,
    parse_spec_text,
    validate_class_membership,
    value_at,
)
from arith.primes import factorize

RANDOM = random_spec(seed=11, radius=(0.5, 1.5), arg_spread=math.pi)


@hyp_settings(max_examples=60, deadline=None)
@given(st.integers(1, 3000), st.integers(1, 3000))
def test_value_is_multiplicative_on_coprimes(a, b):
    assume(math.gcd(a, b) == 1)
    lhs = value_at(RANDOM, a * b, factorize(a * b))
    rhs = value_at(RANDOM, a, factorize(a)) * value_at(RANDOM, b, factorize(b))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_strong_and_complete_extensions_differ_on_squares():
    assert value_at(builtin_spec("liouville"), 4, [(2, 2)]) == -1
    assert value_at(builtin_spec("liouville-complete"), 4, [(2, 2)]) == 1
    assert value_at(builtin_spec("liouville-complete"), 1, []) == 1


def test_power_values_follow_extension():
    strong = builtin_spec("liouville")
    complete = builtin_spec("liouville-complete")
    vals = np.array([-1.0 + 0j, -1.0 + 0j])
    exps = np.array([2, 3])
    assert strong.power_values(vals, exps).tolist() == [-1, -1]
    assert complete.power_values(vals, exps).tolist() == [1, -1]


def test_random_rule_is_reproducible_and_bounded():
    ps = np.array([2, 3, 5, 7, 11, 13], dtype=np.int64)
    first = RANDOM.prime_values(ps)
    again = random_spec(seed=11, radius=(0.5, 1.5), arg_spread=math.pi).prime_values(ps)
    assert np.array_equal(first, again)
    assert np.all((np.abs(first) >= 0.5 - 1e-12) & (np.abs(first) <= 1.5 + 1e-12))


def test_exceptional_primes_vanish_and_classify():
    spec = builtin_spec("lowermv-s23")
    values, classes = spec.prime_data(np.array([2, 3, 5], dtype=np.int64))
    assert values.tolist() == [0, 0, 0.5]
    assert classes.tolist() == [EXCEPTIONAL, EXCEPTIONAL, 1]


def test_residue_partition_classifies_mod4():
    spec = builtin_spec("dirichlet-mod4")
    assert classify(spec.partition, 5) == 1
    assert classify(spec.partition, 7) == 2
    assert classify(spec.partition, 2) == EXCEPTIONAL


def test_sector_partition_needs_values():
    partition = PrimePartition(
        kind=PartitionKind.SECTOR,
        sectors=[(-math.pi, 0.0), (0.0, math.pi)],
        classes=[ClassParams(delta=1, B=1), ClassParams(delta=1, B=1)],
    )
    assert classify(partition, 5, 1j) == 2
    assert classify(partition, 5, -1j) == 1
    with pytest.raises(ValueError):
        classify(partition, 5)


def test_class_params_reject_delta_above_bound():
    with pytest.raises(ValidationError):
        ClassParams(delta=2.0, B=1.0)


def test_residue_partition_must_be_total():
    with pytest.raises(ValidationError):
        PrimePartition(kind=PartitionKind.RESIDUE, modulus=4, residues=[[1]], classes=[ClassParams(delta=1, B=1)])


def test_unit_is_in_C_and_C_a():
    spec = builtin_spec("unit")
    assert validate_class_membership(spec, 10**4, FunctionClass.C).passed
    assert validate_class_membership(spec, 10**4, FunctionClass.CA).passed


def test_liouville_fails_small_argument_at_two(specs_dir):
    spec = load_spec(specs_dir / "liouville.toml")
    report = validate_class_membership(spec, 10**4, FunctionClass.CA)
    assert not report.passed
    failed = report.failed()
    assert [c.condition for c in failed] == ["iii"]
    assert failed[0].first_violation == 2


def test_unit_is_not_in_C_b():
    report = validate_class_membership(builtin_spec("unit"), 10**4, FunctionClass.CB)
    assert "v" in [c.condition for c in report.failed()]


def test_validation_needs_reasonable_range():
    with pytest.raises(SpecError):
        validate_class_membership(builtin_spec("unit"), 10, FunctionClass.C)


def _growth(spec, x_max):
    report = validate_class_membership(spec, x_max, FunctionClass.C)
    return next(c for c in report.conditions if c.condition == "ii")


class TestExceptionalGrowth:
    def test_small_exceptional_set_passes(self):
        cond = _growth(constant_spec(0.5, "s23", exceptional=(2, 3)), 10**5)
        assert cond.passed
        # log 6/log 100 ≈ 0.389, máximo em x = 100
        assert "em x=100 " in cond.detail

    def test_product_too_large_at_start_of_grid(self):
        cond = _growth(constant_spec(0.5, "s235", exceptional=(2, 3, 5)), 10**5)
        assert not cond.passed
        assert cond.first_violation == 100

    def test_large_exceptional_prime_is_a_grid_point(self):
        cond = _growth(constant_spec(0.5, "s-grande", exceptional=(2, 1009)), 10**4)
        assert not cond.passed
        assert cond.first_violation == 1009

    def test_primes_beyond_range_are_ignored(self):
        assert _growth(constant_spec(0.5, "s-longe", exceptional=(2, 20011)), 10**4).passed


def test_non_decreasing_detection():
    assert is_non_decreasing(builtin_spec("unit"), 1000)
    assert not is_non_decreasing(RANDOM, 1000)


def test_spec_files_load(specs_dir):
    for path in sorted(specs_dir.glob("*.toml")):
        spec = load_spec(path)
        assert spec.label == path.stem


def test_spec_file_matches_catalog(specs_dir):
    assert load_spec(specs_dir / "dirichlet-mod4.toml").spec_hash == builtin_spec("dirichlet-mod4").spec_hash
    assert load_spec(specs_dir / "unit.toml").extension is Extension.STRONG


def test_malformed_toml_reports_line():
    with pytest.raises(SpecError) as info:
        parse_spec_text('label = "x"\n[rule\nkind = 1\n')
    assert info.value.line == 2


def test_invalid_field_reports_line():
    text = 'label = "bad"\n[rule]\nkind = "bogus"\n[partition]\n[[partition.classes]]\ndelta = 1.0\nB = 1.0\n'
    with pytest.raises(SpecError) as info:
        parse_spec_text(text)
    assert info.value.line == 3


def test_missing_file_is_spec_error(tmp_path):
    with pytest.raises(SpecError):
        load_spec(tmp_path / "nope.toml")


def test_spec_hash_is_stable():
    assert builtin_spec("unit").spec_hash == builtin_spec("unit").spec_hash
    assert builtin_spec("unit").spec_hash != builtin_spec("half").spec_hash
