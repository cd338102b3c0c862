import cmath

import pytest

from arith.catalog import BUILTIN_NAMES, builtin_spec, constant_spec
from arith.errors import SpecError
from arith.mult_fn import Extension, FunctionClass


@pytest.mark.parametrize("name", [n.replace("{k}", "3") for n in BUILTIN_NAMES])
def test_every_builtin_resolves(name):
    spec = builtin_spec(name)
    assert spec.label == name or spec.label.startswith(name.split("-")[0])
    assert FunctionClass.C in spec.classes


def test_unknown_name():
    with pytest.raises(SpecError):
        builtin_spec("nao-existe")


def test_random_families_differ_by_seed():
    assert builtin_spec("random-cb-1").spec_hash != builtin_spec("random-cb-2").spec_hash


def test_wirsing_pair_overrides_two():
    complete = builtin_spec("wirsing-g2-complete")
    assert complete.extension is Extension.COMPLETE
    assert complete.prime_values([2, 3]).tolist() == [-1, 1]


def test_constant_spec_parameters():
    spec = constant_spec(cmath.exp(0.05j), "rot", eta=0.05)
    assert spec.B == pytest.approx(1.0)
    assert spec.delta == pytest.approx(1.0)
    assert spec.partition.classes[0].eta == 0.05
