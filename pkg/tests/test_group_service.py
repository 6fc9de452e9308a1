from fractions import Fraction

import numpy as np
import pytest

from Service.base_service import VilenkinError
from Service.group_service import GroupService
from tests.conftest import system


def test_build_dyadic_products():
    sys = GroupService.build_radix_system([2, 2, 2], 3)
    assert sys.products == (1, 2, 4, 8)
    assert sys.lam == 2
    assert sys.is_dyadic


def test_build_mixed_products():
    sys = GroupService.build_radix_system([2, 3, 4], 3)
    assert sys.products == (1, 2, 6, 24)
    assert sys.lam == 4


def test_build_rejects_small_radix():
    with pytest.raises(VilenkinError) as err:
        GroupService.build_radix_system([1, 2], 2)
    assert err.value.kind == "invalid-radix"


def test_build_rejects_overflow():
    assert GroupService.dyadic(62).size == 2 ** 62
    with pytest.raises(VilenkinError) as err:
        GroupService.dyadic(63)
    assert err.value.kind == "depth-too-large"


def test_build_rejects_zero_depth():
    with pytest.raises(VilenkinError) as err:
        GroupService.build_radix_system([2], 0)
    assert err.value.kind == "invalid-argument"


def test_parse_power_spec():
    sys = system("2^10")
    assert sys.depth == 10 and sys.size == 1024


def test_parse_explicit_spec_repeats_periodically():
    sys = system("2,3,4", 9)
    assert sys.radices == (2, 3, 4) * 3
    assert sys.size == 13824
    assert sys.label() == "2,3,4,2,3,4,2,3,4"


@pytest.mark.parametrize("text", ["", "two", "2,,x", "^3"])
def test_parse_bad_spec(text):
    with pytest.raises(VilenkinError) as err:
        system(text)
    assert err.value.kind == "parse-error"


def test_decompose_binary(dyadic3):
    index = GroupService.decompose(5, dyadic3)
    assert index.digits == (1, 0, 1)
    assert index.order == 2


def test_decompose_mixed():
    # 7 = 1*1 + 0*2 + 1*6; n_1 must stay below m_1 = 3
    index = GroupService.decompose(7, system("2,3,4"))
    assert index.digits == (1, 0, 1)
    assert index.order == 2


def test_decompose_zero_has_sentinel_order(dyadic3):
    index = GroupService.decompose(0, dyadic3)
    assert index.digits == (0, 0, 0)
    assert index.order == -1


def test_decompose_out_of_range(dyadic3):
    with pytest.raises(VilenkinError) as err:
        GroupService.decompose(8, dyadic3)
    assert err.value.kind == "out-of-range"


@pytest.mark.parametrize("spec,depth", [("2^10", None), ("2,3,4", 6), ("5,7", 4)])
def test_compose_decompose_roundtrip(spec, depth):
    sys = system(spec, depth)
    for n in range(sys.size):
        index = GroupService.decompose(n, sys)
        assert GroupService.compose(index.digits, sys) == n


def test_group_add_is_xor_for_dyadic(dyadic3):
    x = GroupService.cell_from_coords((1, 0, 1), dyadic3)
    y = GroupService.cell_from_coords((1, 1, 0), dyadic3)
    assert GroupService.group_add(x, y, dyadic3).coords == (0, 1, 1)


def test_group_add_mixed():
    sys = system("2,3")
    x = GroupService.cell_from_coords((1, 2), sys)
    assert GroupService.group_add(x, x, sys).coords == (0, 1)


def test_group_neg_of_identity(mixed):
    zero = GroupService.cell_index(0, mixed)
    assert GroupService.group_neg(zero, mixed).coords == (0,) * mixed.depth


def test_group_axioms(mixed, rng):
    zero = GroupService.cell_index(0, mixed)
    for _ in range(200):
        x, y, z = (GroupService.cell_index(int(t), mixed) for t in rng.integers(0, mixed.size, 3))
        add = lambda a, b: GroupService.group_add(a, b, mixed)
        assert add(add(x, y), z) == add(x, add(y, z))
        assert add(x, y) == add(y, x)
        assert add(x, zero) == x
        assert add(x, GroupService.group_neg(x, mixed)) == zero


def test_group_add_system_mismatch(dyadic3, mixed):
    x = GroupService.cell_index(1, dyadic3)
    y = GroupService.cell_index(1, mixed)
    with pytest.raises(VilenkinError) as err:
        GroupService.group_add(x, y, dyadic3)
    assert err.value.kind == "system-mismatch"


def test_cell_measure_values(dyadic3):
    assert GroupService.cell_measure(0, dyadic3) == 1
    assert GroupService.cell_measure(3, dyadic3) == Fraction(1, 8)
    assert GroupService.cell_measure(3, system("2,3,4")) == Fraction(1, 24)


@pytest.mark.parametrize("spec", ["2^6", "2,3,4", "3^4"])
def test_cell_measures_sum_to_one(spec):
    sys = system(spec)
    assert GroupService.cell_measure(sys.depth, sys) * sys.size == 1


def test_cell_measure_out_of_range(dyadic3):
    with pytest.raises(VilenkinError) as err:
        GroupService.cell_measure(4, dyadic3)
    assert err.value.kind == "out-of-range"


def test_cell_coordinates_match_cell_index(mixed):
    for level in range(mixed.depth):
        coords = GroupService.cell_coordinates(mixed, level)
        assert [GroupService.cell_index(t, mixed).coords[level] for t in range(mixed.size)] == list(coords)
    assert not GroupService.cell_coordinates(mixed, 0).flags.writeable


def test_truncate_keeps_prefix(mixed):
    sub = GroupService.truncate(mixed, 2)
    assert sub.radices == (2, 3) and sub.products == (1, 2, 6)
    assert np.array_equal(GroupService.cylinder_mask(1, sub), [True, False, True, False, True, False])
