from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dfactor import oracle
from dfactor.bounds import (
    analytic_table, easy_bounds, epsilon, gadget_lower, i1_easy, i1_uniform, make_table,
    uniform_lower, uniform_upper,
)
from dfactor.errors import NotRegularComplement
from dfactor.graph_core import cycle_pairs, load_instance


@pytest.fixture(scope="module")
def n100():
    return load_instance(100, 2, cycle_pairs(100))


@pytest.fixture(scope="module")
def n10():
    return load_instance(10, 2, cycle_pairs(10))


def test_i1_easy(n10, c8):
    assert i1_easy(n10) == 4
    assert i1_easy(c8) == 4
    assert i1_easy(load_instance(10, 2)) == 0


def test_i1_uniform(c8):
    assert i1_uniform(load_instance(12, 3, oracle.circulant_pairs(12, 4))) == 8
    assert i1_uniform(c8) == 2
    assert i1_uniform(load_instance(10, 3)) == 0
    with pytest.raises(NotRegularComplement):
        i1_uniform(load_instance(5, 2, [(0, 1), (0, 2)]))


def test_easy_bounds(n10):
    assert easy_bounds(load_instance(10, 2), 2)[0] == 1600
    assert easy_bounds(n10, 1)[1] == 144 - 1280 - 320 == -1456
    assert easy_bounds(n10, 0)[0] == 0


def test_uniform_upper(n100):
    assert uniform_upper(n100, "I", 1) == 21_196_800 - 320_000 - 640_000 - 160_000 == 20_076_800
    assert uniform_upper(n100, "IIa+", 1) == 6_400
    assert uniform_upper(n100, "III+", 1) == 640_000


def test_uniform_lower(n100):
    assert uniform_lower(n100, "A", 0) == 22_400_000 - 1_920_000 - 1_920_000 == 18_560_000
    assert uniform_lower(n100, "B1+", 1) == 2 * 178 ** 2 - 19_200 == 44_168
    assert uniform_lower(n100, "B2+", 1) == 499_200
    assert uniform_lower(n100, "C+", 1) == 435_200


def test_gadget_lower(n100, n10):
    assert gadget_lower(n100, "IIb+", 2) == 184 ** 4 - 192_000_000 - 192_000_000 == 762_228_736
    assert gadget_lower(n10, "IIc+", 1) == 4 ** 6 - 2 * (9 * 3_200_000 * 4) == -230_395_904


def test_epsilon(n100):
    assert epsilon(n100) == Fraction(1, 125)
    assert epsilon(load_instance(600, 3, oracle.circulant_pairs(600, 3))) == Fraction(1, 2000)


def test_plus_minus_symmetric(n100):
    for i in range(3):
        assert uniform_upper(n100, "IIb+", i) == uniform_upper(n100, "IIb-", i)
        assert uniform_lower(n100, "C+", i) == uniform_lower(n100, "C-", i)


@settings(max_examples=50, deadline=None)
@given(st.integers(20, 2000), st.integers(1, 6), st.integers(0, 6), st.integers(0, 10))
def test_bounds_are_exact(n, d, delta, i):
    inst = load_instance(max(n, delta + 2, 2 * d + 2) // 2 * 2, d)
    inst = inst if delta == 0 else load_instance(inst.n, d, oracle.circulant_pairs(inst.n, delta))
    for t in ("I", "IIa+", "IIb+", "IIc+", "III+"):
        assert isinstance(uniform_upper(inst, t, i), int)
    for a in ("A", "B1+", "B2+", "C+"):
        assert isinstance(uniform_lower(inst, a, i), (int, Fraction))
    # the fractional factors are exact
    nn, dd = inst.n, inst.d
    assert uniform_lower(inst, "C+", i) * nn == dd ** 3 * delta ** 3 * nn * nn * (nn - 8 * (dd + delta))


def test_analytic_table(n100):
    tab = make_table(n100, "analytic")
    assert tab.provider == "analytic" and tab.i1 == 2 and tab.eps == Fraction(1, 125)
    assert tab.m_bar("I", 1) == 20_076_800
    assert tab.m_low("B1-", 1) == 44_168
    assert tab.m_bar("I", -1) == 0


def test_oracle_table_zero_delta():
    tab = make_table(load_instance(6, 2), "oracle")
    assert tab.i1 == 0
    assert all(v is None for v in tab.gadget.values())


def test_oracle_table_c8(c8_bounds, c8_states):
    assert c8_bounds.i1 == 2 and c8_bounds.i1_easy == 4
    assert {i: c8_bounds.easy(i)[0] for i in range(5)} == {0: 0, 1: 32, 2: 68, 3: 56, 4: 50}
    assert {i: c8_bounds.easy(i)[1] for i in range(5)} == {0: 40, 1: 24, 2: 12, 3: 2, 4: 0}
    assert c8_bounds.m_bar("I", 1) == 44 and c8_bounds.m_bar("I", 2) == 104
    assert c8_bounds.m_bar("III+", 0) == 16 and c8_bounds.m_bar("IIa+", 1) == 4
    from dfactor.counting import FixedEngine
    for g in c8_states:
        i = g.stratum
        if 1 <= i <= c8_bounds.i1:
            assert FixedEngine(g).f_type(g, "I") <= c8_bounds.m_bar("I", i)


def test_strata_ratio_informational(c8):
    cat = oracle.strata_catalog(c8, 4, 200_000)
    ratios = [(cat.sizes[i - 1] / cat.sizes[i], i * 8 / (8 * 2)) for i in range(1, 3)]
    for got, want in ratios:
        assert got > 0 and want > 0
