from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dfactor.errors import DegreeOutOfRange, EdgeMissing, InvalidInstance, OddProduct
from dfactor.graph_core import (
    ColoredState, cycle_pairs, expected_red_edges, instance_from_json, is_d_factor, load_instance,
    red_count, toggle_set,
)


def test_load_empty_forbidden():
    inst = load_instance(4, 2, [])
    assert (inst.delta, inst.m_red_total, inst.regular_complement) == (0, 0, True)


def test_load_cycle_forbidden():
    inst = load_instance(8, 2, cycle_pairs(8))
    assert (inst.delta, inst.m_red_total, inst.regular_complement) == (2, 8, True)


def test_load_irregular_forbidden():
    inst = load_instance(5, 2, [(0, 1), (0, 2)])
    assert (inst.delta, inst.m_red_total, inst.regular_complement) == (2, 2, False)


def test_duplicates_are_merged_and_counted():
    inst = load_instance(4, 2, [(0, 1), (1, 0)])
    assert inst.m_red_total == 1 and inst.duplicates == 1


@pytest.mark.parametrize("args, exc", [
    ((3, 1, []), OddProduct),
    ((4, 0, []), DegreeOutOfRange),
    ((4, 4, []), DegreeOutOfRange),
    ((4, 2, [(1, 1)]), InvalidInstance),
    ((4, 2, [(0, 9)]), InvalidInstance),
])
def test_load_rejects(args, exc):
    with pytest.raises(exc):
        load_instance(*args)


def test_json_round_trip():
    inst = load_instance(6, 2, [(0, 3), (1, 4)])
    assert instance_from_json(inst.to_json()) == inst
    with pytest.raises(InvalidInstance):
        instance_from_json({"n": 4})


def test_red_count_triangle():
    inst = load_instance(3, 2, [(0, 1)])
    g = ColoredState.from_edges(inst, [(0, 1), (1, 2), (0, 2)])
    assert red_count(g) == 1 == g.stratum


def test_red_count_all_red():
    inst = load_instance(8, 2, cycle_pairs(8))
    g = ColoredState.from_edges(inst, cycle_pairs(8))
    assert red_count(g) == 8


def test_red_count_no_forbidden():
    g = ColoredState.from_edges(load_instance(6, 2), cycle_pairs(6))
    assert red_count(g) == 0


def test_toggle_identity(c6_state):
    g = c6_state()
    assert toggle_set(g, (), ()) == g


def test_toggle_c6_switch(c6_state):
    g = c6_state()
    h = toggle_set(g, [(0, 1), (2, 3), (4, 5)], [(1, 3), (2, 5), (0, 4)])
    assert set(h.edges()) == {(1, 2), (3, 4), (0, 5), (1, 3), (2, 5), (0, 4)}
    assert all(h.degree(v) == 2 for v in range(6))


def test_toggle_missing_edge(c6_state):
    g = c6_state()
    with pytest.raises(EdgeMissing):
        toggle_set(g, [(0, 2)], [])


def test_is_d_factor(c6_state):
    assert is_d_factor(c6_state())
    assert not is_d_factor(c6_state([(0, 1)]))
    inst = load_instance(6, 2)
    assert not is_d_factor(ColoredState.from_edges(inst, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]))


def test_expected_red_edges():
    assert expected_red_edges(load_instance(5, 2, [(0, 1), (0, 2)])) == 1
    assert expected_red_edges(load_instance(5, 2)) == 0
    assert expected_red_edges(load_instance(8, 2, cycle_pairs(8))) == Fraction(16, 7)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)).filter(lambda p: p[0] != p[1]), max_size=20))
def test_instance_invariants(pairs):
    inst = load_instance(10, 2, pairs)
    degs = [len(r) for r in inst.red_adj]
    assert inst.delta == max(degs)
    assert inst.m_red_total == sum(degs) // 2
    assert inst.regular_complement == (len(set(degs)) == 1)
    if inst.regular_complement:
        assert inst.m_red_total * 2 == inst.delta * 10
