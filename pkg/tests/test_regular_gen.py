import numpy as np
import pytest
from scipy import stats

from dfactor.errors import BudgetExhausted, OddProduct
from dfactor.graph_core import cycle_pairs, load_instance
from dfactor.regular_gen import (
    draw_initial, initial_state, pairing_edges, pairing_sample, random_regular_forbidden,
)
from dfactor.rng import RngStream


def test_single_edge():
    for k in range(20):
        assert pairing_sample(2, 1, RngStream(k)).edges() == [(0, 1)]


def test_odd_product():
    with pytest.raises(OddProduct):
        pairing_sample(3, 1, RngStream(0))


def test_matchings_of_k4_are_uniform():
    rng = RngStream(11)
    counts = {}
    for _ in range(30_000):
        key = tuple(pairing_edges(4, 1, rng))
        counts[tuple(sorted(key))] = counts.get(tuple(sorted(key)), 0) + 1
    assert len(counts) == 3
    assert stats.chisquare(list(counts.values())).pvalue >= 1e-3


@pytest.mark.parametrize("n, d", [(10, 3), (50, 4), (3000, 3)])
def test_output_is_simple_regular(n, d):
    g = pairing_sample(n, d, RngStream(1))
    assert all(g.degree(v) == d for v in range(n))
    assert g.num_edges() == n * d // 2


def test_large_path_matches_small_path_law():
    # the numpy path is used above 4096 points; its graphs are still simple and regular
    arr = pairing_edges(2100, 2, RngStream(3))
    arr = np.asarray(arr)
    assert arr.shape == (2100, 2)
    assert len({tuple(r) for r in arr.tolist()}) == 2100


def test_no_forbidden_accepts_first_draw():
    inst = load_instance(10, 3)
    _, draws = draw_initial(inst, 0, RngStream(0))
    assert draws == 1


def test_acceptance_fraction_c8():
    inst = load_instance(8, 2, cycle_pairs(8))
    rng = RngStream(5)
    hits = 0
    for _ in range(10_000):
        g = pairing_sample(8, 2, rng, inst)
        hits += g.stratum <= 3
    assert hits / 10_000 >= 0.25 - 0.1


def test_zero_cap_returns_factors():
    inst = load_instance(8, 2, cycle_pairs(8))
    rng = RngStream(2)
    for _ in range(50):
        assert initial_state(inst, 0, rng).stratum == 0


def test_budget():
    inst = load_instance(4, 2, [(0, 1), (0, 2), (0, 3)])
    with pytest.raises(BudgetExhausted):
        draw_initial(inst, 0, RngStream(0), restart_budget=50)


def test_forbidden_generator_is_regular():
    pairs = random_regular_forbidden(20, 3, RngStream(4))
    inst = load_instance(20, 2, pairs)
    assert inst.regular_complement and inst.delta == 3
    assert random_regular_forbidden(20, 0, RngStream(4)) == []


def test_deterministic():
    assert pairing_edges(30, 3, RngStream(9)) == pairing_edges(30, 3, RngStream(9))
