from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from dfactor import counting, oracle
from dfactor.counting import (
    CachedEngine, FixedEngine, NaiveEngine, bhat, enumerate_moves, enumerate_pattern,
    gadget_forward_total, pick_uniform_move,
)
from dfactor.errors import WrongVariant
from dfactor.graph_core import ColoredState, cycle_pairs, load_instance
from dfactor.regular_gen import pairing_sample, random_regular_forbidden
from dfactor.rng import RngStream
from dfactor.switchings import (
    B1_VARIANT, III, INV_A, INV_B2, INV_C, THREE_FWD, THREE_INV, TYPE_I_CLASS, TYPES,
    _validate_gadgets, apply_move, matches,
)

PATTERNS = [THREE_FWD, THREE_INV, INV_A, INV_B2, INV_C, III, *TYPE_I_CLASS.values(), *B1_VARIANT.values()]


def flat_count(g, pattern):
    """Count matching tuples by scanning every vertex sequence with at most one repeat."""
    k = pattern.k
    (a, b), = pattern.allow
    total = sum(matches(g, pattern, v) for v in permutations(range(g.n), k))
    for p in permutations(range(g.n), k - 1):
        v = list(p)
        v.insert(b, v[a])
        total += matches(g, pattern, tuple(v))
    return total


def swap_trajectory(g, steps, rng):
    """Random degree-preserving double-edge swaps, yielding (remove, add) per step."""
    rnd = rng.py
    for _ in range(steps):
        while True:
            edges = g.edges()
            (a, b), (c, d) = rnd.sample(edges, 2)
            if rnd.random() < 0.5:
                c, d = d, c
            if len({a, b, c, d}) == 4 and not g.has_edge(a, c) and not g.has_edge(b, d):
                break
        rem, add = [(a, b), (c, d)], [(a, c), (b, d)]
        g.toggle(rem, add)
        yield rem, add


def test_three_edge_example(c6_state):
    g = c6_state([(0, 1)])
    assert counting.f_easy(g) == flat_count(g, THREE_FWD) > 0


@pytest.mark.parametrize("k", range(0, 120, 40))
def test_engine_matches_flat_count(c8_states, k):
    g = c8_states[k * 29 % len(c8_states)]
    eng = NaiveEngine()
    for pat in PATTERNS:
        assert eng.count(g, pat) == flat_count(g, pat), pat.name


def test_zero_cases(c8_states):
    s0 = [g for g in c8_states if g.stratum == 0]
    assert s0
    for g in s0[:20]:
        assert counting.f_easy(g) == 0 and counting.f_type(g, "I") == 0
    plain = load_instance(8, 2)
    for edges in oracle.enumerate_d_regular(8, 2, 10_000)[:20]:
        g = ColoredState.from_edges(plain, edges)
        assert counting.b_easy(g) == 0
        assert counting.f_type(g, "III+") == 0
        assert all(counting.b_class(g, a) == 0 for a in ("A", "B1+", "B2+", "C+"))


def test_forward_counts_match_move_lists(c8_states):
    eng = NaiveEngine()
    for g in c8_states[::40]:
        for tau in ("3edge", "I", "IIa+", "IIa-", "III+", "III-"):
            moves = enumerate_moves(g, tau)
            want = eng.f_easy(g) if tau == "3edge" else eng.f_type(g, tau)
            assert len(moves) == want
            assert len(set(moves)) == len(moves)


def test_b_c_includes_III(c8_states):
    for g in c8_states[::400]:
        assert counting.b_class(g, "C+") == (flat_count(g, INV_C) if g.stratum else 0) + flat_count(g, III)


def _n16(seed):
    inst = load_instance(16, 2, random_regular_forbidden(16, 3, RngStream(seed)))
    return pairing_sample(16, 2, RngStream(seed + 100), inst)


@pytest.mark.slow
def test_gadget_forward_factored_equals_flat():
    hits = 0
    for seed in (0, 1, 2):
        g = _n16(seed)
        for kind in ("IIb", "IIc"):
            flat = len(enumerate_moves(g, kind + "+"))
            assert gadget_forward_total(g, kind) == flat
            hits += flat
    assert hits > 0


@pytest.mark.slow
def test_bhat_equals_flat_enumeration():
    g = _n16(0)
    moves = enumerate_moves(g, "IIb+")
    mv = moves[len(moves) // 2]
    h = apply_move(g.copy(), mv)
    w = mv.octagon_plus()
    rest = [x for x in range(16) if x not in w]
    flat = sum(_validate_gadgets(h, "IIb", w, y, inverse=True) for y in permutations(rest, 8))
    assert bhat(h, w, "IIb+") == flat >= 1
    assert mv.gadget in set(counting.enumerate_gadget_sequences(h, "IIb", w, inverse=True))
    with pytest.raises(WrongVariant):
        bhat(h, w, "IIc+")


def test_bhat_zero_without_room(c8_states):
    for g in c8_states:
        for w in enumerate_pattern(g, B1_VARIANT["IIb"]):
            assert bhat(g, w, "IIb+") == 0


def test_engines_agree_on_trajectory():
    inst = load_instance(40, 3, random_regular_forbidden(40, 2, RngStream(1)))
    g = pairing_sample(40, 3, RngStream(2), inst)
    cached = CachedEngine(g.copy())
    naive = NaiveEngine()
    for rem, add in swap_trajectory(g, 60, RngStream(3)):
        cached.toggle(rem, add)
        assert cached.cache.matches_recount()
        for pat in PATTERNS:
            assert cached.count(g, pat) == naive.count(g, pat), pat.name


def test_empty_toggle_keeps_cache():
    inst = load_instance(30, 3, random_regular_forbidden(30, 2, RngStream(5)))
    g = pairing_sample(30, 3, RngStream(6), inst)
    eng = CachedEngine(g)
    before = eng.count(g, INV_A)
    eng.toggle([], [])
    assert eng.cache.matches_recount() and eng.count(g, INV_A) == before


def test_compiled_and_pure_kernels_agree(c8_states, monkeypatch):
    from dfactor import kernels
    if not kernels.compiled_available():
        pytest.skip("compiled kernels not built")
    inst = load_instance(30, 3, random_regular_forbidden(30, 2, RngStream(7)))
    states = [pairing_sample(30, 3, RngStream(s), inst) for s in range(3)] + c8_states[::500]
    for g in states:
        fr = counting.Frame(g)
        for pat in PATTERNS:
            i = g.instance
            plan = counting.compile_plan(pat, i.n, i.d, i.delta)
            degM = fr.deg_for(plan[3][plan[0] - 1])
            gptr, gidx = fr.csr()
            args = (fr, gptr, gidx, degM, int(degM.sum()), plan)
            assert kernels.count_plan(*args, impl=kernels.implementation("python")) == \
                kernels.count_plan(*args, impl=kernels.implementation("compiled"))


def test_pick_uniform_move_unique(c6_state):
    g = c6_state([(0, 1)])
    moves = enumerate_moves(g, "3edge")
    rng = RngStream(0)
    for _ in range(20):
        assert pick_uniform_move(g, "3edge", rng) in moves


@pytest.mark.slow
@pytest.mark.parametrize("tau, draws", [("3edge", 100_000), ("I", 10_000)])
def test_pick_uniform_move_is_uniform(c8_states, tau, draws):
    g = max(c8_states[::7], key=lambda s: len(enumerate_moves(s, tau)))
    moves = enumerate_moves(g, tau)
    idx = {m: j for j, m in enumerate(moves)}
    counts = [0] * len(moves)
    rng = RngStream(12)
    for _ in range(draws):
        counts[idx[pick_uniform_move(g, tau, rng)]] += 1
    assert stats.chisquare(counts).pvalue >= 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(PATTERNS))
def test_fixed_engine_matches_dfs_enumeration(seed, pat):
    inst = load_instance(12, 2, random_regular_forbidden(12, 2, RngStream(seed)))
    g = pairing_sample(12, 2, RngStream(seed + 1), inst)
    assert FixedEngine(g).count(g, pat) == sum(1 for _ in enumerate_pattern(g, pat))
