from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from dfactor import counting, oracle
from dfactor.errors import BudgetExhausted, InvalidInstance, NotRegularComplement
from dfactor.graph_core import ColoredState, cycle_pairs, is_d_factor, load_instance
from dfactor.regular_gen import random_regular_forbidden
from dfactor.rng import RngStream
from dfactor.samplers import (
    RunTelemetry, Sampler, SamplerConfig, _Restart, factor_approx, factor_easy, factor_uniform,
    sample_many, step_probabilities,
)
from dfactor.solver import solve_parameters


def general(algorithm, provider="oracle", **kw):
    """Config that forces the mutable-state walk even on tiny instances."""
    return SamplerConfig(algorithm, provider, memo_limit=0, catalog_limit=0, **kw)


def test_config_validation():
    with pytest.raises(InvalidInstance):
        SamplerConfig("bogus")
    with pytest.raises(InvalidInstance):
        SamplerConfig(restart_budget=0)


def test_uniform_needs_regular_complement():
    inst = load_instance(6, 2, [(0, 1), (0, 2)])
    with pytest.raises(NotRegularComplement):
        Sampler(inst, SamplerConfig("uniform"))
    with pytest.raises(NotRegularComplement):
        Sampler(inst, SamplerConfig("approx"))


@pytest.mark.parametrize("alg", ["easy", "uniform", "approx"])
def test_no_forbidden_outputs_first_draw(alg):
    inst = load_instance(20, 3)
    s, tele = Sampler(inst, SamplerConfig(alg)).run(RngStream(1))
    assert is_d_factor(s)
    assert tele.steps == 0 and tele.initial_draws == 1


@pytest.mark.parametrize("memo", [12, 0])
def test_no_factor_exhausts_budget(memo):
    inst = load_instance(4, 2, [(0, 1), (0, 2), (0, 3)])
    cfg = SamplerConfig("easy", "oracle", restart_budget=30, memo_limit=memo)
    with pytest.raises(BudgetExhausted):
        factor_easy(inst, cfg, RngStream(0))


@pytest.mark.parametrize("alg", ["easy", "uniform"])
def test_exact_output_law_is_uniform(c8, c8_bounds, c8_support, alg):
    params = solve_parameters(c8_bounds) if alg == "uniform" else None
    law = oracle.exact_output_distribution(c8, alg, c8_bounds, params)
    assert set(law) == set(c8_support)
    p = np.array(list(law.values()))
    p /= p.sum()
    assert np.abs(p - 1 / len(p)).max() < 1e-9


@pytest.mark.slow
@pytest.mark.parametrize("alg", ["easy", "uniform"])
def test_general_walk_is_uniform(c8, c8_bounds, c8_support, alg):
    sampler = Sampler(c8, general(alg), bounds=c8_bounds)
    out, tele = sample_many(c8, count=5 * len(c8_support), rng=RngStream(21), sampler=sampler)
    rep = oracle.uniformity_test(out, c8_support)
    assert rep.chi2_valid and rep.p_value >= 1e-3
    assert tele.samples == len(out)


def test_every_output_is_a_factor(c8, c8_bounds):
    for alg in ("easy", "uniform", "approx"):
        for memo in (12, 0):
            cfg = SamplerConfig(alg, "oracle", memo_limit=memo)
            out, _ = sample_many(c8, count=12, rng=RngStream(4), sampler=Sampler(c8, cfg, bounds=c8_bounds))
            assert all(is_d_factor(s) for s in out)


def test_sample_many_contract(c8, c8_bounds):
    sampler = Sampler(c8, SamplerConfig("easy", "oracle"), bounds=c8_bounds)
    assert sample_many(c8, count=0, sampler=sampler)[0] == []
    a, ta = sample_many(c8, count=50, rng=RngStream(8), sampler=sampler, keys_only=True)
    b, tb = sample_many(c8, count=50, rng=RngStream(8), sampler=sampler, keys_only=True)
    assert a == b
    singles = RunTelemetry()
    for k in range(50):
        s, t = sampler.run(RngStream(8).child(k))
        assert s.key() == a[k]
        singles.merge(t)
    assert singles.restarts == ta.restarts and singles.rejections == ta.rejections
    assert ta.samples == 50
    rates = ta.rejection_rates()
    assert set(rates) == {"t", "f", "pre_b", "b"}
    assert sum(rates.values()) == pytest.approx(ta.restarts / (ta.restarts + ta.samples))


@pytest.mark.slow
def test_jobs_do_not_change_output(c8, c8_bounds):
    sampler = Sampler(c8, SamplerConfig("uniform", "oracle"), bounds=c8_bounds)
    a, _ = sample_many(c8, count=40, rng=RngStream(2), sampler=sampler, keys_only=True)
    b, _ = sample_many(c8, count=40, rng=RngStream(2), sampler=sampler, keys_only=True, jobs=2)
    assert a == b


def test_telemetry_invariants(c8, c8_bounds):
    _, tele = sample_many(c8, count=200, rng=RngStream(9),
                          sampler=Sampler(c8, SamplerConfig("uniform", "oracle"), bounds=c8_bounds))
    assert tele.steps >= tele.classes["A"]
    assert all(v <= tele.restarts for v in tele.rejections.values())
    assert tele.to_json()["samples"] == 200


def _step_tally(sampler, state, tau, upper, trials, seed):
    engine = counting.NaiveEngine()
    rng = RngStream(seed)
    tele = RunTelemetry()
    counts = Counter()
    for _ in range(trials):
        try:
            mv = sampler._forward(state, tau, state.stratum, upper, engine, rng, tele)
        except _Restart:
            counts["reject"] += 1
            continue
        counts[mv] += 1
    return counts


def _chi_against(counts, probs, trials):
    keys = list(probs)
    obs = [counts[k] for k in keys] + [counts["reject"]]
    exp = [float(probs[k]) * trials for k in keys]
    exp.append(trials - sum(exp))
    assert sum(obs) == trials and set(counts) - {"reject"} <= set(keys)
    return stats.chisquare(obs, exp).pvalue


@pytest.mark.slow
def test_easy_step_semantics(c8):
    # analytic easy upper bound equals the slot-space size, so each valid move has probability 1/m_bar
    sampler = Sampler(c8, general("easy", "analytic"))
    state = next(g for g in (ColoredState.from_edges(c8, e) for e in oracle.enumerate_d_regular(8, 2, 10_000))
                 if g.stratum == 2)
    up = sampler.bounds.easy_upper[2]
    probs = {mv: Fraction(1, up) for mv in counting.enumerate_moves(state, "3edge")}
    assert step_probabilities(sampler, state, "3edge") == probs
    trials = 60_000
    assert _chi_against(_step_tally(sampler, state, "3edge", up, trials, 5), probs, trials) >= 1e-3


@pytest.mark.slow
def test_uniform_step_semantics(c8, c8_bounds, c8_states):
    sampler = Sampler(c8, general("uniform"), bounds=c8_bounds)
    state = max((g for g in c8_states if g.stratum == 1), key=lambda g: len(counting.enumerate_moves(g, "I")))
    up = c8_bounds.m_bar("I", 1)
    rho = sampler.params.rho_of("I", 1)
    moves = counting.enumerate_moves(state, "I")
    assert step_probabilities(sampler, state, "I") == {mv: rho / up for mv in moves}
    probs = {mv: Fraction(1, up) for mv in moves}
    trials = 8_000
    assert _chi_against(_step_tally(sampler, state, "I", up, trials, 6), probs, trials) >= 1e-3


def test_type_choice_matches_rho(c8_bounds, c8):
    sampler = Sampler(c8, SamplerConfig("uniform", "oracle"), bounds=c8_bounds)
    rng = RngStream(3)
    for i in range(c8_bounds.i1 + 1):
        tally = Counter(sampler.choose_type(i, rng) for _ in range(20_000))
        row = sampler.params.row(i)
        for t, p in row.items():
            assert abs(tally[t] / 20_000 - float(p)) < 0.02


def test_approx_needs_no_bounds(c8):
    sampler = Sampler(c8, SamplerConfig("approx"))
    assert sampler.bounds is None and sampler.i1 == 2
    s, tele = factor_approx(c8, SamplerConfig("approx"), RngStream(5))
    assert is_d_factor(s)


def test_module_entry_points(c8, c8_bounds):
    s, _ = factor_uniform(c8, SamplerConfig("uniform", "oracle"), RngStream(1), bounds=c8_bounds)
    assert is_d_factor(s)


@pytest.mark.slow
def test_uniform_step_count_sparse():
    inst = load_instance(400, 2, random_regular_forbidden(400, 2, RngStream(1, (1,))))
    sampler = Sampler(inst, SamplerConfig("uniform", "analytic", "cached"))
    runs = 30
    _, tele = sample_many(inst, count=runs, rng=RngStream(3), sampler=sampler)
    assert tele.steps / runs <= 10 * sampler.i1
