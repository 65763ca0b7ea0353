from dataclasses import replace
from fractions import Fraction

import pytest

from dfactor import oracle
from dfactor.bounds import analytic_table
from dfactor.errors import SolverInvariantViolated
from dfactor.graph_core import load_instance
from dfactor.solver import (
    check_invariants, equalization_residuals, fit_epsilon, fixed_point_residuals, solve_parameters,
    validate_parameters,
)
from dfactor.switchings import TYPES


@pytest.fixture(scope="module")
def big():
    return analytic_table(load_instance(10_000, 3, oracle.circulant_pairs(10_000, 3)))


def straight_line(b):
    """Plain re-statement of the backward recursion, stratum by stratum."""
    i1, eps = b.i1, Fraction(b.eps)
    F = Fraction
    x, rI = {}, {}
    for i in range(i1, -1, -1):
        k1 = 2 * F(b.m_low("B1+", i)) / F(b.m_bar("I", i)) if i else F(0)
        if i == i1:
            x[i] = 1 / (1 - k1 * (1 - eps))
            rI[i] = 1 - eps
            continue
        q1 = rI[i + 1] / F(b.m_bar("I", i + 1))
        k2 = 1 + q1 * (F(b.m_low("A", i)) + 2 * F(b.m_low("C+", i))) * x[i + 1]
        if i <= i1 - 2:
            k2 += 2 * rI[i + 2] * F(b.m_low("B2+", i)) * x[i + 2] / F(b.m_bar("I", i + 2))
        k3 = x[i + 1] * F(b.m_bar("III+", i)) * q1
        x[i] = (k2 - 2 * k1 * k3) / (1 - k1 * (1 - eps))
        rI[i] = 1 - eps - 2 * k3 / x[i]
    return x, rI


def test_big_instance_matches_straight_line(big):
    table = solve_parameters(big)
    x, rI = straight_line(big)
    assert table.x[big.i1] == x[big.i1]
    assert all(table.x[i] == x[i] and table.rho_of("I", i) == rI[i] for i in range(big.i1 + 1))


def test_big_instance_invariants(big):
    table = solve_parameters(big)
    assert table.rho_of("I", big.i1) == 1 - big.eps
    assert table.rho_of("III+", big.i1) == 0
    for i in range(big.i1 + 1):
        row = table.row(i)
        assert row["III+"] == row["III-"] and row["IIb+"] == row["IIb-"]
        if i < big.i1:
            assert row["I"] + row["III+"] + row["III-"] == 1 - big.eps
    assert validate_parameters(table, big)["ok"]
    assert validate_parameters(table, big)["size_checks"]


def test_span_limits(big):
    table = solve_parameters(big)
    i1 = big.i1
    assert table.rho_of("IIa+", i1) == 0
    assert table.rho_of("IIb+", i1 - 1) == 0
    assert table.rho_of("IIc+", i1 - 2) == 0


def test_fixed_point_and_equalization(big, c8_bounds):
    for b in (big, c8_bounds):
        table = solve_parameters(b)
        assert all(r == 0 for r in fixed_point_residuals(table, b))
        assert all(r == 0 for _, _, r in equalization_residuals(table, b))


def test_deterministic(big):
    assert solve_parameters(big) == solve_parameters(big)


def test_zero_delta():
    b = analytic_table(load_instance(10, 3))
    table = solve_parameters(b)
    assert table.i1 == 0 and table.x == (1,)
    assert table.rho_of("I", 0) == 1 - b.eps
    assert all(table.rho_of(t, 0) == 0 for t in TYPES if t != "I")
    assert validate_parameters(table, b)["ok"]


def test_corrupted_table_reported(big):
    table = solve_parameters(big)
    rho = dict(table.rho)
    rho[("III+", 0)] = -rho[("III+", 0)]
    bad = replace(table, rho=rho)
    rep = validate_parameters(bad, big)
    assert not rep["ok"] and any("III" in f for f in rep["failures"])
    with pytest.raises(SolverInvariantViolated):
        check_invariants(bad)


def test_fit_epsilon(c8_bounds):
    eps = fit_epsilon(replace(c8_bounds, eps=Fraction(0)))
    assert eps == c8_bounds.eps == Fraction(77, 1000)
    table = solve_parameters(c8_bounds)
    check_invariants(table)


def test_csv_dump(c8_bounds):
    text = solve_parameters(c8_bounds).to_csv()
    lines = text.strip().splitlines()
    assert lines[0].startswith("i,x,rho_I")
    assert len(lines) == c8_bounds.i1 + 2
