"""Type probabilities and expected visit counts for the uniform sampler.

Strata are solved from the top down.  With ``x_i`` the scaled expected number
of visits to each graph of stratum ``i`` and ``rho[t, i]`` the probability of
choosing type ``t`` there, the recursion makes every graph of a stratum
receive the same expected number of surviving arrivals from every class.
All arithmetic is in ``Fraction``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .bounds import BoundTable
from .errors import SolverInvariantViolated
from .switchings import TYPES

BOOSTERS = ("IIa+", "IIa-", "IIb+", "IIb-", "IIc+", "IIc-")
_SPAN = {"IIa": 1, "IIb": 2, "IIc": 3}


@dataclass(frozen=True)
class ParameterTable:
    i1: int
    eps: Fraction
    x: tuple
    rho: dict = field(repr=False)

    def rho_of(self, tau: str, i: int) -> Fraction:
        return self.rho.get((tau, i), Fraction(0))

    def row(self, i: int) -> dict:
        return {t: self.rho_of(t, i) for t in TYPES}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["i", "x", *[f"rho_{t}" for t in TYPES]])
        for i in range(self.i1 + 1):
            w.writerow([i, str(self.x[i]), *[str(self.rho_of(t, i)) for t in TYPES]])
        return buf.getvalue()


def _solve_raw(b: BoundTable, eps: Fraction) -> ParameterTable:
    i1 = b.i1
    eps = Fraction(eps)
    x = [Fraction(0)] * (i1 + 1)
    rho_I = [Fraction(0)] * (i1 + 1)
    rho_III = [Fraction(0)] * (i1 + 1)

    def visit_rate(j):
        # x_j rho_I(j) / m_bar_I(j): arrivals per forward Type I configuration
        if j < 1 or j > i1:
            return Fraction(0)
        m = b.m_bar("I", j)
        if not m:
            return Fraction(0)
        return x[j] * rho_I[j] / Fraction(m)

    for i in range(i1, -1, -1):
        mI = b.m_bar("I", i)
        k1 = Fraction(2 * b.m_low("B1", i)) / Fraction(mI) if i >= 1 and mI else Fraction(0)
        up1 = visit_rate(i + 1)
        k2 = 1 + up1 * (Fraction(b.m_low("A", i)) + 2 * Fraction(b.m_low("C", i)))
        k2 += 2 * visit_rate(i + 2) * Fraction(b.m_low("B2", i))
        k3 = up1 * Fraction(b.m_bar("III", i))
        den = 1 - k1 * (1 - eps)
        if den == 0:
            raise SolverInvariantViolated("singular step in the recursion", i)
        x[i] = (k2 - 2 * k1 * k3) / den
        if x[i] == 0:
            raise SolverInvariantViolated("x vanished", i)
        rho_III[i] = k3 / x[i]
        rho_I[i] = 1 - eps - 2 * rho_III[i]

    rho = {}
    for i in range(i1 + 1):
        rho[("I", i)] = rho_I[i]
        rho[("III+", i)] = rho[("III-", i)] = rho_III[i]
        for t, span in _SPAN.items():
            j = i + span
            val = Fraction(0)
            if j <= i1 and b.m_bar("I", j):
                val = x[j] / x[i] * rho_I[j] * Fraction(b.m_bar(t, i)) / Fraction(b.m_bar("I", j))
                if t != "IIa":
                    hat = b.m_hat(t, j)
                    if hat is None:
                        val = Fraction(0)
                    elif hat <= 0:
                        raise SolverInvariantViolated(f"gadget bound for {t} is {hat}", j)
                    else:
                        val /= Fraction(hat)
            rho[(t + "+", i)] = rho[(t + "-", i)] = val
    return ParameterTable(i1, eps, tuple(x), rho)


def check_invariants(table: ParameterTable) -> None:
    for i in range(table.i1 + 1):
        if table.x[i] <= 0:
            raise SolverInvariantViolated(f"x_{i} = {table.x[i]} is not positive", i)
        total = Fraction(0)
        for t in TYPES:
            r = table.rho_of(t, i)
            if r < 0 or r > 1:
                raise SolverInvariantViolated(f"rho[{t}]({i}) = {float(r):.6g} outside [0, 1]", i)
            total += r
        if total > 1:
            raise SolverInvariantViolated(f"type probabilities at stratum {i} sum to {float(total):.6g}", i)


def solve_parameters(bounds: BoundTable, eps=None) -> ParameterTable:
    table = _solve_raw(bounds, bounds.eps if eps is None else eps)
    check_invariants(table)
    return table


def booster_mass(table: ParameterTable, i: int) -> Fraction:
    return sum((table.rho_of(t, i) for t in BOOSTERS), Fraction(0))


def fit_epsilon(bounds: BoundTable, grid: int = 10_000, rounds: int = 50) -> Fraction:
    """Smallest grid value of ``eps`` that leaves room for the booster probabilities.

    Booster probabilities shrink as ``eps`` grows, so iterating
    ``eps <- max_i booster_mass(i)`` (rounded up to the grid) climbs to a
    feasible value.
    """
    eps = Fraction(0)
    for _ in range(rounds):
        table = _solve_raw(bounds, eps)
        need = max((booster_mass(table, i) for i in range(bounds.i1 + 1)), default=Fraction(0))
        if need <= eps:
            return eps
        eps = Fraction(-(-need.numerator * grid // need.denominator), grid)
    raise SolverInvariantViolated("no feasible eps found", -1)


def fixed_point_residuals(table: ParameterTable, bounds: BoundTable) -> list:
    """Residual of the visit-balance identity at every stratum (all zero when solved)."""
    i1 = table.i1
    x = table.x

    def rate(j):
        if j < 1 or j > i1 or not bounds.m_bar("I", j):
            return Fraction(0)
        return x[j] * table.rho_of("I", j) / Fraction(bounds.m_bar("I", j))

    out = []
    for i in range(i1 + 1):
        rhs = (1 + rate(i + 1) * bounds.m_low("A", i) + 2 * rate(i) * bounds.m_low("B1", i)
               + 2 * rate(i + 2) * bounds.m_low("B2", i) + 2 * rate(i + 1) * bounds.m_low("C", i))
        out.append(x[i] - rhs)
    return out


def equalization_residuals(table: ParameterTable, bounds: BoundTable) -> list:
    """Per-class arrival rates that must coincide across the types producing that class."""
    i1 = table.i1
    x = table.x
    res = []
    for i in range(1, i1 + 1):
        if not bounds.m_bar("I", i):
            continue
        q = x[i] * table.rho_of("I", i) / Fraction(bounds.m_bar("I", i))
        for t, span in _SPAN.items():
            j = i - span
            if j < 0 or not bounds.m_bar(t, j):
                continue
            val = x[j] * table.rho_of(t + "+", j) / Fraction(bounds.m_bar(t, j))
            if t != "IIa":
                hat = bounds.m_hat(t, i)
                if hat is None:
                    continue
                val *= hat
            res.append((t, i, q - val))
        if i - 1 >= 0 and bounds.m_bar("III", i - 1):
            val = x[i - 1] * table.rho_of("III+", i - 1) / Fraction(bounds.m_bar("III", i - 1))
            res.append(("III", i - 1, q - val))
    return res


def validate_parameters(table: ParameterTable, bounds: BoundTable) -> dict:
    """Report on the size bounds expected of a solution in the sparse regime."""
    inst = bounds.instance
    n, d, delta = inst.n, inst.d, inst.delta
    failures = []
    for i in range(table.i1 + 1):
        if table.x[i] <= 0:
            failures.append(f"x_{i} <= 0")
        s = Fraction(0)
        for t in TYPES:
            r = table.rho_of(t, i)
            if not 0 <= r <= 1:
                failures.append(f"rho[{t}]({i}) outside [0, 1]")
            s += r
        if s > 1:
            failures.append(f"sum of rho at {i} exceeds 1")
    regime = d * d + delta * delta <= Fraction(n, 100)
    if regime and delta > 0:
        n2 = Fraction(n * n)
        for i in range(table.i1 + 1):
            if i + 1 <= table.i1 and table.x[i + 1] / table.x[i] > Fraction(23 * (i + 1), 10 * d * delta):
                failures.append(f"x ratio at {i} too large")
            if table.rho_of("III+", i) > Fraction(12 * delta * delta, 10 * d * n):
                failures.append(f"rho_III({i}) too large")
            if not table.rho_of("IIb+", i) < Fraction(4 * d * delta) / n2:
                failures.append(f"rho_IIb({i}) too large")
            if table.rho_of("IIa+", i) > Fraction(2 * delta * delta) / n2:
                failures.append(f"rho_IIa({i}) too large")
            if not table.rho_of("IIc+", i) < Fraction(delta * delta) / (2 * n2):
                failures.append(f"rho_IIc({i}) too large")
            if not booster_mass(table, i) < table.eps:
                failures.append(f"booster mass at {i} not below eps")
    return {"ok": not failures, "failures": failures, "size_checks": bool(regime and delta > 0)}


def with_fitted_epsilon(bounds: BoundTable) -> BoundTable:
    return replace(bounds, eps=fit_epsilon(bounds))
