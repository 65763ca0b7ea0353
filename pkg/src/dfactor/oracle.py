"""Exhaustive ground truth for tiny instances.

Enumerates labelled regular graphs and d-factors, groups them into strata,
computes exact bound extrema, checks the forward/inverse correspondence of
every switching class, and measures sampler output against the uniform
distribution.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np
from scipy import stats

from . import counting
from .bounds import BoundTable, analytic_table, i1_easy, i1_uniform
from .errors import BudgetExhausted, UnknownOutcome
from .graph_core import ColoredState, HostInstance, canon, expected_red_edges, load_instance
from .switchings import (
    B1_VARIANT, CLASSES, THREE_INV, TYPES, apply_move, base_type, matches, state_bit,
)

DEFAULT_BUDGET = 200_000


# ----- enumeration ----------------------------------------------------------

def _enumerate(n: int, d: int, allowed, budget: int) -> list:
    """All d-regular graphs whose edges lie in ``allowed(u, v)``, as sorted edge tuples.

    The smallest vertex still short of degree ``d`` picks all of its missing
    neighbours at once among larger vertices, so each graph appears once.
    """
    if (n * d) % 2 or d >= n:
        return []
    deg = [0] * n
    adj = [set() for _ in range(n)]
    out = []

    def rec(start):
        v = start
        while v < n and deg[v] == d:
            v += 1
        if v == n:
            out.append(tuple(sorted((a, b) for a in range(n) for b in adj[a] if a < b)))
            if len(out) > budget:
                raise BudgetExhausted(f"more than {budget} graphs")
            return
        need = d - deg[v]
        cands = [w for w in range(v + 1, n) if deg[w] < d and w not in adj[v] and allowed(v, w)]
        for chosen in combinations(cands, need):
            for w in chosen:
                adj[v].add(w)
                adj[w].add(v)
                deg[v] += 1
                deg[w] += 1
            rec(v + 1)
            for w in chosen:
                adj[v].discard(w)
                adj[w].discard(v)
                deg[v] -= 1
                deg[w] -= 1

    rec(0)
    return out


def enumerate_d_regular(n: int, d: int, budget: int = DEFAULT_BUDGET) -> list:
    return _enumerate(n, d, lambda u, v: True, budget)


def enumerate_d_factors(instance: HostInstance, budget: int = DEFAULT_BUDGET) -> list:
    red = instance.red_adj
    return _enumerate(instance.n, instance.d, lambda u, v: v not in red[u], budget)


@dataclass
class StrataCatalog:
    instance: HostInstance
    strata: dict

    @property
    def sizes(self) -> dict:
        return {i: len(g) for i, g in sorted(self.strata.items())}

    def states(self, i: int):
        for key in self.strata.get(i, ()):
            yield ColoredState.from_edges(self.instance, key)

    def all_keys(self):
        for i in sorted(self.strata):
            yield from self.strata[i]


def strata_catalog(instance: HostInstance, i_max: int | None = None,
                   budget: int = DEFAULT_BUDGET) -> StrataCatalog:
    strata = defaultdict(list)
    red = instance.forbidden_edges
    for key in enumerate_d_regular(instance.n, instance.d, budget):
        i = sum(1 for e in key if e in red)
        if i_max is None or i <= i_max:
            strata[i].append(key)
    return StrataCatalog(instance, dict(strata))


# ----- brute-force counting --------------------------------------------------

def brute_count(state: ColoredState, pattern) -> int:
    """Tuples matching ``pattern``, by extending prefixes one vertex at a time."""
    n, k = state.n, pattern.k
    total = 0

    def rec(v):
        nonlocal total
        if len(v) == k:
            total += matches(state, pattern, v)
            return
        for x in range(n):
            if v and (x == v[-1] or not state_bit(state, v[-1], x) & pattern.cons[len(v) - 1]):
                continue
            rec(v + [x])

    rec([])
    return total


# ----- extrema ------------------------------------------------------------------

def graph_profile(state: ColoredState) -> dict:
    """Every forward/inverse count used by the samplers, for one graph."""
    eng = counting.FixedEngine(state)
    prof = {
        "f_easy": eng.f_easy(state),
        "b_easy": eng.b_easy(state),
        "f_I": eng.f_type(state, "I"),
        "b_A": eng.b_class(state, "A"),
        "b_B1": eng.b_class(state, "B1"),
        "b_B1_reach": eng.b_class(state, "B1", reachable=True),
        "b_B2": eng.b_class(state, "B2"),
        "b_C": eng.b_class(state, "C"),
    }
    for t in ("IIa", "IIb", "IIc", "III"):
        prof["f_" + t] = eng.f_type(state, t + "+")
    hats = {}
    for t in ("IIb", "IIc"):
        vals = [counting.bhat(state, w, t + "+") for w in counting.enumerate_pattern(state, B1_VARIANT[t])]
        hats[t] = vals
    prof["bhat"] = hats
    return prof


def strata_extrema(instance: HostInstance, budget: int = DEFAULT_BUDGET, eps=None) -> BoundTable:
    """Bound table whose entries are the exact extrema over enumerated strata."""
    from .solver import fit_epsilon

    ie = i1_easy(instance)
    iu = i1_uniform(instance) if instance.regular_complement else 0
    top = max(ie, iu)
    cat = strata_catalog(instance, top, budget)
    upper, lower, gadget = {}, {}, {}
    easy_upper, easy_lower = {}, {}
    for i in range(top + 1):
        profs = [graph_profile(s) for s in cat.states(i)]
        if i <= ie:
            easy_upper[i] = max((p["f_easy"] for p in profs), default=0)
            easy_lower[i] = min((p["b_easy"] for p in profs), default=0)
        if i <= iu:
            def mx(name):
                return max((p[name] for p in profs), default=0)

            def mn(name):
                return min((p[name] for p in profs), default=0)

            # Type I at stratum 0 means "output", so it needs no bound there
            upper[("I", i)] = max(mx("f_I"), 1) if i else 0
            for t in ("IIa", "IIb", "IIc", "III"):
                upper[(t, i)] = mx("f_" + t)
            lower[("A", i)] = mn("b_A")
            lower[("B1", i)] = mn("b_B1_reach") if i else 0
            lower[("B2", i)] = mn("b_B2")
            lower[("C", i)] = mn("b_C")
            for t in ("IIb", "IIc"):
                pos = [h for p in profs for h in p["bhat"][t] if h > 0]
                gadget[(t, i)] = min(pos) if pos else None
    table = BoundTable(instance, "oracle", iu, ie, Fraction(0), upper, lower, gadget,
                       easy_upper, easy_lower, reachable_b1=True)
    if eps is None:
        eps = fit_epsilon(table) if iu or instance.m_red_total else Fraction(0)
    from dataclasses import replace
    return replace(table, eps=Fraction(eps))


# ----- correspondence of forward and inverse switchings ---------------------------

@dataclass
class BijectionReport:
    instance: dict
    graphs: int
    checked: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _forward_tally(cat: StrataCatalog, types) -> tuple[dict, dict]:
    """Forward moves landing on each graph, per class, split by B1 octagon variant."""
    tally = defaultdict(Counter)
    gadget_arrivals = defaultdict(Counter)
    for key in cat.all_keys():
        src = ColoredState.from_edges(cat.instance, key)
        for tau in types:
            for mv in counting.enumerate_moves(src, tau):
                dst = apply_move(src.copy(), mv)
                k2 = dst.key()
                if tau == "3edge":
                    tally[k2]["easy"] += 1
                    continue
                t = base_type(tau)
                tally[k2][mv.cls] += 1
                if mv.cls.startswith("B1"):
                    variant = "I" if t == "I" else t
                    tally[k2][mv.cls + ":" + variant] += 1
                    if t in ("IIb", "IIc"):
                        gadget_arrivals[k2][(tau, mv.octagon_plus())] += 1
    return tally, gadget_arrivals


def bijection_check(instance: HostInstance, classes=None, budget: int = DEFAULT_BUDGET) -> BijectionReport:
    """Forward moves into each graph against the inverse counts, for every class.

    For B1 the check runs per octagon variant: Type I and IIa arrivals equal
    the variant's octagon count, and gadget arrivals on each octagon equal its
    number of gadget completions.
    """
    classes = list(classes) if classes is not None else ["easy", *CLASSES]
    cat = strata_catalog(instance, None, budget)
    types = ["3edge"] if classes == ["easy"] else (["3edge", *TYPES] if "easy" in classes else list(TYPES))
    tally, gadget_arrivals = _forward_tally(cat, types)
    rep = BijectionReport(instance.to_json(), sum(cat.sizes.values()), 0)
    for key in cat.all_keys():
        g = ColoredState.from_edges(instance, key)
        eng = counting.FixedEngine(g)
        got = tally.get(key, Counter())
        for alpha in classes:
            if alpha == "easy":
                want = eng.b_easy(g)
                have = got["easy"]
                rep.checked += 1
                if want != have:
                    rep.mismatches.append({"graph": key, "class": "easy", "inverse": want, "forward": have})
                continue
            if alpha.startswith("B1"):
                by = eng.b1_by_variant(g)
                for variant in ("I", "IIa"):
                    have = got[f"{alpha}:{variant}"]
                    rep.checked += 1
                    if by[variant] != have:
                        rep.mismatches.append({"graph": key, "class": f"{alpha}:{variant}",
                                               "inverse": by[variant], "forward": have})
                o = alpha[-1]
                for variant in ("IIb", "IIc"):
                    for w in counting.enumerate_pattern(g, B1_VARIANT[variant]):
                        from .switchings import MINUS
                        octagon = w if o == "+" else tuple(w[p] for p in MINUS)
                        want = counting.bhat(g, octagon, variant + o)
                        have = gadget_arrivals.get(key, Counter())[(variant + o, w)]
                        rep.checked += 1
                        if want != have:
                            rep.mismatches.append({"graph": key, "class": f"{alpha}:{variant}", "octagon": w,
                                                   "inverse": want, "forward": have})
                continue
            want = eng.b_class(g, alpha)
            have = got[alpha]
            rep.checked += 1
            if want != have:
                rep.mismatches.append({"graph": key, "class": alpha, "inverse": want, "forward": have})
    return rep


# ----- sandwich ---------------------------------------------------------------------

def sandwich(instance: HostInstance, budget: int = DEFAULT_BUDGET) -> dict:
    """Compare closed-form bounds with exact extrema wherever the closed form is positive."""
    ana = analytic_table(instance)
    cat = strata_catalog(instance, None, budget)
    rows = []
    violations = []

    def cmp(kind, name, i, bound, extreme, ok):
        row = {"kind": kind, "name": name, "i": i, "bound": str(bound), "extreme": extreme}
        if bound is None or bound <= 0:
            row["status"] = "vacuous"
        else:
            row["status"] = "ok" if ok else "violated"
            if not ok:
                violations.append(row)
        rows.append(row)

    for i, keys in sorted(cat.strata.items()):
        profs = [graph_profile(ColoredState.from_edges(instance, k)) for k in keys]
        mu, ml = ana.easy_upper.get(i), ana.easy_lower.get(i)
        from .bounds import easy_bounds, gadget_lower, uniform_lower, uniform_upper
        mu, _ = easy_bounds(instance, i)
        _, ml = easy_bounds(instance, i)
        fmax = max(p["f_easy"] for p in profs)
        bmin = min(p["b_easy"] for p in profs)
        cmp("upper", "easy", i, mu, fmax, fmax <= mu)
        cmp("lower", "easy", i, ml, bmin, ml <= bmin)
        if i >= 1:
            v = uniform_upper(instance, "I", i)
            cmp("upper", "I", i, v, max(p["f_I"] for p in profs), max(p["f_I"] for p in profs) <= v)
        for t in ("IIa", "IIb", "IIc", "III"):
            v = uniform_upper(instance, t, i)
            m = max(p["f_" + t] for p in profs)
            cmp("upper", t, i, v, m, m <= v)
        for a, name in (("A", "b_A"), ("B1", "b_B1"), ("B2", "b_B2"), ("C", "b_C")):
            v = uniform_lower(instance, a, i)
            m = min(p[name] for p in profs)
            cmp("lower", a, i, v, m, v <= m)
        for t in ("IIb", "IIc"):
            v = gadget_lower(instance, t, i)
            hs = [h for p in profs for h in p["bhat"][t]]
            m = min(hs) if hs else None
            cmp("gadget", t, i, v, m, m is None or v <= m)
    return {"instance": instance.to_json(), "rows": rows, "violations": violations, "ok": not violations}


# ----- expectation -------------------------------------------------------------------

def expectation_check(instance: HostInstance, budget: int = DEFAULT_BUDGET) -> dict:
    graphs = enumerate_d_regular(instance.n, instance.d, budget)
    red = instance.forbidden_edges
    total = sum(sum(1 for e in g if e in red) for g in graphs)
    mean = Fraction(total, len(graphs)) if graphs else Fraction(0)
    want = expected_red_edges(instance)
    return {"graphs": len(graphs), "mean": str(mean), "expected": str(want), "ok": mean == want}


# ----- distributions -------------------------------------------------------------------

@dataclass
class DistributionReport:
    support: int
    samples: int
    tv: float
    chi2: float
    p_value: float
    min_expected: float
    seed: object = None
    counts: list = field(default_factory=list, repr=False)

    @property
    def chi2_valid(self) -> bool:
        return self.min_expected >= 5

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    def text(self) -> str:
        return (f"support={self.support} samples={self.samples} tv={self.tv:.5f} "
                f"chi2={self.chi2:.2f} p={self.p_value:.4g}")


def uniformity_test(samples, support, seed=None) -> DistributionReport:
    """TV distance and chi-square test of ``samples`` against uniform on ``support``."""
    index = {tuple(k): j for j, k in enumerate(support)}
    counts = np.zeros(len(index), dtype=np.int64)
    total = 0
    for s in samples:
        key = tuple(s.key()) if hasattr(s, "key") else tuple(tuple(e) for e in s)
        j = index.get(key)
        if j is None:
            raise UnknownOutcome(f"sample {key} is not in the support")
        counts[j] += 1
        total += 1
    k = len(index)
    if total == 0 or k == 0:
        return DistributionReport(k, total, 0.0, 0.0, 1.0, 0.0, seed, counts.tolist())
    expected = total / k
    tv = 0.5 * float(np.abs(counts / total - 1.0 / k).sum())
    if k > 1:
        chi2, p = stats.chisquare(counts)
    else:
        chi2, p = 0.0, 1.0
    return DistributionReport(k, total, tv, float(chi2), float(p), expected, seed, counts.tolist())


# ----- exact output distribution ------------------------------------------------------------

def exact_output_distribution(instance: HostInstance, algorithm: str, bounds: BoundTable,
                              params=None, budget: int = DEFAULT_BUDGET) -> dict:
    """Probability that one attempt outputs each d-factor, solved exactly in floating point.

    One attempt starts from a uniform d-regular graph and ends in an output or
    a rejection; since rejections restart from scratch the output law is this
    vector normalised.  Visits are found by solving the linear system of the
    step chain.
    """
    from scipy.sparse import lil_matrix
    from scipy.sparse.linalg import spsolve

    from .samplers import rejection_weights_easy, rejection_weights_uniform

    everything = enumerate_d_regular(instance.n, instance.d, budget)
    red = instance.forbidden_edges
    i1 = bounds.i1_easy if algorithm == "easy" else bounds.i1
    keys = [k for k in everything if sum(1 for e in k if e in red) <= i1]
    idx = {k: j for j, k in enumerate(keys)}
    m = len(keys)
    P = lil_matrix((m, m))
    out = np.zeros(m)
    for k in keys:
        st = ColoredState.from_edges(instance, k)
        if algorithm == "easy":
            trans, stop = rejection_weights_easy(st, bounds)
        else:
            trans, stop = rejection_weights_uniform(st, bounds, params)
        j = idx[k]
        out[j] = stop
        for k2, w in trans.items():
            P[j, idx[k2]] += w
    init = np.full(m, 1.0 / len(everything))
    A = (np.eye(m) - P.toarray()).T
    visits = np.linalg.solve(A, init) if m < 6000 else spsolve((lil_matrix(A)).tocsr(), init)
    probs = visits * out
    return {keys[j]: float(probs[j]) for j in range(m) if out[j] > 0}


# ----- instances where the closed-form bounds hold end to end ---------------------------------

def circulant_pairs(n: int, delta: int) -> list:
    """A ``delta``-regular circulant forbidden graph on ``n`` vertices."""
    if delta >= n or (delta % 2 and n % 2):
        raise ValueError(f"no {delta}-regular circulant on {n} vertices")
    offsets = list(range(1, delta // 2 + 1))
    pairs = {canon(v, (v + s) % n) for v in range(n) for s in offsets}
    if delta % 2:
        pairs |= {canon(v, v + n // 2) for v in range(n // 2)}
    return sorted(pairs)


def analytic_guard_report(instance: HostInstance, budget: int = DEFAULT_BUDGET) -> dict:
    """Whether the uniform sampler with closed-form bounds can never trip a guard.

    Every graph of strata ``0..i1`` is visited; for every type with positive
    probability the forward count must not exceed its bound, and for every
    move the target lower bounds must be positive and at most the actual
    inverse counts.
    """
    from .errors import SolverInvariantViolated
    from .solver import solve_parameters

    if not instance.regular_complement:
        return {"ok": False, "reason": "forbidden graph is not regular"}
    table = analytic_table(instance)
    try:
        params = solve_parameters(table)
    except SolverInvariantViolated as exc:
        return {"ok": False, "reason": f"solver: {exc}"}
    cat = strata_catalog(instance, table.i1, budget)
    checked = 0
    for key in cat.all_keys():
        g = ColoredState.from_edges(instance, key)
        i = g.stratum
        for tau in TYPES:
            if not params.rho_of(tau, i) or (i == 0 and tau == "I"):
                continue
            moves = counting.enumerate_moves(g, tau)
            up = table.m_bar(tau, i)
            if len(moves) > up:
                return {"ok": False, "reason": f"f_{tau} = {len(moves)} > {up} at stratum {i}"}
            for mv in moves:
                g2 = apply_move(g.copy(), mv)
                j = mv.target
                if base_type(tau) in ("IIb", "IIc"):
                    low, have = table.m_hat(tau, j), counting.bhat(g2, mv.v, tau)
                    if low is None or low <= 0 or low > have:
                        return {"ok": False, "reason": f"gadget bound {low} vs {have} for {tau} at {j}"}
                low = table.m_low(mv.cls, j)
                have = counting.FixedEngine(g2).b_class(g2, mv.cls)
                if low <= 0 or low > have:
                    return {"ok": False, "reason": f"lower bound {low} vs {have} for {mv.cls} at {j}"}
                checked += 1
    return {"ok": True, "reason": "", "moves_checked": checked, "i1": table.i1}


def find_analytic_instance(max_support: int = 400, n_max: int = 12, budget: int = DEFAULT_BUDGET):
    """Largest enumerable instance whose closed-form bounds pass every guard.

    Candidates use circulant forbidden graphs; the factor support must have
    at least two and at most ``max_support`` elements so that a
    distribution test stays meaningful.  Ties prefer larger ``delta``.
    """
    best = None
    for n in range(n_max, 3, -1):
        for delta in range(n - 2, -1, -1):
            for d in range(1, n - delta):
                if (n * d) % 2:
                    continue
                try:
                    inst = load_instance(n, d, circulant_pairs(n, delta))
                    support = len(enumerate_d_factors(inst, max_support))
                except (ValueError, BudgetExhausted):
                    continue
                if not 2 <= support <= max_support:
                    continue
                try:
                    rep = analytic_guard_report(inst, budget)
                except BudgetExhausted:
                    continue
                if rep["ok"]:
                    cand = (n, delta, d)
                    if best is None or cand > best[0]:
                        best = (cand, inst, support)
        if best is not None:
            return best[1], best[2]
    return None, 0
