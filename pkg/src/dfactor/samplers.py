"""The three d-factor samplers and their restart loops.

``factor_easy`` and ``factor_uniform`` are exact: every rejection restarts
from a fresh initial graph, and rejection probabilities are exact rationals
realised by integer comparisons.  ``factor_approx`` keeps resampling
proposals until one is valid and is only close to uniform.

On tiny instances (``n <= SamplerConfig.memo_limit``) counts and explicit
move lists are memoised per graph; a move is then drawn from the list, which
has the same law as rejection from the proposal space.
"""

from __future__ import annotations

import time
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from . import counting
from .bounds import BoundTable, check_positive, i1_uniform, make_table
from .errors import BoundGuard, BudgetExhausted, InvalidInstance, NotRegularComplement
from .graph_core import ColoredState, HostInstance, is_d_factor
from .regular_gen import draw_initial
from .rng import RngStream, as_stream
from .solver import ParameterTable, solve_parameters
from .switchings import TYPES, apply_move, base_type, make_move, move_toggles

ALGORITHMS = ("easy", "uniform", "approx")
PROVIDERS = ("analytic", "oracle")
ENGINES = ("naive", "cached")
REJECTION_KINDS = ("t", "f", "pre_b", "b")


@dataclass
class SamplerConfig:
    algorithm: str = "uniform"
    provider: str = "analytic"
    engine: str = "naive"
    seed: int = 0
    restart_budget: int = 10_000
    step_budget: int | None = None
    proposal_budget: int = 1_000_000
    memo_limit: int = 12
    catalog_limit: int = 20_000

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InvalidInstance(f"unknown algorithm {self.algorithm!r}")
        if self.provider not in PROVIDERS:
            raise InvalidInstance(f"unknown bound provider {self.provider!r}")
        if self.engine not in ENGINES:
            raise InvalidInstance(f"unknown counting engine {self.engine!r}")
        if self.restart_budget <= 0 or (self.step_budget is not None and self.step_budget <= 0):
            raise InvalidInstance("budgets must be positive")


@dataclass
class RunTelemetry:
    samples: int = 0
    restarts: int = 0
    steps: int = 0
    initial_draws: int = 0
    stuck: int = 0
    rejections: Counter = field(default_factory=Counter)
    moves: Counter = field(default_factory=Counter)
    classes: Counter = field(default_factory=Counter)
    wall: float = 0.0

    def reject(self, kind: str) -> None:
        self.rejections[kind] += 1
        self.restarts += 1

    def merge(self, other: "RunTelemetry") -> "RunTelemetry":
        self.samples += other.samples
        self.restarts += other.restarts
        self.steps += other.steps
        self.initial_draws += other.initial_draws
        self.stuck += other.stuck
        self.rejections.update(other.rejections)
        self.moves.update(other.moves)
        self.classes.update(other.classes)
        self.wall += other.wall
        return self

    @property
    def restart_fraction(self) -> float:
        """Share of initial draws that did not end in an output."""
        if not self.initial_draws:
            return 0.0
        return 1.0 - self.samples / self.initial_draws

    def rejection_rates(self) -> dict:
        attempts = max(self.restarts + self.samples, 1)
        return {k: self.rejections[k] / attempts for k in REJECTION_KINDS}

    def to_json(self) -> dict:
        return {
            "samples": self.samples, "restarts": self.restarts, "steps": self.steps,
            "initial_draws": self.initial_draws, "stuck": self.stuck,
            "rejections": {k: self.rejections[k] for k in REJECTION_KINDS},
            "rejection_rates": self.rejection_rates(),
            "restart_fraction": self.restart_fraction,
            "moves": dict(sorted(self.moves.items())), "classes": dict(sorted(self.classes.items())),
            "wall_seconds": self.wall,
        }


class _Restart(Exception):
    pass


def _accept(rng: RngStream, num, den) -> bool:
    """Exact Bernoulli(num/den) for nonnegative ``num <= den``."""
    if isinstance(num, int) and isinstance(den, int):
        return rng.py.randrange(den) < num
    return rng.bernoulli(Fraction(num) / Fraction(den))


class _Node:
    """Memoised facts about one graph of a tiny instance, keyed by its edge list."""

    __slots__ = ("state", "stratum", "engine", "moves", "b", "bhat")

    def __init__(self, state: ColoredState):
        self.state = state
        self.stratum = state.stratum
        self.engine = counting.FixedEngine(state)
        self.moves = {}
        self.b = {}
        self.bhat = {}


class Sampler:
    """Everything one instance needs, reusable across many samples.

    Instances with ``n <= config.memo_limit`` walk on edge-list keys with
    every count and move list memoised; larger ones walk on a mutable state
    and count with the configured engine.
    """

    def __init__(self, instance: HostInstance, config: SamplerConfig | None = None,
                 bounds: BoundTable | None = None, params: ParameterTable | None = None):
        self.instance = instance
        self.config = config = config or SamplerConfig()
        alg = config.algorithm
        if alg in ("uniform", "approx") and not instance.regular_complement:
            raise NotRegularComplement(f"{alg} needs a regular forbidden graph")
        if alg == "approx":
            self.bounds = bounds
            self.i1 = i1_uniform(instance)
        else:
            self.bounds = bounds or make_table(instance, config.provider)
            self.i1 = self.bounds.i1_easy if alg == "easy" else self.bounds.i1
        self.analytic = self.bounds is not None and self.bounds.provider == "analytic"
        self.reachable = bool(self.bounds is not None and self.bounds.reachable_b1)
        self.params = None
        if alg == "uniform":
            self.params = params or solve_parameters(self.bounds)
            self._type_tables = [self._type_table(i) for i in range(self.i1 + 1)]
        self.step_budget = config.step_budget or 1000 * (self.i1 + 1)
        self.tiny = instance.n <= config.memo_limit
        self.nodes = {}
        self._literal = {}
        self._catalog = self._load_catalog() if self.tiny and config.catalog_limit else None

    def _load_catalog(self):
        """Listed d-regular graphs for a tiny instance, or ``None`` if there are too many.

        A uniform index into the full list has the same law as the pairing
        generator, at a fraction of the cost.
        """
        from .oracle import enumerate_d_regular
        try:
            every = enumerate_d_regular(self.instance.n, self.instance.d, self.config.catalog_limit)
        except BudgetExhausted:
            return None
        red = self.instance.forbidden_edges
        keep = [k for k in every if sum(1 for e in k if e in red) <= self.i1]
        return len(every), keep

    # ----- helpers -----
    def _type_table(self, i: int):
        probs = [(t, self.params.rho_of(t, i)) for t in TYPES]
        probs = [(t, p) for t, p in probs if p > 0]
        den = 1
        for _, p in probs:
            den = lcm(den, p.denominator)
        cum, acc = [], 0
        for _, p in probs:
            acc += p.numerator * (den // p.denominator)
            cum.append(acc)
        return den, cum, [t for t, _ in probs]

    def choose_type(self, i: int, rng: RngStream):
        """Type drawn with probability ``rho[t, i]``, or ``None`` for a t-rejection."""
        den, cum, names = self._type_tables[i]
        r = rng.py.randrange(den)
        j = bisect_right(cum, r)
        return names[j] if j < len(names) else None

    def literal(self, tau: str, i: int) -> bool:
        key = (tau, i)
        if key not in self._literal:
            self._literal[key] = self.bounds.literal(tau, i)
        return self._literal[key]

    def _guard(self, low, have, what: str) -> None:
        if self.analytic:
            check_positive(low, what)
            if low > have:
                raise BoundGuard(f"{what} = {low} exceeds the actual count {have}; "
                                 "try the oracle provider")

    def _check_upper(self, f, upper, tau, i) -> None:
        if f > upper:
            if self.analytic:
                raise BoundGuard(f"forward count {f} exceeds its bound {upper} for {tau} at stratum {i}")
            raise AssertionError(f"forward count {f} exceeds the exact bound {upper}")

    def _restarts(self, tele):
        if tele.restarts >= self.config.restart_budget:
            raise BudgetExhausted(f"{tele.restarts} restarts without an output "
                                  "(the instance may have no d-factor)")

    def _finish(self, state, tele, t0):
        if not is_d_factor(state):
            raise AssertionError("sampler produced a graph that is not a d-factor")
        tele.samples += 1
        tele.wall += time.perf_counter() - t0
        return state, tele

    def run(self, rng) -> tuple[ColoredState, RunTelemetry]:
        rng = as_stream(rng)
        tele, t0 = RunTelemetry(), time.perf_counter()
        alg = self.config.algorithm
        if self.tiny:
            node = {"easy": self._tiny_easy, "uniform": self._tiny_uniform,
                    "approx": self._tiny_approx}[alg](rng, tele)
            return self._finish(node.state.copy(), tele, t0)
        state = {"easy": self._run_easy, "uniform": self._run_uniform,
                 "approx": self._run_approx}[alg](rng, tele)
        return self._finish(state, tele, t0)

    # ----- tiny instances: memoised walk on keys -----
    def _node(self, key) -> _Node:
        node = self.nodes.get(key)
        if node is None:
            node = self.nodes[key] = _Node(ColoredState.from_edges(self.instance, key))
        return node

    def _node_moves(self, node: _Node, tau: str) -> list:
        """Valid type-``tau`` moves from ``node`` paired with the node they reach."""
        out = node.moves.get(tau)
        if out is None:
            out = []
            for mv in counting.enumerate_moves(node.state, tau):
                out.append((mv, self._node(apply_move(node.state.copy(), mv).key())))
            node.moves[tau] = out
        return out

    def _node_b(self, node: _Node, alpha: str):
        val = node.b.get(alpha)
        if val is None:
            val = node.engine.b_easy(node.state) if alpha == "easy" \
                else node.engine.b_class(node.state, alpha, reachable=self.reachable)
            node.b[alpha] = val
        return val

    def _node_bhat(self, node: _Node, mv):
        key = (mv.type, mv.v)
        val = node.bhat.get(key)
        if val is None:
            val = node.bhat[key] = counting.bhat(node.state, mv.v, mv.type)
        return val

    def _tiny_begin(self, rng, tele) -> _Node:
        if self._catalog is None:
            state, draws = draw_initial(self.instance, self.i1, rng, self.config.restart_budget)
            tele.initial_draws += draws
            return self._node(state.key())
        total, keep = self._catalog
        if not keep:
            raise BudgetExhausted(f"no d-regular graph has at most {self.i1} red edges")
        for draw in range(1, self.config.restart_budget + 1):
            j = rng.py.randrange(total)
            if j < len(keep):
                tele.initial_draws += draw
                return self._node(keep[j])
        raise BudgetExhausted(f"{self.config.restart_budget} draws all had more than {self.i1} red edges")

    def _tiny_forward(self, node, tau, upper, rng, tele):
        """Accept with probability ``f/upper`` and pick a uniform move, in one draw."""
        moves = self._node_moves(node, tau)
        if not upper:
            tele.reject("f")
            raise _Restart
        self._check_upper(len(moves), upper, tau, node.stratum)
        if isinstance(upper, int):
            r = rng.py.randrange(upper)
            if r >= len(moves):
                tele.reject("f")
                raise _Restart
            return moves[r]
        if not _accept(rng, len(moves), upper):
            tele.reject("f")
            raise _Restart
        return moves[rng.py.randrange(len(moves))]

    def _b_reject(self, low, have, what, rng, tele, kind="b"):
        self._guard(low, have, what)
        if not low or not _accept(rng, low, have):
            tele.reject(kind)
            raise _Restart

    def _tiny_easy(self, rng, tele):
        b = self.bounds
        while True:
            self._restarts(tele)
            node = self._tiny_begin(rng, tele)
            try:
                for _ in range(self.step_budget):
                    i = node.stratum
                    if i == 0:
                        return node
                    mv, node = self._tiny_forward(node, "3edge", b.easy_upper.get(i, 0), rng, tele)
                    tele.steps += 1
                    tele.moves["3edge"] += 1
                    self._b_reject(b.easy_lower.get(i - 1, 0), self._node_b(node, "easy"),
                                   f"easy lower bound at stratum {i - 1}", rng, tele)
                raise BudgetExhausted(f"step budget {self.step_budget} exhausted")
            except _Restart:
                continue

    def _tiny_uniform(self, rng, tele):
        b = self.bounds
        while True:
            self._restarts(tele)
            node = self._tiny_begin(rng, tele)
            try:
                for _ in range(self.step_budget):
                    i = node.stratum
                    tau = self.choose_type(i, rng)
                    if tau is None:
                        tele.reject("t")
                        raise _Restart
                    if i == 0 and tau == "I":
                        return node
                    mv, node = self._tiny_forward(node, tau, b.m_bar(tau, i), rng, tele)
                    tele.steps += 1
                    tele.moves[tau] += 1
                    tele.classes[mv.cls] += 1
                    j = mv.target
                    if base_type(tau) in ("IIb", "IIc"):
                        self._b_reject(b.m_hat(tau, j), self._node_bhat(node, mv),
                                       f"gadget lower bound for {tau} at stratum {j}", rng, tele, "pre_b")
                    self._b_reject(b.m_low(mv.cls, j), self._node_b(node, mv.cls),
                                   f"lower bound for class {mv.cls} at stratum {j}", rng, tele)
                raise BudgetExhausted(f"step budget {self.step_budget} exhausted")
            except _Restart:
                continue

    def _tiny_approx(self, rng, tele):
        while True:
            self._restarts(tele)
            node = self._tiny_begin(rng, tele)
            try:
                for _ in range(self.step_budget):
                    if node.stratum == 0:
                        return node
                    moves = self._node_moves(node, "I")
                    if not moves:
                        # no valid move exists here; start over
                        tele.stuck += 1
                        tele.restarts += 1
                        raise _Restart
                    mv, node = moves[rng.py.randrange(len(moves))]
                    tele.steps += 1
                    tele.moves["I"] += 1
                    tele.classes[mv.cls] += 1
                raise BudgetExhausted(f"step budget {self.step_budget} exhausted")
            except _Restart:
                continue

    # ----- general instances: walk on a mutable state -----
    def _begin(self, rng, tele):
        state, draws = draw_initial(self.instance, self.i1, rng, self.config.restart_budget)
        tele.initial_draws += draws
        engine = counting.CachedEngine(state) if self.config.engine == "cached" else counting.NaiveEngine()
        return state, engine

    def _apply(self, state, mv, engine):
        rem, add = move_toggles(mv)
        if rem or add:
            state.toggle(rem, add)
            if isinstance(engine, counting.CachedEngine):
                engine.toggle(rem, add)

    def _forward(self, state, tau, i, upper, engine, rng, tele):
        """A uniform valid move that survived f-rejection, or a restart."""
        if not upper:
            tele.reject("f")
            raise _Restart
        if self.literal(tau, i):
            # the bound is the proposal-space size: one proposal is the f-rejection
            prop = counting.propose(state, tau, rng)
            mv = None if prop is None else make_move(state, tau, prop[0], prop[1])
            if mv is None:
                tele.reject("f")
                raise _Restart
            return mv
        f = engine.f_easy(state) if tau == "3edge" else engine.f_type(state, tau)
        self._check_upper(f, upper, tau, i)
        if not _accept(rng, f, upper):
            tele.reject("f")
            raise _Restart
        return counting.pick_uniform_move(state, tau, rng, self.config.proposal_budget)

    def _b(self, state, alpha, engine):
        if alpha == "easy":
            return engine.b_easy(state)
        return engine.b_class(state, alpha, reachable=self.reachable)

    def _run_easy(self, rng, tele):
        b = self.bounds
        while True:
            self._restarts(tele)
            state, engine = self._begin(rng, tele)
            try:
                for _ in range(self.step_budget):
                    i = state.stratum
                    if i == 0:
                        return state
                    mv = self._forward(state, "3edge", i, b.easy_upper.get(i, 0), engine, rng, tele)
                    self._apply(state, mv, engine)
                    tele.steps += 1
                    tele.moves["3edge"] += 1
                    self._b_reject(b.easy_lower.get(i - 1, 0), self._b(state, "easy", engine),
                                   f"easy lower bound at stratum {i - 1}", rng, tele)
                raise BudgetExhausted(f"step budget {self.step_budget} exhausted")
            except _Restart:
                continue

    def _run_uniform(self, rng, tele):
        b = self.bounds
        while True:
            self._restarts(tele)
            state, engine = self._begin(rng, tele)
            try:
                for _ in range(self.step_budget):
                    i = state.stratum
                    tau = self.choose_type(i, rng)
                    if tau is None:
                        tele.reject("t")
                        raise _Restart
                    if i == 0 and tau == "I":
                        return state
                    mv = self._forward(state, tau, i, b.m_bar(tau, i), engine, rng, tele)
                    self._apply(state, mv, engine)
                    tele.steps += 1
                    tele.moves[tau] += 1
                    tele.classes[mv.cls] += 1
                    j = mv.target
                    if base_type(tau) in ("IIb", "IIc"):
                        self._b_reject(b.m_hat(tau, j), counting.bhat(state, mv.v, tau),
                                       f"gadget lower bound for {tau} at stratum {j}", rng, tele, "pre_b")
                    self._b_reject(b.m_low(mv.cls, j), self._b(state, mv.cls, engine),
                                   f"lower bound for class {mv.cls} at stratum {j}", rng, tele)
                raise BudgetExhausted(f"step budget {self.step_budget} exhausted")
            except _Restart:
                continue

    def _run_approx(self, rng, tele):
        while True:
            self._restarts(tele)
            state, draws = draw_initial(self.instance, self.i1, rng, self.config.restart_budget)
            tele.initial_draws += draws
            try:
                for _ in range(self.step_budget):
                    if state.stratum == 0:
                        return state
                    mv = self._approx_move(state, rng)
                    if mv is None:
                        # no valid move found within the proposal budget; start over
                        tele.stuck += 1
                        tele.restarts += 1
                        raise _Restart
                    apply_move(state, mv)
                    tele.steps += 1
                    tele.moves["I"] += 1
                    tele.classes[mv.cls] += 1
                raise BudgetExhausted(f"step budget {self.step_budget} exhausted")
            except _Restart:
                continue

    def _approx_move(self, state, rng):
        for _ in range(self.config.proposal_budget):
            prop = counting.propose(state, "I", rng)
            if prop is not None:
                mv = make_move(state, "I", prop[0])
                if mv is not None:
                    return mv
        return None


# ----- module-level entry points -------------------------------------------------

def _config(config, algorithm):
    if config is None:
        return SamplerConfig(algorithm=algorithm)
    if config.algorithm != algorithm:
        from dataclasses import replace
        return replace(config, algorithm=algorithm)
    return config


def factor_easy(instance, config=None, rng=None, **kw):
    return Sampler(instance, _config(config, "easy"), **kw).run(rng)


def factor_uniform(instance, config=None, rng=None, **kw):
    return Sampler(instance, _config(config, "uniform"), **kw).run(rng)


def factor_approx(instance, config=None, rng=None, **kw):
    return Sampler(instance, _config(config, "approx"), **kw).run(rng)


def _run_chunk(args):
    sampler, seed, stream, ks = args
    base = RngStream(seed, stream)
    out, tele = [], RunTelemetry()
    for k in ks:
        s, t = sampler.run(base.child(k))
        out.append(s.key())
        tele.merge(t)
    return out, tele


def sample_many(instance, config=None, count: int = 1, rng=None, sampler: Sampler | None = None,
                jobs: int = 1, keys_only: bool = False):
    """``count`` independent samples; sample ``k`` uses stream ``rng.child(k)``.

    Returns the samples (states, or edge keys with ``keys_only``) and the
    summed telemetry.  The result does not depend on ``jobs``.
    """
    sampler = sampler or Sampler(instance, config)
    base = as_stream(sampler.config.seed if rng is None else rng)
    total = RunTelemetry()
    if count <= 0:
        return [], total
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        chunks = [list(range(j, count, jobs)) for j in range(jobs)]
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_run_chunk, [(sampler, base.seed, base.stream, c) for c in chunks]))
        keys = [None] * count
        for c, (out, tele) in zip(chunks, parts):
            for k, key in zip(c, out):
                keys[k] = key
            total.merge(tele)
        if keys_only:
            return keys, total
        return [ColoredState.from_edges(instance, k) for k in keys], total
    out = []
    for k in range(count):
        s, t = sampler.run(base.child(k))
        out.append(s.key() if keys_only else s)
        total.merge(t)
    return out, total


# ----- exact per-graph transition weights (used by the oracle) -------------------------

def rejection_weights_easy(state: ColoredState, bounds: BoundTable):
    """Probability of moving to each graph without rejection, and of outputting, from ``state``."""
    i = state.stratum
    if i == 0:
        return {}, 1.0
    up = bounds.easy_upper.get(i, 0)
    low = bounds.easy_lower.get(i - 1, 0)
    out = Counter()
    for mv in counting.enumerate_moves(state, "3edge"):
        g2 = apply_move(state.copy(), mv)
        out[g2.key()] += Fraction(1) / up * Fraction(low) / counting.b_easy(g2)
    return {k: float(v) for k, v in out.items()}, 0.0


def rejection_weights_uniform(state: ColoredState, bounds: BoundTable, params: ParameterTable):
    i = state.stratum
    reach = bounds.reachable_b1
    out = Counter()
    stop = 0.0
    for tau in TYPES:
        rho = params.rho_of(tau, i)
        if not rho:
            continue
        if i == 0 and tau == "I":
            stop = float(rho)
            continue
        up = bounds.m_bar(tau, i)
        for mv in counting.enumerate_moves(state, tau):
            g2 = apply_move(state.copy(), mv)
            w = rho / Fraction(up)
            if base_type(tau) in ("IIb", "IIc"):
                w *= Fraction(bounds.m_hat(tau, mv.target)) / counting.bhat(g2, mv.v, tau)
            eng = counting.FixedEngine(g2)
            w *= Fraction(bounds.m_low(mv.cls, mv.target)) / eng.b_class(g2, mv.cls, reachable=reach)
            out[g2.key()] += w
    return {k: float(v) for k, v in out.items()}, stop


def step_probabilities(sampler: Sampler, state: ColoredState, tau: str) -> dict:
    """Exact probability that one step from ``state`` chooses ``tau`` and performs each move.

    Follows the two-stage scheme the sampler implements: a literal proposal
    when the bound equals the proposal-space size, otherwise an
    f-rejection with probability ``1 - f/m_bar`` followed by a uniform
    valid move.
    """
    i = state.stratum
    rho = Fraction(1) if tau == "3edge" else sampler.params.rho_of(tau, i)
    if tau == "3edge":
        up = sampler.bounds.easy_upper.get(i, 0)
        lit = sampler.bounds.literal("3edge", i)
    else:
        up = sampler.bounds.m_bar(tau, i)
        lit = sampler.bounds.literal(tau, i)
    moves = counting.enumerate_moves(state, tau)
    if not moves or not up:
        return {}
    if lit:
        per = rho / Fraction(counting.tuple_space_size(state.instance, tau, i))
    else:
        per = rho * Fraction(len(moves)) / Fraction(up) / len(moves)
    return {mv: per for mv in moves}
