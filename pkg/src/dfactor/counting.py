"""Exact counts of forward switchings and inverse configurations.

Counting walks a pattern's vertex cycle depth-first.  Sparse steps (edges of
``G``, red pairs) iterate adjacency lists; a step across a black non-edge
iterates all vertices.  When the last two vertices are a black non-edge, an
edge and a black non-edge back to the start, they are counted in one go by
inclusion-exclusion over the small sets of forbidden endpoints.

Two engines share that walk.  ``NaiveEngine`` rebuilds its tables from the
state on every query and evaluates the inclusion-exclusion directly from the
adjacency.  ``CachedEngine`` keeps the tables and a :class:`StructureCache`
of coloured path counts up to date under toggles and reads the
inclusion-exclusion terms from the cache.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from . import kernels
from .errors import NoValidMove, WrongVariant
from .graph_core import ColoredState, HostInstance
from .switchings import (
    B1_VARIANT, BE, BN, CLASS_SHIFT, TYPE_SHIFT, GADGET_PAIRS, IIA, IIB_CTX, IIC_CTX, III, INV_A, INV_B2, INV_C,
    MINUS, RE, RN, THREE_FWD, THREE_INV, TYPE_I_CLASS, Pattern, SwitchMove, base_type,
    b1_octagon_variant, classify_typeI, make_move, orientation_of, to_plus,
)

E_MODE, R_MODE, D_MODE = 0, 1, 2
DENSE_LIMIT = 4096


# ----- plans -----------------------------------------------------------------

def _mode(mask: int) -> int:
    if not mask & (BN | RN):
        return E_MODE
    if not mask & (BN | BE):
        return R_MODE
    return D_MODE


def _plan_for(pattern: Pattern, s: int, direction: int, tail_ok: bool):
    k = pattern.k
    order = [(s + direction * t) % k for t in range(k)]

    def pair_mask(a, b):
        if (a + 1) % k == b:
            return pattern.cons[a]
        return pattern.cons[b]

    mask = [0] + [pair_mask(order[t - 1], order[t]) for t in range(1, k)]
    closemask = pair_mask(order[k - 1], order[0])
    mode = [D_MODE] + [_mode(m) for m in mask[1:]]
    pos = {p: t for t, p in enumerate(order)}
    allow = [0] * k
    for a, b in pattern.allow:
        ta, tb = pos[a], pos[b]
        if ta > tb:
            ta, tb = tb, ta
        allow[tb] |= 1 << ta
    tail = (tail_ok and k >= 4 and mode[k - 2] == D_MODE and mask[k - 2] == BN
            and mode[k - 1] == E_MODE and closemask == BN)
    return (k, tuple(order), tuple(mode), tuple(mask), tuple(allow), closemask, int(tail))


def _plan_cost(plan, n: int, d: int, delta: int) -> float:
    k, _, mode, mask, _, _, tail = plan
    cost = float(n)
    work = cost
    last = k - 2 if tail else k
    for t in range(1, last):
        if mask[t] == RE:
            f = 0.5
        elif mode[t] == E_MODE:
            f = d
        elif mode[t] == R_MODE:
            f = max(delta, 1)
        else:
            f = n
        cost *= f
        work += cost
    if tail:
        work += cost * (d + delta + k) * d
    return work


@lru_cache(maxsize=None)
def compile_plan(pattern: Pattern, n: int, d: int, delta: int, tail_ok: bool = True):
    best = None
    for s in range(pattern.k):
        for direction in (1, -1):
            plan = _plan_for(pattern, s, direction, tail_ok)
            c = _plan_cost(plan, n, d, delta)
            if best is None or c < best[0]:
                best = (c, plan)
    return best[1]


# ----- frames ------------------------------------------------------------------

@lru_cache(maxsize=8)
def _base_table(instance: HostInstance) -> bytes:
    n = instance.n
    base = np.full((n, n), BN, dtype=np.uint8)
    for u, v in instance.forbidden_edges:
        base[u, v] = base[v, u] = RN
    np.fill_diagonal(base, 0)
    return base.tobytes()


@lru_cache(maxsize=8)
def _red_csr(instance: HostInstance):
    n = instance.n
    ptr = np.zeros(n + 1, dtype=np.int32)
    idx = []
    for x in range(n):
        nb = sorted(instance.red_adj[x])
        idx.extend(nb)
        ptr[x + 1] = ptr[x] + len(nb)
    return ptr, np.asarray(idx, dtype=np.int32)


class Frame:
    """Array view of a state: pair-state table, CSR adjacency and coloured degrees."""

    def __init__(self, state: ColoredState):
        inst = state.instance
        n = inst.n
        if n > DENSE_LIMIT:
            raise ValueError(f"counting tables need n <= {DENSE_LIMIT}, got {n}")
        self.instance = inst
        self.n = n
        self.S = bytearray(_base_table(inst))
        self.Snp = np.frombuffer(self.S, dtype=np.uint8)
        self.rptr, self.ridx = _red_csr(inst)
        self.adj = [set(a) for a in state.adj]
        S = self.S
        for u in range(n):
            base = u * n
            for v in self.adj[u]:
                S[base + v] <<= 1
        self.degBE = np.zeros(n, dtype=np.int64)
        self.degRE = np.zeros(n, dtype=np.int64)
        red = inst.red_adj
        for u in range(n):
            r = sum(1 for v in self.adj[u] if v in red[u])
            self.degRE[u] = r
            self.degBE[u] = len(self.adj[u]) - r
        self._csr = None
        self._py = None

    def toggle(self, remove, add) -> None:
        n, S = self.n, self.S
        red = self.instance.red_adj
        for u, v in remove:
            self.adj[u].discard(v)
            self.adj[v].discard(u)
            S[u * n + v] >>= 1
            S[v * n + u] >>= 1
            deg = self.degRE if v in red[u] else self.degBE
            deg[u] -= 1
            deg[v] -= 1
        for u, v in add:
            self.adj[u].add(v)
            self.adj[v].add(u)
            S[u * n + v] <<= 1
            S[v * n + u] <<= 1
            deg = self.degRE if v in red[u] else self.degBE
            deg[u] += 1
            deg[v] += 1
        self._csr = None
        self._py = None

    def csr(self):
        if self._csr is None:
            n = self.n
            ptr = np.zeros(n + 1, dtype=np.int32)
            idx = []
            for x in range(n):
                nb = sorted(self.adj[x])
                idx.extend(nb)
                ptr[x + 1] = ptr[x] + len(nb)
            self._csr = (ptr, np.asarray(idx, dtype=np.int32))
        return self._csr

    def deg_for(self, mask: int):
        if mask == BE:
            return self.degBE
        if mask == RE:
            return self.degRE
        return self.degBE + self.degRE


# ----- structure cache ---------------------------------------------------------

class StructureCache:
    """Coloured path counts in the augmented graph (``G`` plus red non-edges).

    ``near`` is the 0/1 matrix of pairs that are a vertex with itself, an edge
    of ``G`` or a red pair.  For each edge colour ``M`` the cache records
    ``paths[M][u, w]``, the number of ordered ``M``-coloured edges ``(x, y)``
    with ``x`` near ``u`` and ``y`` near ``w`` (3-paths of type near-edge-near),
    and ``ends[M][u]``, the number of ``M``-coloured edge ends near ``u``.
    """

    def __init__(self, frame: Frame):
        self.frame = frame
        self.rebuild()

    @staticmethod
    def _matrices(frame: Frame):
        n = frame.n
        Sm = frame.Snp.reshape(n, n)
        near = ((Sm != BN) | np.eye(n, dtype=bool)).astype(np.int64)
        a_be = (Sm == BE).astype(np.int64)
        a_re = (Sm == RE).astype(np.int64)
        return near, a_be, a_re

    def rebuild(self) -> None:
        near, a_be, a_re = self._matrices(self.frame)
        self.near = near
        self.A = {BE: a_be, RE: a_re}
        self.paths = {m: near @ a @ near for m, a in self.A.items()}
        self.ends = {m: near @ a.sum(axis=1) for m, a in self.A.items()}

    def update(self, remove, add) -> None:
        """Apply toggles that the frame has already absorbed."""
        inst = self.frame.instance
        for pairs, sign in ((remove, -1), (add, 1)):
            for u, v in pairs:
                if inst.is_red(u, v):
                    self._red_toggle(u, v, sign)
                else:
                    self._black_toggle(u, v, sign)

    def _red_toggle(self, u, v, sign) -> None:
        near = self.near
        A = self.A[RE]
        P = self.paths[RE]
        nu = np.flatnonzero(near[:, u])
        nv = np.flatnonzero(near[:, v])
        P[np.ix_(nu, nv)] += sign
        P[np.ix_(nv, nu)] += sign
        A[u, v] += sign
        A[v, u] += sign
        ends = self.ends[RE]
        ends[nu] += sign
        ends[nv] += sign

    def _black_toggle(self, u, v, sign) -> None:
        near = self.near
        # paths[RE]: A fixed, near changes by D
        A = self.A[RE]
        P = self.paths[RE]
        self._near_change(P, A, u, v, sign, edge_too=False)
        # paths[BE]: both A and near change by D
        A = self.A[BE]
        P = self.paths[BE]
        self._near_change(P, A, u, v, sign, edge_too=True)
        near[u, v] += sign
        near[v, u] += sign
        for m, a in self.A.items():
            self.ends[m] = near @ a.sum(axis=1)

    def _near_change(self, P, A, u, v, sign, edge_too: bool) -> None:
        near = self.near
        # (B+D)(A+DA)(B+D) - BAB = BA D + B DA (B+D) + D (A+DA)(B+D)
        BA = near @ A[:, [u, v]]
        P[:, v] += sign * BA[:, 0]
        P[:, u] += sign * BA[:, 1]
        if edge_too:
            A[u, v] += sign
            A[v, u] += sign
        Bn = near.copy()
        Bn[u, v] += sign
        Bn[v, u] += sign
        if edge_too:
            P += sign * (np.outer(near[:, u], Bn[v, :]) + np.outer(near[:, v], Bn[u, :]))
        row_v = A[v, :] @ Bn
        row_u = A[u, :] @ Bn
        P[u, :] += sign * row_v
        P[v, :] += sign * row_u

    def matches_recount(self) -> bool:
        near, a_be, a_re = self._matrices(self.frame)
        fresh = {BE: near @ a_be @ near, RE: near @ a_re @ near}
        if not np.array_equal(near, self.near):
            return False
        for m in (BE, RE):
            if not np.array_equal(fresh[m], self.paths[m]):
                return False
            if not np.array_equal(near @ self.A[m].sum(axis=1), self.ends[m]):
                return False
        return True

    def tables(self, mask: int):
        if mask == BE or mask == RE:
            return self.paths[mask], self.ends[mask]
        return self.paths[BE] + self.paths[RE], self.ends[BE] + self.ends[RE]


# ----- engines -------------------------------------------------------------------

class _Engine:
    name = "base"

    def frame(self, state: ColoredState) -> Frame:
        raise NotImplementedError

    def _tail_tables(self, frame: Frame, mask: int):
        return None

    def count(self, state: ColoredState, pattern: Pattern) -> int:
        fr = self.frame(state)
        inst = state.instance
        plan = compile_plan(pattern, inst.n, inst.d, inst.delta)
        tail_mask = plan[3][plan[0] - 1]
        degM = fr.deg_for(tail_mask)
        totM = int(degM.sum())
        gptr, gidx = fr.csr()
        return kernels.count_plan(fr, gptr, gidx, degM, totM, plan, self._tail_tables(fr, tail_mask))

    # ----- forward counts -----
    def f_easy(self, state: ColoredState) -> int:
        return self.count(state, THREE_FWD) if state.stratum else 0

    def b_easy(self, state: ColoredState) -> int:
        return self.count(state, THREE_INV) if state.instance.m_red_total else 0

    def f_I_by_class(self, state: ColoredState) -> dict:
        if state.stratum == 0:
            return {c: 0 for c in TYPE_I_CLASS}
        return {c: self.count(state, p) for c, p in TYPE_I_CLASS.items()}

    def f_type(self, state: ColoredState, tau: str) -> int:
        t = base_type(tau)
        if t == "I":
            return sum(self.f_I_by_class(state).values())
        if state.instance.m_red_total == 0:
            return 0
        if t == "IIa":
            return self.count(state, IIA) if state.stratum else 0
        if t == "III":
            return self.count(state, III)
        return gadget_forward_total(state, t)

    # ----- inverse counts -----
    def b1_by_variant(self, state: ColoredState) -> dict:
        if state.stratum == 0:
            return {v: 0 for v in B1_VARIANT}
        return {v: self.count(state, p) for v, p in B1_VARIANT.items()}

    def b1_reachable(self, state: ColoredState) -> int:
        """B1 octagons that some forward move can create.

        Octagons of the two gadget variants count only when at least one
        gadget completion exists around them.
        """
        by = self.b1_by_variant(state)
        total = by["I"] + by["IIa"]
        for kind in ("IIb", "IIc"):
            if by[kind]:
                total += sum(1 for w in enumerate_pattern(state, B1_VARIANT[kind])
                             if bhat(state, w, kind + "+") > 0)
        return total

    def b_class(self, state: ColoredState, alpha: str, reachable: bool = False) -> int:
        if state.instance.m_red_total == 0:
            return 0
        a = alpha.rstrip("+-")
        if a == "A":
            return self.count(state, INV_A)
        if a == "B1":
            if reachable:
                return self.b1_reachable(state)
            return sum(self.b1_by_variant(state).values())
        if a == "B2":
            return self.count(state, INV_B2)
        if a == "C":
            inv = self.count(state, INV_C) if state.stratum else 0
            return inv + self.count(state, III)
        raise ValueError(f"unknown class {alpha!r}")


class NaiveEngine(_Engine):
    """Rebuilds its tables on every query."""

    name = "naive"

    def frame(self, state: ColoredState) -> Frame:
        return Frame(state)


class CachedEngine(_Engine):
    """Follows one trajectory; call :meth:`toggle` alongside every edit of the state."""

    name = "cached"

    def __init__(self, state: ColoredState):
        self._frame = Frame(state)
        self.cache = StructureCache(self._frame)

    def frame(self, state: ColoredState) -> Frame:
        return self._frame

    def toggle(self, remove, add) -> None:
        remove = [tuple(p) for p in remove]
        add = [tuple(p) for p in add]
        self._frame.toggle(remove, add)
        self.cache.update(remove, add)

    def _tail_tables(self, frame: Frame, mask: int):
        return self.cache.tables(mask)


class FixedEngine(_Engine):
    """Answers many queries about one state that will not change."""

    name = "fixed"

    def __init__(self, state: ColoredState):
        self._frame = Frame(state)

    def frame(self, state: ColoredState) -> Frame:
        return self._frame


def make_engine(kind: str, state: ColoredState | None = None):
    if kind == "naive":
        return NaiveEngine()
    if kind == "cached":
        return CachedEngine(state)
    raise ValueError(f"unknown engine {kind!r}")


_DEFAULT = NaiveEngine()


def f_easy(state: ColoredState) -> int:
    return _DEFAULT.f_easy(state)


def b_easy(state: ColoredState) -> int:
    return _DEFAULT.b_easy(state)


def f_type(state: ColoredState, tau: str) -> int:
    return _DEFAULT.f_type(state, tau)


def b_class(state: ColoredState, alpha: str) -> int:
    return _DEFAULT.b_class(state, alpha)


# ----- explicit enumeration ----------------------------------------------------

def enumerate_pattern(state: ColoredState, pattern: Pattern, fixed: dict | None = None,
                      avoid=frozenset()):
    """Yield every tuple matching ``pattern`` (plain depth-first search)."""
    inst = state.instance
    n = inst.n
    k = pattern.k
    plan = compile_plan(pattern, n, inst.d, inst.delta, tail_ok=False)
    _, order, mode, mask, allow, closemask, _ = plan
    adj = state.adj
    red = inst.red_adj
    fixed = fixed or {}
    sb = _state_bit_fn(state)
    v = [0] * k
    every = range(n)

    def rec(t):
        pos = order[t]
        if pos in fixed:
            cands = (fixed[pos],)
        elif t == 0:
            cands = every
        else:
            md = mode[t]
            prev = v[t - 1]
            cands = sorted(adj[prev]) if md == E_MODE else sorted(red[prev]) if md == R_MODE else every
        for c in cands:
            if c in avoid and pos not in fixed:
                continue
            if t:
                if c == v[t - 1] or not sb(v[t - 1], c) & mask[t]:
                    continue
                bad = False
                for tt in range(t):
                    if v[tt] == c and not (allow[t] >> tt) & 1:
                        bad = True
                        break
                if bad:
                    continue
            if t == k - 1:
                if c != v[0] and sb(c, v[0]) & closemask:
                    v[t] = c
                    out = [0] * k
                    for tt in range(k):
                        out[order[tt]] = v[tt]
                    yield tuple(out)
                continue
            v[t] = c
            yield from rec(t + 1)

    yield from rec(0)


def _state_bit_fn(state: ColoredState):
    adj = state.adj
    red = state.instance.red_adj

    def sb(u, v):
        if v in red[u]:
            return RE if v in adj[u] else RN
        return BE if v in adj[u] else BN

    return sb


# ----- gadgets ----------------------------------------------------------------

def gadget_list(state: ColoredState, a: int, b: int, avoid, inverse: bool = False) -> list:
    """All ``(y1, y2, y3, y4)`` completing a gadget on the pair ``(a, b)``."""
    adj = state.adj
    sb = _state_bit_fn(state)
    black_edges = [(x, y) for x in range(state.n) for y in sorted(adj[x]) if sb(x, y) == BE]
    out = []
    if not inverse:
        for y1 in sorted(adj[a]):
            if y1 in avoid or sb(a, y1) != BE:
                continue
            for y3 in sorted(adj[b]):
                if y3 in avoid or y3 == y1 or sb(b, y3) != BE:
                    continue
                for y2, y4 in black_edges:
                    if y2 in avoid or y4 in avoid or y2 in (y1, y3) or y4 in (y1, y3):
                        continue
                    if sb(y1, y2) == BN and sb(y4, y3) == BN:
                        out.append((y1, y2, y3, y4))
    else:
        for y1, y2 in black_edges:
            if y1 in avoid or y2 in avoid or sb(a, y1) != BN:
                continue
            for y4, y3 in black_edges:
                if y4 in avoid or y3 in avoid or y4 in (y1, y2) or y3 in (y1, y2):
                    continue
                if sb(y2, y4) == BN and sb(y3, b) == BN:
                    out.append((y1, y2, y3, y4))
    return out


def _subset_counts(lst):
    counts = {}
    for g in lst:
        g = tuple(sorted(g))
        for r in range(1, len(g) + 1):
            for mask in range(1, 1 << len(g)):
                if bin(mask).count("1") != r:
                    continue
                key = tuple(g[j] for j in range(len(g)) if mask >> j & 1)
                counts[key] = counts.get(key, 0) + 1
    return counts


def count_disjoint(lists) -> int:
    """Number of choices, one item per list, that are pairwise vertex-disjoint."""
    if not lists:
        return 1
    if len(lists) == 1:
        return len(lists[0])
    if len(lists) == 2:
        l1, l2 = lists
        if not l1 or not l2:
            return 0
        cnt = _subset_counts(l2)
        total = 0
        for g in l1:
            g = tuple(sorted(g))
            overlap = 0
            for mask in range(1, 1 << len(g)):
                key = tuple(g[j] for j in range(len(g)) if mask >> j & 1)
                sign = 1 if bin(mask).count("1") % 2 else -1
                overlap += sign * cnt.get(key, 0)
            total += len(l2) - overlap
        return total
    head, rest = lists[0], lists[1:]
    total = 0
    for g in head:
        gs = set(g)
        total += count_disjoint([[h for h in lst if gs.isdisjoint(h)] for lst in rest])
    return total


def _gadget_lists(state: ColoredState, kind: str, w, inverse: bool):
    avoid = frozenset(w)
    return [gadget_list(state, w[a], w[b], avoid, inverse) for a, b in GADGET_PAIRS[kind]]


def gadget_completions(state: ColoredState, kind: str, w) -> int:
    return count_disjoint(_gadget_lists(state, kind, w, inverse=False))


def gadget_forward_total(state: ColoredState, kind: str) -> int:
    ctx = IIB_CTX if kind == "IIb" else IIC_CTX
    need = 16 if kind == "IIb" else 19
    if state.n < need - 1:
        return 0
    return sum(gadget_completions(state, kind, w) for w in enumerate_pattern(state, ctx))


def bhat(state: ColoredState, octagon, tau: str) -> int:
    """Gadget sequences completing an inverse ``tau`` configuration on ``octagon``."""
    kind = base_type(tau)
    if kind not in ("IIb", "IIc"):
        raise ValueError("gadget counts exist only for IIb and IIc")
    o = orientation_of(tau)
    if b1_octagon_variant(state, octagon, o) != kind:
        raise WrongVariant(f"octagon is not a {kind} variant")
    w = to_plus(octagon, o)
    return count_disjoint(_gadget_lists(state, kind, w, inverse=True))


def enumerate_gadget_sequences(state: ColoredState, kind: str, w, inverse: bool = False):
    lists = _gadget_lists(state, kind, w, inverse)
    for combo in product(*lists):
        flat = [y for g in combo for y in g]
        if len(set(flat)) == len(flat):
            yield tuple(flat)


# ----- moves -------------------------------------------------------------------

def enumerate_moves(state: ColoredState, tau: str) -> list:
    """Every valid forward move of type ``tau`` from ``state``."""
    i = state.stratum
    if tau == "3edge":
        return [SwitchMove("3edge", v, "easy", i, i - 1) for v in enumerate_pattern(state, THREE_FWD)]
    t, o = base_type(tau), orientation_of(tau)
    if t == "I":
        out = []
        for cls, pat in TYPE_I_CLASS.items():
            out.extend(SwitchMove("I", v, cls, i, i + CLASS_SHIFT[cls])
                       for v in enumerate_pattern(state, pat))
        return out
    if state.instance.m_red_total == 0:
        return []

    def outward(w):
        return w if o == "+" else tuple(w[p] for p in MINUS)

    cls = ("C" if t == "III" else "B1") + o
    shift = TYPE_SHIFT[t]
    if t in ("IIa", "III"):
        pat = IIA if t == "IIa" else III
        return [SwitchMove(tau, outward(w), cls, i, i + shift) for w in enumerate_pattern(state, pat)]
    ctx = IIB_CTX if t == "IIb" else IIC_CTX
    out = []
    for w in enumerate_pattern(state, ctx):
        for y in enumerate_gadget_sequences(state, t, w):
            out.append(SwitchMove(tau, outward(w), cls, i, i + shift, y))
    return out


def tuple_space_size(instance: HostInstance, tau: str, i: int) -> int:
    """Size of the slot space that :func:`propose` draws from."""
    n, d, delta = instance.n, instance.d, instance.delta
    t = base_type(tau)
    if tau == "3edge":
        return 2 * i * (d * n) ** 2
    if t == "I":
        return 2 * i * (d * n) ** 3
    if t == "IIa":
        return 2 * i * delta ** 2 * d ** 3 * n
    if t == "III":
        return delta ** 3 * d ** 3 * n ** 2
    if t == "IIb":
        return delta ** 2 * d ** 9 * n ** 5
    if t == "IIc":
        return delta ** 3 * d ** 11 * n ** 6
    raise ValueError(tau)


class _Slots:
    """Uniform slot draws over adjacency lists of a state."""

    def __init__(self, state: ColoredState, rng):
        self.state = state
        self.rnd = rng.py
        self.d = state.instance.d
        self.delta = state.instance.delta
        self.n = state.n

    def nbr(self, x):
        a = self.state.adj[x]
        j = self.rnd.randrange(self.d)
        if j >= len(a):
            return None
        return sorted(a)[j]

    def red(self, x):
        r = self.state.instance.red_adj[x]
        j = self.rnd.randrange(self.delta) if self.delta else 0
        if j >= len(r):
            return None
        return sorted(r)[j]

    def edge(self):
        x = self.rnd.randrange(self.n)
        y = self.nbr(x)
        return None if y is None else (x, y)

    def red_edge(self):
        red = sorted(self.state.red_edges)
        if not red:
            return None
        u, v = red[self.rnd.randrange(len(red))]
        return (u, v) if self.rnd.randrange(2) == 0 else (v, u)

    def vertex(self):
        return self.rnd.randrange(self.n)


def propose(state: ColoredState, tau: str, rng):
    """One uniform draw from the slot space of ``tau``.

    Returns ``(octagon_or_tuple, gadget)`` in the move's own labelling, or
    ``None`` when the draw hits an empty slot.  Validity is not checked.
    """
    sl = _Slots(state, rng)
    t, o = base_type(tau), orientation_of(tau)
    if tau == "3edge" or t == "I":
        e0 = sl.red_edge()
        if e0 is None:
            return None
        es = [sl.edge() for _ in range(2 if tau == "3edge" else 3)]
        if any(e is None for e in es):
            return None
        return (e0 + tuple(x for e in es for x in e)), ()
    if t in ("IIa", "III"):
        if t == "IIa":
            e0 = sl.red_edge()
            if e0 is None:
                return None
            v0, v1 = e0
        else:
            v1 = sl.vertex()
            v0 = sl.red(v1)
        v2 = sl.red(v1) if v1 is not None else None
        v7 = sl.red(v0) if v0 is not None else None
        if None in (v0, v1, v2, v7):
            return None
        v3 = sl.nbr(v2)
        v6 = sl.nbr(v7)
        e = sl.edge()
        if v3 is None or v6 is None or e is None:
            return None
        w = (v0, v1, v2, v3, e[0], e[1], v6, v7)
        return (w if o == "+" else tuple(w[p] for p in MINUS)), ()
    # IIb / IIc
    v1 = sl.vertex()
    v0 = sl.red(v1)
    v2 = sl.red(v1)
    if v0 is None or v2 is None:
        return None
    v7 = sl.nbr(v0) if t == "IIb" else sl.red(v0)
    e34 = sl.edge()
    e56 = sl.edge()
    if v7 is None or e34 is None or e56 is None:
        return None
    w = (v0, v1, v2, e34[0], e34[1], e56[0], e56[1], v7)
    ys = []
    for a, b in GADGET_PAIRS[t]:
        y1 = sl.nbr(w[a])
        e = sl.edge()
        y3 = sl.nbr(w[b])
        if y1 is None or e is None or y3 is None:
            return None
        ys.extend((y1, e[0], y3, e[1]))
    return (w if o == "+" else tuple(w[p] for p in MINUS)), tuple(ys)


def pick_uniform_move(state: ColoredState, tau: str, rng, max_draws: int = 10_000_000) -> SwitchMove:
    """A move drawn uniformly from all valid type-``tau`` moves (rejection from the slot space)."""
    for _ in range(max_draws):
        prop = propose(state, tau, rng)
        if prop is None:
            continue
        mv = make_move(state, tau, prop[0], prop[1])
        if mv is not None:
            return mv
    raise NoValidMove(f"no valid {tau} move found in {max_draws} draws")


def typeI_class(state: ColoredState, v):
    return classify_typeI(state, v)
