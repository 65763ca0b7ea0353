"""Problem description and the mutable coloured-graph state.

Vertices are ``0..n-1``; every unordered pair is stored as ``(min, max)``.
A pair is *red* when it is forbidden and *black* otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import (
    DegreeBroken,
    DegreeOutOfRange,
    EdgeMissing,
    EdgePresent,
    InvalidInstance,
    InvalidMove,
    OddProduct,
)

BLACK = "black"
RED = "red"


def canon(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class HostInstance:
    """Immutable instance: ``n`` vertices, target degree ``d`` and the forbidden pairs."""

    n: int
    d: int
    forbidden_edges: frozenset
    red_adj: tuple = field(repr=False)
    duplicates: int = 0

    @property
    def delta(self) -> int:
        return max((len(r) for r in self.red_adj), default=0)

    @property
    def m_red_total(self) -> int:
        return len(self.forbidden_edges)

    @property
    def regular_complement(self) -> bool:
        delta = self.delta
        return all(len(r) == delta for r in self.red_adj)

    def is_red(self, u: int, v: int) -> bool:
        return v in self.red_adj[u]

    def color(self, u: int, v: int) -> str:
        if u == v:
            raise ValueError("a pair needs two distinct vertices")
        return RED if v in self.red_adj[u] else BLACK

    def host_degree(self, v: int) -> int:
        return self.n - 1 - len(self.red_adj[v])

    def __eq__(self, other):
        if not isinstance(other, HostInstance):
            return NotImplemented
        return (self.n, self.d, self.forbidden_edges) == (other.n, other.d, other.forbidden_edges)

    def __hash__(self):
        return hash((self.n, self.d, self.forbidden_edges))

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "forbidden": [list(e) for e in sorted(self.forbidden_edges)]}


def load_instance(n: int, d: int, forbidden: Iterable = ()) -> HostInstance:
    n, d = int(n), int(d)
    if n < 1:
        raise InvalidInstance(f"n must be positive, got {n}")
    if d < 1 or d >= n:
        raise DegreeOutOfRange(f"need 1 <= d <= n-1, got d={d}, n={n}")
    if (d * n) % 2:
        raise OddProduct(f"d*n = {d * n} is odd")
    pairs = set()
    seen = 0
    for item in forbidden:
        u, v = (int(x) for x in item)
        if u == v:
            raise InvalidInstance(f"loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidInstance(f"pair ({u}, {v}) out of range for n={n}")
        pairs.add(canon(u, v))
        seen += 1
    red_adj = [set() for _ in range(n)]
    for u, v in pairs:
        red_adj[u].add(v)
        red_adj[v].add(u)
    return HostInstance(
        n=n,
        d=d,
        forbidden_edges=frozenset(pairs),
        red_adj=tuple(frozenset(r) for r in red_adj),
        duplicates=seen - len(pairs),
    )


def instance_from_json(obj: dict) -> HostInstance:
    try:
        return load_instance(obj["n"], obj["d"], obj.get("forbidden", []))
    except KeyError as exc:
        raise InvalidInstance(f"instance JSON lacks field {exc}") from None


class ColoredState:
    """A graph ``G`` on the instance's vertex set with its red edges tracked."""

    __slots__ = ("instance", "adj", "red_edges")

    def __init__(self, instance: HostInstance, adj, red_edges):
        self.instance = instance
        self.adj = adj
        self.red_edges = red_edges

    @classmethod
    def from_edges(cls, instance: HostInstance, edges: Iterable) -> "ColoredState":
        adj = [set() for _ in range(instance.n)]
        red = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v or v in adj[u]:
                raise InvalidInstance(f"edge ({u}, {v}) is a loop or repeated")
            adj[u].add(v)
            adj[v].add(u)
            if instance.is_red(u, v):
                red.add(canon(u, v))
        return cls(instance, adj, red)

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def stratum(self) -> int:
        return len(self.red_edges)

    def copy(self) -> "ColoredState":
        return ColoredState(self.instance, [set(a) for a in self.adj], set(self.red_edges))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def is_red(self, u: int, v: int) -> bool:
        return self.instance.is_red(u, v)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    def key(self) -> tuple:
        """Canonical encoding: the sorted edge list."""
        return tuple(self.edges())

    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def toggle(self, remove=(), add=(), check_degrees: bool = False) -> None:
        """Edit in place: delete the pairs in ``remove``, insert those in ``add``."""
        remove = [canon(*p) for p in remove]
        add = [canon(*p) for p in add]
        if set(remove) & set(add):
            raise InvalidMove("a pair cannot be both removed and added")
        adj = self.adj
        for u, v in remove:
            if v not in adj[u]:
                raise EdgeMissing((u, v))
        done = []
        for u, v in remove:
            adj[u].discard(v)
            adj[v].discard(u)
            done.append((u, v))
        for j, (u, v) in enumerate(add):
            if v in adj[u]:
                for a, b in add[:j]:
                    adj[a].discard(b)
                    adj[b].discard(a)
                for a, b in done:
                    adj[a].add(b)
                    adj[b].add(a)
                raise EdgePresent((u, v))
            adj[u].add(v)
            adj[v].add(u)
        red = self.red_edges
        rf = self.instance.red_adj
        for u, v in remove:
            if v in rf[u]:
                red.discard((u, v))
        for u, v in add:
            if v in rf[u]:
                red.add((u, v))
        if check_degrees:
            d = self.instance.d
            touched = {x for p in remove for x in p} | {x for p in add for x in p}
            bad = [x for x in touched if len(adj[x]) != d]
            if bad:
                raise DegreeBroken(f"vertices {sorted(bad)} lost degree {d}")

    def __eq__(self, other):
        if not isinstance(other, ColoredState):
            return NotImplemented
        return self.instance == other.instance and self.adj == other.adj

    def __repr__(self):
        return f"ColoredState(n={self.n}, stratum={self.stratum}, edges={self.edges()})"


def red_count(state: ColoredState) -> int:
    """Red edges of ``G`` recounted from the adjacency."""
    inst = state.instance
    return sum(1 for u, v in state.edges() if inst.is_red(u, v))


def toggle_set(state: ColoredState, remove=(), add=(), check_degrees: bool = True) -> ColoredState:
    new = state.copy()
    new.toggle(remove, add, check_degrees=check_degrees and bool(remove or add))
    return new


def is_d_factor(state: ColoredState) -> bool:
    d = state.instance.d
    return all(len(a) == d for a in state.adj) and red_count(state) == 0


def expected_red_edges(instance: HostInstance) -> Fraction:
    """Mean number of red edges in a uniformly random d-regular graph."""
    if instance.n < 2:
        return Fraction(0)
    return Fraction(instance.m_red_total * instance.d, instance.n - 1)


def cycle_pairs(n: int, offset: int = 0) -> list[tuple[int, int]]:
    return [canon(offset + k, offset + (k + 1) % n) for k in range(n)]
