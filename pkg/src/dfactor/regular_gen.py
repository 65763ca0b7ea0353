"""Uniform simple d-regular graphs from the pairing (configuration) model.

A uniformly random perfect matching of the ``dn`` half-edges is drawn and the
whole draw is discarded if it contains a loop or a repeated pair.  Conditioned
on acceptance the graph is uniform over labelled simple d-regular graphs.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import BudgetExhausted, DegreeOutOfRange, OddProduct
from .graph_core import ColoredState, HostInstance, load_instance
from .rng import RngStream, as_stream

DEFAULT_RESTART_BUDGET = 10_000
_SMALL_POINTS = 4096


def _check(n: int, d: int) -> None:
    if (n * d) % 2:
        raise OddProduct(f"d*n = {n * d} is odd")
    if d < 1 or d >= n:
        raise DegreeOutOfRange(f"need 1 <= d < n, got d={d}, n={n}")


def _trial_small(n: int, d: int, rnd) -> list | None:
    # pair the first unmatched point with a uniform remaining one; this is a
    # uniform perfect matching, and a loop or repeat ends the trial early
    pts = [v for v in range(n) for _ in range(d)]
    m = len(pts)
    seen = set()
    edges = []
    for k in range(0, m, 2):
        j = k + 1 + rnd.randrange(m - k - 1)
        pts[k + 1], pts[j] = pts[j], pts[k + 1]
        u, v = pts[k], pts[k + 1]
        if u == v:
            return None
        key = (u, v) if u < v else (v, u)
        if key in seen:
            return None
        seen.add(key)
        edges.append(key)
    return edges


def _trial_large(n: int, d: int, gen: np.random.Generator):
    perm = gen.permutation(n * d).astype(np.int64)
    return kernels.pair_points(perm, d, n)


def pairing_edges(n: int, d: int, rng: RngStream, max_trials: int = 1_000_000) -> list:
    """Edge list of one uniform simple d-regular graph."""
    _check(n, d)
    rng = as_stream(rng)
    small = n * d <= _SMALL_POINTS
    for _ in range(max_trials):
        if small:
            edges = _trial_small(n, d, rng.py)
        else:
            arr = _trial_large(n, d, rng.np)
            edges = None if arr is None else arr
        if edges is not None:
            return edges
    raise BudgetExhausted(f"no simple pairing in {max_trials} trials (n={n}, d={d})")


def _state_from_array(instance: HostInstance, arr) -> ColoredState:
    n = instance.n
    adj = [set() for _ in range(n)]
    red_adj = instance.red_adj
    red = set()
    for u, v in (arr.tolist() if isinstance(arr, np.ndarray) else arr):
        adj[u].add(v)
        adj[v].add(u)
        if v in red_adj[u]:
            red.add((u, v) if u < v else (v, u))
    return ColoredState(instance, adj, red)


def pairing_sample(n: int, d: int, rng: RngStream, instance: HostInstance | None = None) -> ColoredState:
    if instance is None:
        instance = load_instance(n, d, ())
    return _state_from_array(instance, pairing_edges(n, d, rng))


def _red_in(instance: HostInstance, arr) -> int:
    if isinstance(arr, np.ndarray):
        return kernels.count_red_pairs(arr, instance)
    red_adj = instance.red_adj
    return sum(1 for u, v in arr if v in red_adj[u])


def draw_initial(instance: HostInstance, i_max: int, rng: RngStream,
                 restart_budget: int = DEFAULT_RESTART_BUDGET) -> tuple[ColoredState, int]:
    """Uniform d-regular graph with at most ``i_max`` red edges, and the draw count."""
    rng = as_stream(rng)
    n, d = instance.n, instance.d
    for draw in range(1, restart_budget + 1):
        arr = pairing_edges(n, d, rng)
        if instance.m_red_total == 0 or _red_in(instance, arr) <= i_max:
            return _state_from_array(instance, arr), draw
    raise BudgetExhausted(
        f"{restart_budget} draws all had more than {i_max} red edges")


def initial_state(instance: HostInstance, i_max: int, rng: RngStream,
                  restart_budget: int = DEFAULT_RESTART_BUDGET) -> ColoredState:
    return draw_initial(instance, i_max, rng, restart_budget)[0]


def random_regular_forbidden(n: int, delta: int, rng: RngStream) -> list:
    """A random ``delta``-regular forbidden graph (empty when ``delta`` is 0)."""
    if delta == 0:
        return []
    return [tuple(e) for e in (pairing_edges(n, delta, rng) if n * delta <= _SMALL_POINTS
                                else np.asarray(pairing_edges(n, delta, rng)).tolist())]
