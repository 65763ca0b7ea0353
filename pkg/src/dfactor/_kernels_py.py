"""Pure-Python kernels; the compiled module mirrors these signatures."""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def pair_points(perm, d: int, n: int):
    """Pair consecutive half-edges; ``None`` on a loop or a repeated pair."""
    pts = np.asarray(perm, dtype=np.int64) // d
    u = pts[0::2]
    v = pts[1::2]
    if np.any(u == v):
        return None
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    key = lo * n + hi
    key.sort()
    if key.size > 1 and np.any(key[1:] == key[:-1]):
        return None
    return np.stack([lo, hi], axis=1)


def count_plan(n, gptr, gidx, rptr, ridx, S, degM, totM, plan, P=None, ends=None):
    """Count the tuples described by ``plan``.

    ``S`` is the ``n*n`` pair-state table; ``gptr/gidx`` and ``rptr/ridx`` are
    CSR adjacency of ``G`` and of the red pairs; ``degM[x]`` is the number of
    tail-coloured edges at ``x`` and ``totM`` their ordered total.  With ``P``
    and ``ends`` from the structure cache the tail reads cached path counts.
    """
    k, _, mode, mask, allow, closemask, tail = plan
    gptr = list(map(int, gptr))
    gidx = list(map(int, gidx))
    rptr = list(map(int, rptr))
    ridx = list(map(int, ridx))
    degM = list(map(int, degM))
    v = [0] * k
    gnb = [gidx[gptr[x]:gptr[x + 1]] for x in range(n)]
    rnb = [ridx[rptr[x]:rptr[x + 1]] for x in range(n)]
    every = range(n)
    total = 0
    tmask = mask[k - 1]
    aa, ab = allow[k - 2], allow[k - 1]
    cached = P is not None
    if cached:
        ends = list(map(int, ends))

    def near(p, x):
        return x == p or S[p * n + x] != 1

    def direct_tail():
        p = v[k - 3]
        s = v[0]
        X = {p}
        X.update(gnb[p])
        X.update(rnb[p])
        Y = {s}
        Y.update(gnb[s])
        Y.update(rnb[s])
        for t in range(k - 2):
            if not (aa >> t) & 1:
                X.add(v[t])
            if not (ab >> t) & 1:
                Y.add(v[t])
        c = totM
        for x in X:
            c -= degM[x]
        for y in Y:
            c -= degM[y]
        for x in X:
            base = x * n
            for y in gnb[x]:
                if S[base + y] & tmask and y in Y:
                    c += 1
        return c

    def cached_tail():
        p = v[k - 3]
        s = v[0]
        ux = set()
        uy = set()
        for t in range(k - 2):
            x = v[t]
            if not (aa >> t) & 1 and not near(p, x):
                ux.add(x)
            if not (ab >> t) & 1 and not near(s, x):
                uy.add(x)
        c = totM - ends[p] - ends[s] + int(P[p, s])
        for x in ux:
            c -= degM[x]
            base = x * n
            for y in gnb[x]:
                if S[base + y] & tmask and (near(s, y) or y in uy):
                    c += 1
        for y in uy:
            c -= degM[y]
            base = y * n
            for x in gnb[y]:
                if S[base + x] & tmask and near(p, x):
                    c += 1
        return c

    tail_count = cached_tail if cached else direct_tail

    def rec(t):
        nonlocal total
        if tail and t == k - 2:
            total += tail_count()
            return
        prev = v[t - 1]
        md = mode[t]
        cands = gnb[prev] if md == 0 else rnb[prev] if md == 1 else every
        m = mask[t]
        base = prev * n
        am = allow[t]
        last = t == k - 1
        for c in cands:
            if not S[base + c] & m:
                continue
            ok = True
            for tt in range(t):
                if v[tt] == c and not (am >> tt) & 1:
                    ok = False
                    break
            if not ok:
                continue
            if last:
                if S[c * n + v[0]] & closemask:
                    total += 1
                continue
            v[t] = c
            rec(t + 1)

    for x in range(n):
        v[0] = x
        rec(1)
    return total


def count_red_pairs(lo, hi, red_keys, n):
    """How many ``(lo, hi)`` pairs have their key in the sorted ``red_keys``."""
    key = np.asarray(lo, dtype=np.int64) * n + np.asarray(hi, dtype=np.int64)
    return int(np.isin(key, red_keys, assume_unique=False).sum())
