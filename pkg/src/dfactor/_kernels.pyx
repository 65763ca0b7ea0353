# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; signatures mirror ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.stdint cimport int32_t, int64_t, uint8_t

cnp.import_array()

BACKEND = "compiled"

cdef enum:
    MAXK = 16


def pair_points(const int64_t[::1] perm, int d, int n):
    cdef Py_ssize_t m = perm.shape[0] // 2
    cdef cnp.ndarray[int64_t, ndim=2] out = np.empty((m, 2), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    cdef Py_ssize_t j
    cdef int64_t u, v
    for j in range(m):
        u = perm[2 * j] // d
        v = perm[2 * j + 1] // d
        if u == v:
            return None
        if u < v:
            o[j, 0] = u
            o[j, 1] = v
        else:
            o[j, 0] = v
            o[j, 1] = u
    key = np.sort(out[:, 0] * n + out[:, 1])
    if key.shape[0] > 1 and np.any(key[1:] == key[:-1]):
        return None
    return out


cdef inline bint _near(const uint8_t[::1] S, int n, int p, int x) noexcept nogil:
    return x == p or S[p * n + x] != 1


def count_plan(int n, const int32_t[::1] gptr, const int32_t[::1] gidx,
               const int32_t[::1] rptr, const int32_t[::1] ridx,
               const uint8_t[::1] S, const int64_t[::1] degM, int64_t totM,
               plan, P=None, ends=None):
    cdef int k = plan[0]
    if k > MAXK:
        raise ValueError("pattern too long")
    cdef int mode[MAXK]
    cdef int mask[MAXK]
    cdef int64_t allow[MAXK]
    cdef int t
    for t in range(k):
        mode[t] = plan[2][t]
        mask[t] = plan[3][t]
        allow[t] = plan[4][t]
    cdef int closemask = plan[5]
    cdef bint tail = plan[6]
    cdef bint cached = P is not None
    cdef const int64_t[:, ::1] Pv
    cdef const int64_t[::1] endv
    if cached:
        Pv = P
        endv = ends
    cdef int tmask = mask[k - 1]
    cdef int64_t aa = allow[k - 2], ab = allow[k - 1]

    cdef int v[MAXK]
    cdef int64_t cur[MAXK]
    cdef int64_t stop[MAXK]
    cdef int32_t *markX = <int32_t *> malloc(n * sizeof(int32_t))
    cdef int32_t *markY = <int32_t *> malloc(n * sizeof(int32_t))
    cdef int32_t *listX = <int32_t *> malloc((n + MAXK) * sizeof(int32_t))
    cdef int32_t *listY = <int32_t *> malloc((n + MAXK) * sizeof(int32_t))
    if markX == NULL or markY == NULL or listX == NULL or listY == NULL:
        free(markX); free(markY); free(listX); free(listY)
        raise MemoryError()
    cdef int i
    for i in range(n):
        markX[i] = 0
        markY[i] = 0
    cdef int32_t stamp = 0
    cdef int64_t total = 0, c
    cdef int x0, x, y, p, s, prev, cand, md, tt, nx, ny, last
    cdef int64_t j, base
    cdef bint ok
    cdef int tail_level = k - 2 if tail else k

    with nogil:
        for x0 in range(n):
            v[0] = x0
            t = 1
            if t != tail_level:
                prev = v[0]
                md = mode[1]
                if md == 0:
                    cur[1] = gptr[prev]; stop[1] = gptr[prev + 1]
                elif md == 1:
                    cur[1] = rptr[prev]; stop[1] = rptr[prev + 1]
                else:
                    cur[1] = 0; stop[1] = n
            while t >= 1:
                if t == tail_level:
                    # count the last two vertices at once
                    p = v[k - 3]
                    s = v[0]
                    stamp += 1
                    nx = 0
                    ny = 0
                    if not cached:
                        markX[p] = stamp; listX[nx] = p; nx += 1
                        for j in range(gptr[p], gptr[p + 1]):
                            y = gidx[j]
                            if markX[y] != stamp:
                                markX[y] = stamp; listX[nx] = y; nx += 1
                        for j in range(rptr[p], rptr[p + 1]):
                            y = ridx[j]
                            if markX[y] != stamp:
                                markX[y] = stamp; listX[nx] = y; nx += 1
                        markY[s] = stamp; listY[ny] = s; ny += 1
                        for j in range(gptr[s], gptr[s + 1]):
                            y = gidx[j]
                            if markY[y] != stamp:
                                markY[y] = stamp; listY[ny] = y; ny += 1
                        for j in range(rptr[s], rptr[s + 1]):
                            y = ridx[j]
                            if markY[y] != stamp:
                                markY[y] = stamp; listY[ny] = y; ny += 1
                        for tt in range(k - 2):
                            y = v[tt]
                            if not ((aa >> tt) & 1) and markX[y] != stamp:
                                markX[y] = stamp; listX[nx] = y; nx += 1
                            if not ((ab >> tt) & 1) and markY[y] != stamp:
                                markY[y] = stamp; listY[ny] = y; ny += 1
                        c = totM
                        for i in range(nx):
                            c -= degM[listX[i]]
                        for i in range(ny):
                            c -= degM[listY[i]]
                        for i in range(nx):
                            x = listX[i]
                            base = <int64_t> x * n
                            for j in range(gptr[x], gptr[x + 1]):
                                y = gidx[j]
                                if (S[base + y] & tmask) and markY[y] == stamp:
                                    c += 1
                    else:
                        for tt in range(k - 2):
                            y = v[tt]
                            if not ((aa >> tt) & 1) and not _near(S, n, p, y) and markX[y] != stamp:
                                markX[y] = stamp; listX[nx] = y; nx += 1
                            if not ((ab >> tt) & 1) and not _near(S, n, s, y) and markY[y] != stamp:
                                markY[y] = stamp; listY[ny] = y; ny += 1
                        c = totM - endv[p] - endv[s] + Pv[p, s]
                        for i in range(nx):
                            x = listX[i]
                            c -= degM[x]
                            base = <int64_t> x * n
                            for j in range(gptr[x], gptr[x + 1]):
                                y = gidx[j]
                                if (S[base + y] & tmask) and (_near(S, n, s, y) or markY[y] == stamp):
                                    c += 1
                        for i in range(ny):
                            y = listY[i]
                            c -= degM[y]
                            base = <int64_t> y * n
                            for j in range(gptr[y], gptr[y + 1]):
                                x = gidx[j]
                                if (S[base + x] & tmask) and _near(S, n, p, x):
                                    c += 1
                    total += c
                    t -= 1
                    continue
                if cur[t] >= stop[t]:
                    t -= 1
                    continue
                md = mode[t]
                j = cur[t]
                cur[t] = j + 1
                if md == 0:
                    cand = gidx[j]
                elif md == 1:
                    cand = ridx[j]
                else:
                    cand = <int> j
                prev = v[t - 1]
                if not (S[<int64_t> prev * n + cand] & mask[t]):
                    continue
                ok = True
                for tt in range(t):
                    if v[tt] == cand and not ((allow[t] >> tt) & 1):
                        ok = False
                        break
                if not ok:
                    continue
                if t == k - 1:
                    if S[<int64_t> cand * n + v[0]] & closemask:
                        total += 1
                    continue
                v[t] = cand
                t += 1
                if t != tail_level:
                    md = mode[t]
                    if md == 0:
                        cur[t] = gptr[cand]; stop[t] = gptr[cand + 1]
                    elif md == 1:
                        cur[t] = rptr[cand]; stop[t] = rptr[cand + 1]
                    else:
                        cur[t] = 0; stop[t] = n
    free(markX); free(markY); free(listX); free(listY)
    return total
