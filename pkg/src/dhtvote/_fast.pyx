# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: batch tree-position computation and greedy route walks.

Interface twin of _fast_py; see that module for the semantics.
"""

import numpy as np

BACKEND = "cython"

ctypedef unsigned long long u64


cdef inline u64 _cwdist(u64 a, u64 b, u64 msk) nogil:
    return (b - a) & msk


cdef inline bint _owns(u64* a, Py_ssize_t n, Py_ssize_t i, u64 dest) nogil:
    cdef u64 lo = a[i - 1] if i > 0 else a[n - 1]
    cdef u64 hi = a[i]
    if lo == hi:
        return True
    if lo < hi:
        return lo < dest and dest <= hi
    return dest > lo or dest <= hi


def positions_from_sorted(u64[::1] addrs, int d):
    cdef Py_ssize_t n = addrs.shape[0]
    out_arr = np.zeros(n, dtype=np.uint64)
    cdef u64[::1] out = out_arr
    cdef Py_ssize_t i
    cdef u64 lo, hi, x
    cdef int t
    for i in range(n):
        lo = addrs[i - 1] if i > 0 else addrs[n - 1]
        hi = addrs[i]
        if lo >= hi:
            continue
        x = lo ^ hi
        t = 0
        while x > 1:
            x >>= 1
            t += 1
        out[i] = hi & ~(((<u64>1) << t) - 1)
    return out_arr


def route_hops_many(
    u64[::1] addrs,
    long long[:, ::1] fingers,
    long long[::1] srcs,
    u64[::1] dests,
    int d,
    bint symmetric,
):
    cdef Py_ssize_t n = addrs.shape[0]
    cdef Py_ssize_t m = fingers.shape[1]
    cdef Py_ssize_t nprobe = srcs.shape[0]
    cdef u64 msk = <u64>0xFFFFFFFFFFFFFFFF if d == 64 else (((<u64>1) << d) - 1)
    out_arr = np.empty(nprobe, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef u64* a = <u64*>&addrs[0]
    cdef Py_ssize_t p, cur, nxt, j, f
    cdef u64 dest, best, rd, span, fwd
    cdef long long hops, cap = 4 * n + 64
    for p in range(nprobe):
        cur = <Py_ssize_t>srcs[p]
        dest = dests[p]
        hops = 0
        while not _owns(a, n, cur, dest):
            if hops > cap:
                hops = -1
                break
            nxt = -1
            if symmetric:
                rd = _cwdist(a[cur], dest, msk)
                best = _cwdist(dest, a[cur], msk)
                if rd < best:
                    best = rd
                for j in range(m):
                    f = <Py_ssize_t>fingers[cur, j]
                    if f == cur:
                        continue
                    if _owns(a, n, f, dest):
                        nxt = f
                        break
                    rd = _cwdist(a[f], dest, msk)
                    span = _cwdist(dest, a[f], msk)
                    if span < rd:
                        rd = span
                    if rd < best:
                        best = rd
                        nxt = f
            else:
                span = _cwdist(a[cur], dest, msk)
                best = 0
                for j in range(m):
                    f = <Py_ssize_t>fingers[cur, j]
                    if f == cur:
                        continue
                    if _owns(a, n, f, dest):
                        nxt = f
                        break
                    fwd = _cwdist(a[cur], a[f], msk)
                    if fwd > 0 and fwd <= span and fwd > best:
                        best = fwd
                        nxt = f
            if nxt < 0:
                nxt = (cur + 1) % n
            cur = nxt
            hops += 1
        out[p] = hops
    return out_arr
