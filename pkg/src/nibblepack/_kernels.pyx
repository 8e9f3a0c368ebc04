# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitset kernels; same contracts as ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


def pair_popcounts(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, us, vs):
    cdef const int64_t[::1] cu = np.ascontiguousarray(us, dtype=np.int64)
    cdef const int64_t[::1] cv = np.ascontiguousarray(vs, dtype=np.int64)
    cdef Py_ssize_t m = cu.shape[0], W = A.shape[1], k, w
    cdef int64_t u, v, acc
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] res = out
    if cv.shape[0] != m:
        raise ValueError("endpoint arrays differ in length")
    with nogil:
        for k in range(m):
            u = cu[k]
            v = cv[k]
            acc = 0
            for w in range(W):
                acc += __builtin_popcountll(A[u, w] & B[v, w])
            res[k] = acc
    return out


cdef int _popc(uint64_t x) nogil:
    return __builtin_popcountll(x)


cdef int _colour_order(uint64_t P, const uint64_t* comp, int* order, int* bounds) nogil:
    cdef uint64_t U = P, Q, low
    cdef int colour = 0, k = 0, v
    while U:
        colour += 1
        Q = U
        while Q:
            v = __builtin_ctzll(Q)
            low = (<uint64_t>1) << v
            Q &= ~low
            Q &= ~comp[v]
            U &= ~low
            order[k] = v
            bounds[k] = colour
            k += 1
    return k


cdef void _expand(int depth, uint64_t R, uint64_t P, const uint64_t* comp,
                  int* best_size, uint64_t* best_set, int* scratch) nogil:
    cdef int* order = scratch + depth * 128
    cdef int* bounds = order + 64
    cdef int k = _colour_order(P, comp, order, bounds)
    cdef int size = _popc(R), v
    cdef uint64_t NP, bit
    while k > 0:
        k -= 1
        if size + bounds[k] <= best_size[0]:
            return
        v = order[k]
        bit = (<uint64_t>1) << v
        NP = P & comp[v]
        if NP:
            _expand(depth + 1, R | bit, NP, comp, best_size, best_set, scratch)
        elif size + 1 > best_size[0]:
            best_size[0] = size + 1
            best_set[0] = R | bit
        P &= ~bit


def max_independent_set(const uint64_t[:, ::1] bits, int n):
    if n > 64:
        raise ValueError("at most 64 vertices")
    if n == 0:
        return []
    cdef uint64_t comp[64]
    cdef uint64_t full = (~(<uint64_t>0)) if n == 64 else (((<uint64_t>1) << n) - 1)
    cdef int v
    for v in range(n):
        comp[v] = full & ~bits[v, 0] & ~((<uint64_t>1) << v)
    cdef int best_size = 0
    cdef uint64_t best_set = 0
    scratch_arr = np.empty(65 * 128, dtype=np.intc)
    cdef int[::1] scratch = scratch_arr
    with nogil:
        _expand(0, 0, full, comp, &best_size, &best_set, &scratch[0])
    return [v for v in range(n) if (best_set >> v) & 1]


def upper_edges(const uint64_t[:, ::1] bits, int n):
    cdef Py_ssize_t W = bits.shape[1], u, w, total = 0
    cdef uint64_t x
    cdef int v
    for u in range(n):
        for w in range(W):
            total += _popc(bits[u, w])
    total //= 2
    us_arr = np.empty(total, dtype=np.int64)
    vs_arr = np.empty(total, dtype=np.int64)
    cdef int64_t[::1] us = us_arr
    cdef int64_t[::1] vs = vs_arr
    cdef Py_ssize_t k = 0
    with nogil:
        for u in range(n):
            w = (u + 1) >> 6
            x = bits[u, w] & ~((((<uint64_t>1) << ((u + 1) & 63)) - 1)) if w < W else 0
            while w < W:
                while x:
                    v = <int>(w * 64) + __builtin_ctzll(x)
                    x &= x - 1
                    if k < total:
                        us[k] = u
                        vs[k] = v
                    k += 1
                w += 1
                if w < W:
                    x = bits[u, w]
    if k != total:
        raise ValueError("adjacency rows are not symmetric")
    return us_arr, vs_arr


def mixed_pair_counts(const uint64_t[:, ::1] O, const uint64_t[:, ::1] E, us, vs):
    cdef const int64_t[::1] cu = np.ascontiguousarray(us, dtype=np.int64)
    cdef const int64_t[::1] cv = np.ascontiguousarray(vs, dtype=np.int64)
    cdef Py_ssize_t m = cu.shape[0], W = O.shape[1], k, w
    cdef int64_t u, v, acc
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] res = out
    with nogil:
        for k in range(m):
            u = cu[k]
            v = cv[k]
            acc = 0
            for w in range(W):
                acc += __builtin_popcountll(O[u, w] & E[v, w]) + __builtin_popcountll(O[v, w] & E[u, w])
            res[k] = acc
    return out


def max_pair_popcount(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, int n, bint both):
    cdef Py_ssize_t W = A.shape[1], u, v, w
    cdef int64_t acc, best = 0
    with nogil:
        for u in range(n):
            for v in range(u + 1, n):
                acc = 0
                for w in range(W):
                    acc += __builtin_popcountll(A[u, w] & B[v, w])
                if both:
                    for w in range(W):
                        acc += __builtin_popcountll(A[v, w] & B[u, w])
                if acc > best:
                    best = acc
    return best
