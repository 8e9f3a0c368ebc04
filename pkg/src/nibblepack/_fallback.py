"""Pure numpy/Python versions of the hot kernels, used when the extension is not built."""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 15


def pair_popcounts(A: np.ndarray, B: np.ndarray, us, vs) -> np.ndarray:
    """popcount(A[us[k]] & B[vs[k]]) for every k."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    out = np.empty(us.size, dtype=np.int64)
    for lo in range(0, us.size, _CHUNK):
        hi = lo + _CHUNK
        inter = A[us[lo:hi]] & B[vs[lo:hi]]
        out[lo:hi] = np.bitwise_count(inter).sum(axis=1, dtype=np.int64)
    return out


def max_independent_set(bits: np.ndarray, n: int) -> list[int]:
    """Maximum independent set of a graph on at most 64 vertices.

    Branch and bound for a maximum clique of the complement, pruned by
    greedy colouring (each colour class is a clique of the original graph).
    """
    if n == 0:
        return []
    full = (1 << n) - 1
    comp = []
    for v in range(n):
        row = int(bits[v, 0])
        comp.append(full & ~row & ~(1 << v))

    best: list[int] = []

    def colour_order(P: int):
        order, bounds = [], []
        colour = 0
        U = P
        while U:
            colour += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~low
                Q &= ~comp[v]
                U &= ~low
                order.append(v)
                bounds.append(colour)
        return order, bounds

    def expand(R: list[int], P: int):
        nonlocal best
        order, bounds = colour_order(P)
        for k in range(len(order) - 1, -1, -1):
            if len(R) + bounds[k] <= len(best):
                return
            v = order[k]
            R.append(v)
            NP = P & comp[v]
            if NP:
                expand(R, NP)
            elif len(R) > len(best):
                best = list(R)
            R.pop()
            P &= ~(1 << v)

    expand([], full)
    return sorted(best)


def upper_edges(bits: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints ``(us, vs)``, ``u < v``, in lexicographic order."""
    raw = np.unpackbits(bits.astype("<u8").view(np.uint8), axis=1, bitorder="little")[:, :n]
    us, vs = np.nonzero(np.triu(raw, 1))
    return us.astype(np.int64), vs.astype(np.int64)


def mixed_pair_counts(O: np.ndarray, E: np.ndarray, us, vs) -> np.ndarray:
    return pair_popcounts(O, E, us, vs) + pair_popcounts(O, E, vs, us)


def max_pair_popcount(A: np.ndarray, B: np.ndarray, n: int, both: bool) -> int:
    """max over u < v of popcount(A[u] & B[v]) (+ popcount(A[v] & B[u]) when ``both``)."""
    best = 0
    for u in range(n - 1):
        vs = np.arange(u + 1, n)
        acc = np.bitwise_count(A[u] & B[vs]).sum(axis=1, dtype=np.int64)
        if both:
            acc = acc + np.bitwise_count(A[vs] & B[u]).sum(axis=1, dtype=np.int64)
        best = max(best, int(acc.max()))
    return best
