"""Edge sets as packed bit rows over a fixed vertex range, and the (O, E, F) process state."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import kernels


def _words(n: int) -> int:
    return max(1, (n + 63) // 64)


class EdgeSet:
    """Undirected simple edge set on vertices ``0..n-1``.

    Row ``u`` of ``bits`` holds the neighbourhood of ``u``; bit ``v & 63`` of
    word ``v >> 6`` is set iff ``uv`` is an edge. Rows are kept symmetric.
    """

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: np.ndarray | None = None):
        if n < 0:
            raise ValueError("n must be nonnegative")
        self.n = n
        if bits is None:
            bits = np.zeros((n, _words(n)), dtype=np.uint64)
        self.bits = bits

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "EdgeSet":
        pairs = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls.from_arrays(n, pairs[:, 0], pairs[:, 1])

    @classmethod
    def from_arrays(cls, n: int, us, vs) -> "EdgeSet":
        es = cls(n)
        es.add_many(us, vs)
        return es

    @classmethod
    def complete(cls, n: int) -> "EdgeSet":
        dense = ~np.eye(n, dtype=bool)
        return cls.from_dense(dense)

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "EdgeSet":
        dense = np.asarray(dense, dtype=bool)
        n = dense.shape[0]
        if dense.shape != (n, n):
            raise ValueError("adjacency matrix must be square")
        sym = dense | dense.T
        np.fill_diagonal(sym, False)
        padded = np.zeros((n, _words(n) * 64), dtype=bool)
        padded[:, :n] = sym
        packed = np.packbits(padded, axis=1, bitorder="little")
        bits = np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)
        return cls(n, bits.reshape(n, _words(n)).copy())

    def copy(self) -> "EdgeSet":
        return EdgeSet(self.n, self.bits.copy())

    # -- mutation ----------------------------------------------------------

    def add(self, u: int, v: int) -> None:
        self._check_pair(u, v)
        self.bits[u, v >> 6] |= np.uint64(1 << (v & 63))
        self.bits[v, u >> 6] |= np.uint64(1 << (u & 63))

    def discard(self, u: int, v: int) -> None:
        self._check_pair(u, v)
        self.bits[u, v >> 6] &= ~np.uint64(1 << (v & 63))
        self.bits[v, u >> 6] &= ~np.uint64(1 << (u & 63))

    def add_many(self, us, vs) -> None:
        us = np.asarray(us, dtype=np.int64).ravel()
        vs = np.asarray(vs, dtype=np.int64).ravel()
        if us.shape != vs.shape:
            raise ValueError("endpoint arrays differ in length")
        if us.size == 0:
            return
        if (us == vs).any():
            raise ValueError("loops are not allowed")
        if us.min() < 0 or vs.min() < 0 or us.max() >= self.n or vs.max() >= self.n:
            raise ValueError("vertex out of range")
        one = np.uint64(1)
        for a, b in ((us, vs), (vs, us)):
            np.bitwise_or.at(self.bits, (a, b >> 6), one << (b & 63).astype(np.uint64))

    def _check_pair(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError("loops are not allowed")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"vertex out of range: {u}, {v}")

    # -- queries -----------------------------------------------------------

    def __contains__(self, edge) -> bool:
        u, v = edge
        if u == v or not (0 <= u < self.n and 0 <= v < self.n):
            return False
        return bool((int(self.bits[u, v >> 6]) >> (v & 63)) & 1)

    def __len__(self) -> int:
        return int(np.bitwise_count(self.bits).sum()) // 2

    def degrees(self) -> np.ndarray:
        return np.bitwise_count(self.bits).sum(axis=1, dtype=np.int64)

    def degree(self, v: int) -> int:
        return int(np.bitwise_count(self.bits[v]).sum())

    def to_dense(self) -> np.ndarray:
        raw = np.unpackbits(self.bits.astype("<u8").view(np.uint8), axis=1, bitorder="little")
        return raw[:, : self.n].astype(bool)

    def neighbors(self, v: int) -> np.ndarray:
        raw = np.unpackbits(self.bits[v].astype("<u8").view(np.uint8), bitorder="little")
        return np.flatnonzero(raw[: self.n])

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays ``(us, vs)`` with ``us < vs``, in lexicographic order."""
        return kernels.upper_edges(self.bits, self.n)

    def edge_list(self) -> list[tuple[int, int]]:
        us, vs = self.edges()
        return list(zip(us.tolist(), vs.tolist()))

    def __iter__(self):
        return iter(self.edge_list())

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        return f"EdgeSet(n={self.n}, m={len(self)})"

    # -- algebra -----------------------------------------------------------

    def _same_n(self, other: "EdgeSet") -> None:
        if self.n != other.n:
            raise ValueError(f"vertex counts differ: {self.n} vs {other.n}")

    def __or__(self, other: "EdgeSet") -> "EdgeSet":
        self._same_n(other)
        return EdgeSet(self.n, self.bits | other.bits)

    def __and__(self, other: "EdgeSet") -> "EdgeSet":
        self._same_n(other)
        return EdgeSet(self.n, self.bits & other.bits)

    def __sub__(self, other: "EdgeSet") -> "EdgeSet":
        self._same_n(other)
        return EdgeSet(self.n, self.bits & ~other.bits)

    def issubset(self, other: "EdgeSet") -> bool:
        self._same_n(other)
        return not (self.bits & ~other.bits).any()

    def isdisjoint(self, other: "EdgeSet") -> bool:
        self._same_n(other)
        return not (self.bits & other.bits).any()


def vertex_mask(n: int, vertices) -> np.ndarray:
    mask = np.zeros(_words(n), dtype=np.uint64)
    vs = np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices, dtype=np.int64)
    if vs.size:
        np.bitwise_or.at(mask, vs >> 6, np.uint64(1) << (vs & 63).astype(np.uint64))
    return mask


def edges_between(S: EdgeSet, A, B, with_edges: bool = False):
    """Number of edges of ``S`` with one end in ``A`` and the other in ``B``.

    With ``with_edges`` also returns the canonical edge list in lexicographic order.
    """
    A = np.unique(np.asarray(list(A), dtype=np.int64))
    B = np.unique(np.asarray(list(B), dtype=np.int64))
    if np.intersect1d(A, B).size:
        raise ValueError("A and B must be disjoint")
    if A.size == 0 or B.size == 0:
        return (0, []) if with_edges else 0
    mask = vertex_mask(S.n, B)
    count = int(np.bitwise_count(S.bits[A] & mask).sum())
    if not with_edges:
        return count
    dense = S.to_dense()
    in_b = np.zeros(S.n, dtype=bool)
    in_b[B] = True
    edges = []
    for a in A.tolist():
        for b in np.flatnonzero(dense[a] & in_b).tolist():
            edges.append((min(a, b), max(a, b)))
    edges.sort()
    return count, edges


# -- process state -----------------------------------------------------------


@dataclass
class GraphState:
    """Open, taken and kept edge sets (O_i, E_i, F_i) after ``step`` steps."""

    n: int
    open: EdgeSet
    taken: EdgeSet
    kept: EdgeSet
    step: int = 0

    @classmethod
    def initial(cls, host: EdgeSet) -> "GraphState":
        return cls(host.n, host.copy(), EdgeSet(host.n), EdgeSet(host.n), 0)

    def copy(self) -> "GraphState":
        return GraphState(self.n, self.open.copy(), self.taken.copy(), self.kept.copy(), self.step)


def open_codegree(state: GraphState, u: int, v: int) -> int:
    """|N_O(u) & N_O(v)|."""
    return int(np.bitwise_count(state.open.bits[u] & state.open.bits[v]).sum())


def codegree(state: GraphState, u: int, v: int) -> int:
    """|N_E(u) & N_E(v)|."""
    return int(np.bitwise_count(state.taken.bits[u] & state.taken.bits[v]).sum())


def mixed_codegree(state: GraphState, u: int, v: int) -> tuple[int, list[tuple[int, int]]]:
    """Open edges ``uw`` with ``vw`` taken, together with open ``vw`` with ``uw`` taken.

    Returns the count and the sorted canonical edge list.
    """
    if u == v:
        raise ValueError("u and v must differ")
    O, E = state.open.bits, state.taken.bits
    edges = set()
    for a, b in ((u, v), (v, u)):
        row = np.unpackbits((O[a] & E[b]).astype("<u8").view(np.uint8), bitorder="little")
        for w in np.flatnonzero(row[: state.n]).tolist():
            edges.add((min(a, w), max(a, w)))
    return len(edges), sorted(edges)


def mixed_codegrees(state: GraphState, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """|Y_uv| for many pairs at once (the two branches never share an edge)."""
    return kernels.mixed_pair_counts(state.open.bits, state.taken.bits, us, vs)


class Violation(NamedTuple):
    kind: str
    witness: tuple


def triangles(es: EdgeSet, limit: int | None = None) -> list[tuple[int, int, int]]:
    """Triangles ``(u, v, w)`` with ``u < v < w``, lexicographically ordered."""
    out = []
    us, vs = es.edges()
    if us.size == 0:
        return out
    common = kernels.pair_popcounts(es.bits, es.bits, us, vs)
    for k in np.flatnonzero(common).tolist():
        u, v = int(us[k]), int(vs[k])
        row = np.unpackbits((es.bits[u] & es.bits[v]).astype("<u8").view(np.uint8), bitorder="little")
        for w in np.flatnonzero(row[: es.n]).tolist():
            if w > v:
                out.append((u, v, w))
                if limit is not None and len(out) >= limit:
                    return out
    return out


def check_state_soundness(state: GraphState, host: EdgeSet | None = None, limit: int = 20) -> list[Violation]:
    """Witnesses for every broken GraphState invariant; empty iff the state is sound."""
    out: list[Violation] = []
    O, E, F = state.open, state.taken, state.kept
    for name, es in (("open", O), ("taken", E), ("kept", F)):
        if es.n != state.n:
            out.append(Violation(f"{name}-size", (es.n, state.n)))
            return out
        dense = es.to_dense()
        if dense.diagonal().any():
            out.append(Violation(f"{name}-loop", tuple(np.flatnonzero(dense.diagonal()).tolist())))
        asym = np.argwhere(dense != dense.T)
        if asym.size:
            out.append(Violation(f"{name}-asymmetric", tuple(map(int, asym[0]))))
    for u, v in (F - E).edge_list()[:limit]:
        out.append(Violation("kept-not-taken", (u, v)))
    for u, v in (O & E).edge_list()[:limit]:
        out.append(Violation("open-and-taken", (u, v)))
    if host is not None:
        for u, v in (E - host).edge_list()[:limit]:
            out.append(Violation("taken-not-in-host", (u, v)))
        for u, v in (O - host).edge_list()[:limit]:
            out.append(Violation("open-not-in-host", (u, v)))
    for tri in triangles(F, limit=limit):
        out.append(Violation("kept-triangle", tri))
    us, vs = O.edges()
    if us.size:
        z = kernels.pair_popcounts(E.bits, E.bits, us, vs)
        bad = np.flatnonzero(z)[:limit].tolist()
        dense_e = E.to_dense() if bad else None
        for k in bad:
            u, v = int(us[k]), int(vs[k])
            w = int(np.flatnonzero(dense_e[u] & dense_e[v])[0])
            out.append(Violation("open-closes-triangle", (u, v, w)))
    return out


# -- edge-list files ---------------------------------------------------------


class EdgeListError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def parse_edge_list(text: str) -> EdgeSet:
    """Parse ``n <count>`` followed by ``u v`` lines; pairs are re-canonicalised and deduplicated."""
    n = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise EdgeListError("expected header 'n <count>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise EdgeListError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n < 0:
                raise EdgeListError("negative vertex count", lineno)
            continue
        if len(parts) != 2:
            raise EdgeListError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"non-integer vertex in {line!r}", lineno) from None
        if u == v:
            raise EdgeListError(f"loop at vertex {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListError(f"vertex out of range in {line!r}", lineno)
        pairs.append((min(u, v), max(u, v)))
    if n is None:
        raise EdgeListError("missing header 'n <count>'")
    return EdgeSet.from_edges(n, sorted(set(pairs)))


def format_edge_list(es: EdgeSet) -> str:
    lines = [f"n {es.n}"]
    lines.extend(f"{u} {v}" for u, v in es.edge_list())
    return "\n".join(lines) + "\n"


def read_edge_list(path: str | os.PathLike) -> EdgeSet:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def write_edge_list(path: str | os.PathLike, es: EdgeSet) -> None:
    from .io import atomic_write_text

    atomic_write_text(path, format_edge_list(es))
