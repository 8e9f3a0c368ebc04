"""One step i -> i+1 of the semi-random triangle-free process."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import EdgeSet, GraphState, mixed_codegrees
from .params import ParamSchedule, stabilization_probs
from .rng import GAMMA, STABILIZATION, StepRandom

Edge = tuple[int, int]
BadElement = tuple[Edge, ...]


@dataclass
class StepSample:
    step: int
    gamma: EdgeSet
    bad: list[BadElement]
    repaired: list[BadElement]
    closed1: EdgeSet
    closed2: EdgeSet
    stabilized: EdgeSet
    rng_draws: int
    key: tuple[int, int, int] = (0, 0, 0)

    @property
    def repaired_edges(self) -> set[Edge]:
        return {e for el in self.repaired for e in el}

    def counts(self) -> dict:
        pairs = sum(1 for el in self.bad if len(el) == 2)
        return {
            "step": self.step,
            "gamma": len(self.gamma),
            "bad_pairs": pairs,
            "bad_triples": len(self.bad) - pairs,
            "repaired": len(self.repaired),
            "repaired_edges": len(self.repaired_edges),
            "closed1": len(self.closed1),
            "closed2": len(self.closed2),
            "stabilized": len(self.stabilized),
        }


def _edges_where(n: int, us, vs, mask) -> EdgeSet:
    return EdgeSet.from_arrays(n, np.asarray(us)[mask], np.asarray(vs)[mask])


def sample_gamma(state: GraphState, sched: ParamSchedule, rand: StepRandom, open_edges=None) -> EdgeSet:
    """Keep each open edge independently with probability p."""
    us, vs = open_edges if open_edges is not None else state.open.edges()
    u = rand.edge_uniforms(GAMMA, state.n, us, vs)
    return _edges_where(state.n, us, vs, u < sched.p)


def _gamma_adjacency(gamma: EdgeSet) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {}
    for u, v in gamma.edge_list():
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for w in adj:
        adj[w].sort()
    return adj


def find_bad(state: GraphState, gamma: EdgeSet) -> list[BadElement]:
    """Pairs {wu, wv} of gamma edges over a kept edge uv, and triangles inside gamma.

    Each element is a sorted tuple of canonical edges; the list is sorted.
    """
    kept = state.kept
    out: list[BadElement] = []
    for w, nbrs in _gamma_adjacency(gamma).items():
        for x in range(len(nbrs)):
            a = nbrs[x]
            for b in nbrs[x + 1 :]:
                if (a, b) in kept:
                    out.append(tuple(sorted(((min(w, a), max(w, a)), (min(w, b), max(w, b))))))
                elif w < a and (a, b) in gamma:
                    out.append(((w, a), (w, b), (a, b)))
    out.sort()
    return out


def greedy_disjoint(bad: list[BadElement]) -> list[BadElement]:
    """First-fit maximal edge-disjoint subfamily, scanning in the given order."""
    used: set[Edge] = set()
    chosen = []
    for el in bad:
        if used.isdisjoint(el):
            chosen.append(el)
            used.update(el)
    return chosen


def closed_by_neighbors(state: GraphState, gamma: EdgeSet) -> EdgeSet:
    """Open edges f with Y_f(i) meeting gamma.

    For a gamma edge xw and a taken edge wy, the open edge xy has xw in Y_xy.
    """
    out = EdgeSet(state.n)
    if len(gamma) == 0:
        return out
    taken, opened = state.taken, state.open
    nbr_cache: dict[int, np.ndarray] = {}
    for x, w in gamma.edge_list():
        for a, b in ((x, w), (w, x)):
            ys = nbr_cache.get(b)
            if ys is None:
                ys = nbr_cache[b] = taken.neighbors(b)
            for y in ys.tolist():
                if y != a and (a, y) in opened:
                    out.add(a, y)
    return out


def closed_by_gamma_pairs(state: GraphState, gamma: EdgeSet) -> EdgeSet:
    """Open edges uv with a common gamma neighbour w."""
    out = EdgeSet(state.n)
    opened = state.open
    for nbrs in _gamma_adjacency(gamma).values():
        for x in range(len(nbrs)):
            for b in nbrs[x + 1 :]:
                if (nbrs[x], b) in opened:
                    out.add(nbrs[x], b)
    return out


def sample_stabilization(state: GraphState, sched: ParamSchedule, rand: StepRandom, open_edges=None) -> EdgeSet:
    """Close each open edge e independently with probability p_hat(e, i)."""
    us, vs = open_edges if open_edges is not None else state.open.edges()
    if us.size == 0:
        return EdgeSet(state.n)
    y = mixed_codegrees(state, us, vs)
    probs = stabilization_probs(sched, state.step, y)
    u = rand.edge_uniforms(STABILIZATION, state.n, us, vs)
    return _edges_where(state.n, us, vs, u < probs)


def advance(state: GraphState, sched: ParamSchedule, rand: StepRandom) -> tuple[GraphState, StepSample]:
    """Sample, repair, close, stabilize; return the next state and the step record."""
    if state.step >= sched.steps:
        raise ValueError(f"state is at step {state.step}, schedule has only {sched.steps} steps")
    if state.n != sched.n:
        raise ValueError("schedule and state disagree on n")
    open_edges = state.open.edges()
    gamma = sample_gamma(state, sched, rand, open_edges)
    bad = find_bad(state, gamma)
    repaired = greedy_disjoint(bad)
    c1 = closed_by_neighbors(state, gamma)
    c2 = closed_by_gamma_pairs(state, gamma)
    stab = sample_stabilization(state, sched, rand, open_edges)

    removed = EdgeSet(state.n)
    if repaired:
        arr = np.array([e for el in repaired for e in el], dtype=np.int64)
        removed.add_many(arr[:, 0], arr[:, 1])
    new = GraphState(
        n=state.n,
        open=state.open - (gamma | c1 | stab | c2),
        taken=state.taken | gamma,
        kept=state.kept | (gamma - removed),
        step=state.step + 1,
    )
    n_open = open_edges[0].size
    sample = StepSample(
        step=state.step + 1,
        gamma=gamma,
        bad=bad,
        repaired=repaired,
        closed1=c1,
        closed2=c2,
        stabilized=stab,
        rng_draws=2 * n_open,
        key=rand.key,
    )
    return new, sample
