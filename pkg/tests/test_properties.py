
import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from nibblepack.graph import (
    EdgeSet,
    GraphState,
    check_state_soundness,
    codegree,
    edges_between,
    format_edge_list,
    mixed_codegree,
    open_codegree,
    parse_edge_list,
)
from nibblepack.params import build_schedule, integral_exp_sq, psi, stabilization_prob
from nibblepack.rng import StepRandom
from nibblepack.step import advance, greedy_disjoint
from nibblepack.verify import oracle_step, triangle_count


@st.composite
def edge_sets(draw, max_n=70):
    n = draw(st.integers(2, max_n))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=120))
    return n, [(u, v) for u, v in pairs if u != v]


@given(edge_sets())
def test_edgeset_matches_python_set(data):
    n, pairs = data
    es = EdgeSet.from_edges(n, pairs)
    ref = {(min(u, v), max(u, v)) for u, v in pairs}
    assert es.edge_list() == sorted(ref)
    assert len(es) == len(ref)
    assert parse_edge_list(format_edge_list(es)) == es


@given(edge_sets(), edge_sets())
def test_set_algebra(a, b):
    n = min(a[0], b[0])
    pa = [(u, v) for u, v in a[1] if u < n and v < n]
    pb = [(u, v) for u, v in b[1] if u < n and v < n]
    A, B = EdgeSet.from_edges(n, pa), EdgeSet.from_edges(n, pb)
    sa, sb = set(A.edge_list()), set(B.edge_list())
    assert set((A | B).edge_list()) == sa | sb
    assert set((A & B).edge_list()) == sa & sb
    assert set((A - B).edge_list()) == sa - sb
    assert A.isdisjoint(B) == (not sa & sb)


@given(edge_sets(max_n=30), st.randoms(use_true_random=False))
def test_edges_between_additive(data, r):
    n, pairs = data
    assume(n >= 3)
    es = EdgeSet.from_edges(n, pairs)
    verts = list(range(n))
    r.shuffle(verts)
    k1, k2 = sorted(r.sample(range(1, n), 2)) if n > 3 else (1, 2)
    A, B, C = verts[:k1], verts[k1:k2], verts[k2:]
    assert edges_between(es, A, B) + edges_between(es, A, C) == edges_between(es, A, B + C)


@given(st.integers(3, 25), st.integers(0, 2**32), st.data())
def test_codegree_symmetry(n, seed, data):
    from conftest import random_state
    s = random_state(n, seed)
    u = data.draw(st.integers(0, n - 1))
    v = data.draw(st.integers(0, n - 1).filter(lambda x: x != u))
    assert open_codegree(s, u, v) == open_codegree(s, v, u)
    assert codegree(s, u, v) == codegree(s, v, u)
    assert mixed_codegree(s, u, v)[0] == mixed_codegree(s, v, u)[0]


@given(st.integers(3, 5000), st.integers(1, 50), st.data())
def test_stabilization_monotone(n, steps, data):
    s = build_schedule(n, {"steps": steps})
    i = data.draw(st.integers(0, steps - 1))
    ys = sorted(data.draw(st.lists(st.integers(0, 10**6), min_size=2, max_size=10)))
    ps = [stabilization_prob(s, i, y) for y in ys]
    assert all(0 <= p <= 1 for p in ps)
    assert all(a >= b for a, b in zip(ps, ps[1:]))


@given(st.floats(0, 200, allow_nan=False))
def test_psi_inverts_integral(x):
    y = psi(x)
    assert abs(integral_exp_sq(0, y) - x) <= 1e-10 * max(1.0, x)


@given(st.lists(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)).filter(lambda e: e[0] < e[1]),
                         min_size=2, max_size=3, unique=True), max_size=15))
def test_greedy_disjoint_maximal(raw):
    bad = sorted({tuple(sorted(el)) for el in raw})
    rep = greedy_disjoint(bad)
    used = [e for el in rep for e in el]
    assert len(used) == len(set(used))
    assert set(rep) <= set(bad)
    assert all(set(el) & set(used) for el in bad)


@given(st.integers(3, 14), st.floats(0.2, 1.0), st.integers(0, 2**63), st.integers(1, 6),
       st.floats(0.0, 0.6), st.floats(0.05, 0.9))
def test_advance_sound_and_matches_oracle(n, density, seed, steps, p, sigma):
    g = np.random.default_rng(seed % 1000)
    us, vs = np.triu_indices(n, 1)
    keep = g.random(us.size) < density
    host = EdgeSet.from_arrays(n, us[keep], vs[keep])
    sched = build_schedule(n, {"steps": steps, "p": p, "sigma": sigma})
    state = GraphState.initial(host)
    for i in range(steps):
        new, smp = advance(state, sched, StepRandom(seed, 0, i + 1))
        assert check_state_soundness(new, host) == []
        assert oracle_step(state, sched, smp, new)
        state = new
    assert triangle_count(state.kept) == 0
