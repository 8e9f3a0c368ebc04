from itertools import combinations

import numpy as np
import pytest

from conftest import random_edges, random_state
from nibblepack import step as step_mod
from nibblepack.graph import EdgeSet, GraphState, mixed_codegree
from nibblepack.params import build_schedule
from nibblepack.rng import StepRandom
from nibblepack.verify import (
    edge_density_test,
    equalization_test,
    handshake_check,
    independence_exact,
    independence_witness_rate,
    oracle_step,
    triangle_count,
)

PETERSEN = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            (5, 7), (7, 9), (6, 9), (6, 8), (5, 8)]


def test_oracle_empty_step():
    s = build_schedule(12, {"steps": 2, "p": 0.0})
    st = GraphState(12, EdgeSet(12), EdgeSet(12), EdgeSet(12))
    new, smp = step_mod.advance(st, s, StepRandom(0, 0, 1))
    assert oracle_step(st, s, smp, new)


def test_oracle_catches_injected_fault(monkeypatch):
    real = step_mod.closed_by_gamma_pairs

    def off_by_one(state, gamma):
        out = real(state, gamma)
        edges = out.edge_list()
        if edges:
            out.discard(*edges[-1])
        return out

    monkeypatch.setattr(step_mod, "closed_by_gamma_pairs", off_by_one)
    s = build_schedule(12, {"steps": 2, "p": 0.5})
    st = GraphState.initial(EdgeSet.complete(12))
    new, smp = step_mod.advance(st, s, StepRandom(1, 0, 1))
    res = oracle_step(st, s, smp, new)
    assert not res
    assert res.divergence == "closed2"
    assert len(res.witness["missing"]) == 1


def test_oracle_size_cap():
    s = build_schedule(65, {"steps": 1})
    st = GraphState.initial(EdgeSet(65))
    _, smp = step_mod.advance(st, s, StepRandom(0, 0, 1))
    with pytest.raises(ValueError):
        oracle_step(st, s, smp)


def test_triangle_count_examples():
    assert triangle_count(EdgeSet.complete(3)) == 1
    assert triangle_count(EdgeSet.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])) == 0
    assert triangle_count(EdgeSet(4)) == 0


def test_triangle_count_brute():
    for seed in range(10):
        G = random_edges(12, 0.5, seed)
        d = G.to_dense()
        want = sum(1 for a, b, c in combinations(range(12), 3) if d[a, b] and d[a, c] and d[b, c])
        assert triangle_count(G) == want


def test_independence_examples():
    assert independence_exact(EdgeSet(7))[0] == 7
    assert independence_exact(EdgeSet.complete(7))[0] == 1
    alpha, witness = independence_exact(EdgeSet.from_edges(10, PETERSEN))
    assert alpha == 4 and len(witness) == 4
    with pytest.raises(ValueError):
        independence_exact(EdgeSet(61))


def test_independence_petersen_subset_scan():
    G = EdgeSet.from_edges(10, PETERSEN)
    d = G.to_dense()
    best = max(len(S) for k in range(11) for S in combinations(range(10), k) if not d[np.ix_(S, S)].any())
    assert best == 4


def test_witness_rate_examples():
    assert independence_witness_rate(EdgeSet(20), 5, 200)["rate"] == 1.0
    assert independence_witness_rate(EdgeSet.complete(20), 2, 200)["rate"] == 0.0


def test_equalization_p_zero():
    s = build_schedule(30, {"steps": 3, "p": 0.0})
    st = GraphState.initial(EdgeSet.complete(30))
    res = equalization_test(st, s, (0, 1), trials=10_000)
    assert res["frequency"] == 1.0 and res["target"] == 1.0 and res["pass"]


def test_equalization_above_threshold():
    n = 20
    s = build_schedule(n, {"steps": 3, "sigma": 0.01})
    st = random_state(n, 1, p_open=0.5, p_taken=0.5)
    u, v = st.open.edge_list()[0]
    y, _ = mixed_codegree(st, u, v)
    assert y > s.threshold(0)
    res = equalization_test(st, s, (u, v), trials=10_000, seed=4)
    assert res["p_hat"] == 0.0
    assert res["target"] == pytest.approx((1 - s.p) ** y)


def test_equalization_generic_state():
    n = 100
    s = build_schedule(n, {"steps": 20})
    st = random_state(n, 5, p_open=0.3, p_taken=0.05)
    edges = st.open.edge_list()
    res = [equalization_test(st, s, edges[k], trials=100_000, seed=k) for k in range(0, len(edges), len(edges) // 10)]
    assert sum(r["pass"] for r in res) >= len(res) - 1


def test_edge_density_synthetic():
    n = 200
    O0 = EdgeSet.complete(n)
    G = random_edges(n, 0.3, 11)
    res = edge_density_test(G, O0, 40, 0.5, 50, seed=1)
    assert res["sampled"] == 50
    assert np.mean(res["ratios"]) == pytest.approx(0.3, abs=0.02)
    assert res["fraction_inside"] == 1.0
    res = edge_density_test(EdgeSet(n), O0, 40, 0.5, 20, seed=1)
    assert res["ratios"] == [0.0] * 20


def test_handshake_examples():
    K = EdgeSet.complete(40)
    res = handshake_check(K, 10, 10, 50)
    assert res["ratio"] == 1.0
    res = handshake_check(K, 5, 20, 50)
    assert res["density_full"] == 1.0 and res["density_sub_mean"] == 1.0
    res = handshake_check(random_edges(200, 0.4, 3), 15, 60, 10_000, seed=2)
    assert res["pass"]
