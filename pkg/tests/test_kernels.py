import numpy as np
import pytest

from conftest import random_edges
from nibblepack import _fallback, kernels

try:
    from nibblepack import _kernels
except ImportError:
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="extension not built")


def brute_alpha(es):
    d = es.to_dense()
    n = es.n
    best = 0
    for mask in range(1 << n):
        vs = [v for v in range(n) if mask >> v & 1]
        if len(vs) > best and not d[np.ix_(vs, vs)].any():
            best = len(vs)
    return best


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@needs_ext
@pytest.mark.parametrize("n", [5, 63, 64, 65, 128, 129])
def test_backends_agree(n):
    O = random_edges(n, 0.5, n)
    E = random_edges(n, 0.2, n + 1)
    us, vs = O.edges()
    fu, fv = _fallback.upper_edges(O.bits, n)
    cu, cv = _kernels.upper_edges(O.bits, n)
    np.testing.assert_array_equal(fu, cu)
    np.testing.assert_array_equal(fv, cv)
    np.testing.assert_array_equal(_fallback.pair_popcounts(O.bits, E.bits, us, vs),
                                  _kernels.pair_popcounts(O.bits, E.bits, us, vs))
    np.testing.assert_array_equal(_fallback.mixed_pair_counts(O.bits, E.bits, us, vs),
                                  _kernels.mixed_pair_counts(O.bits, E.bits, us, vs))
    for both in (False, True):
        assert _fallback.max_pair_popcount(O.bits, E.bits, n, both) == _kernels.max_pair_popcount(O.bits, E.bits, n, both)


@needs_ext
def test_mis_backends_agree():
    for seed in range(30):
        n = 10 + seed % 50
        G = random_edges(n, 0.3, seed)
        b = np.ascontiguousarray(G.bits[:, :1])
        assert len(_fallback.max_independent_set(b, n)) == len(_kernels.max_independent_set(b, n))


@pytest.mark.parametrize("impl", [_fallback] + ([_kernels] if _kernels else []))
def test_mis_vs_subset_scan(impl):
    for seed in range(100):
        n = 4 + seed % 13
        G = random_edges(n, 0.4, 1000 + seed)
        best = impl.max_independent_set(np.ascontiguousarray(G.bits[:, :1]), n)
        d = G.to_dense()
        assert not d[np.ix_(best, best)].any()
        assert len(best) == brute_alpha(G)


def test_upper_edges_order():
    G = random_edges(70, 0.3, 5)
    us, vs = kernels.upper_edges(G.bits, 70)
    pairs = list(zip(us.tolist(), vs.tolist()))
    assert pairs == sorted(pairs) and all(u < v for u, v in pairs)


def test_pure_fallback_same_run():
    import subprocess
    import sys

    code = ("from nibblepack import kernels, EdgeSet, build_schedule, run; "
            "s = build_schedule(150, {'steps': 6, 'p': 0.05}); "
            "r = run(EdgeSet.complete(150), s, 11); "
            "print(kernels.BACKEND, r.graph.edge_list()[:50], [t.max_codegree for t in r.trajectories])")
    outs = {}
    for pure in ("1", "0"):
        env = dict(__import__("os").environ, NIBBLEPACK_PURE=pure)
        res = subprocess.run([sys.executable, "-W", "ignore", "-c", code], capture_output=True, text=True, env=env, check=True)
        backend, rest = res.stdout.split(" ", 1)
        outs[backend] = rest
    assert "python" in outs
    if len(outs) == 2:
        assert outs["python"] == outs["cython"]
