
import pytest

from conftest import random_edges
from nibblepack.graph import EdgeSet
from nibblepack.packing import pack, pack_complete, read_pack_dir, srk3_demo, srk3_size, write_pack_dir
from nibblepack.verify import packing_report, triangle_count, verify_pack_dir


def union(graphs, n):
    u = EdgeSet(n)
    for G in graphs:
        u = u | G
    return u


def check_partition(host, res):
    seen = EdgeSet(host.n)
    for G in res.graphs:
        assert seen.isdisjoint(G)
        assert triangle_count(G) == 0
        seen = seen | G
    assert seen.isdisjoint(res.leftover)
    assert seen | res.leftover == host
    assert res.covered_edges + len(res.leftover) == res.host_edges == len(host)


def test_empty_host():
    res = pack(EdgeSet(10))
    assert res.graphs == [] and res.coverage == 1.0


def test_p_zero_round():
    host = random_edges(30, 0.5, 1)
    res = pack(host, xi=0.3, overrides={"p": 0.0, "rounds": 1, "steps": 3})
    assert len(res.graphs) == 1 and len(res.graphs[0]) == 0
    assert res.leftover == host


def test_early_stop():
    res = pack(random_edges(30, 0.5, 1), xi=0.3, overrides={"p": 0.0, "rounds": 10, "steps": 2})
    assert len(res.graphs) == 2
    assert any("consecutive empty" in w for w in res.warnings)


def test_k500_partition():
    host = EdgeSet.complete(500)
    res = pack(host, 0.5, seed=3, overrides={"steps": 39, "rounds": 4}, record_maxima=False)
    check_partition(host, res)
    assert 0 < res.coverage < 1


def test_k3():
    res = pack_complete(3, seed=1, overrides={"p": 0.8, "steps": 4, "rounds": 6})
    check_partition(EdgeSet.complete(3), res)
    assert all(len(G) <= 2 for G in res.graphs)


def test_k100_disjoint_and_monotone():
    host = EdgeSet.complete(100)
    res = pack_complete(100, seed=2, overrides={"steps": 20, "rounds": 5})
    assert packing_report(host, res.graphs, res.leftover).hard_ok
    cov = [r["coverage"] for r in res.per_round]
    assert cov == sorted(cov)
    for r, G in zip(res.per_round, res.graphs):
        assert r["host_before"] - r["host_after"] == len(G) == r["edges"]


def test_invariant_diagnostic_logged():
    res = pack_complete(120, seed=2, overrides={"steps": 10, "rounds": 3, "s": 20})
    inv = res.diagnostics["invariant"]
    assert [d["round"] for d in inv] == [0, 1, 2, 3]
    assert inv[0]["min_ratio"] == inv[0]["max_ratio"] == 1.0


def test_uniformity_warning():
    host = random_edges(100, 0.2, 4)
    with pytest.warns(UserWarning, match="xi"):
        res = pack(host, xi=0.9, overrides={"steps": 2, "rounds": 1})
    assert not res.diagnostics["uniformity"]["holds"]


def test_srk3_small():
    # floor(2 * 4 * log 2) = 5
    assert srk3_size(2, 2.0) == 5
    res, rep = srk3_demo(2, 2.0, seed=1, overrides={"steps": 8, "p": 0.3, "sigma": 0.3})
    assert rep["N_r"] == 5 and rep["target"] == 2
    assert len(res.graphs) == 2
    assert res.graphs[0].isdisjoint(res.graphs[1])
    for row in rep["graphs"]:
        assert row["exact"] and row["triangles"] == 0 and isinstance(row["alpha"], int)


def test_srk3_r3_disjoint():
    res, rep = srk3_demo(3, 1.5, seed=4, overrides={"steps": 10, "p": 0.2, "sigma": 0.2})
    assert rep["target"] == rep["N_r"] // 3
    u = EdgeSet(rep["N_r"])
    for G in res.graphs:
        assert u.isdisjoint(G)
        u = u | G


def test_srk3_rejects():
    with pytest.raises(ValueError):
        srk3_demo(2, 1.0)
    with pytest.raises(ValueError):
        srk3_demo(1, 10.0)


def test_export_roundtrip(tmp_path):
    host = random_edges(60, 0.5, 7)
    res = pack(host, xi=0.3, seed=5, overrides={"steps": 10, "rounds": 3})
    out = tmp_path / "pk"
    write_pack_dir(res, out, host)
    meta, graphs, leftover = read_pack_dir(out)
    assert graphs == res.graphs and leftover == res.leftover
    assert meta["host_edges"] == len(host)
    assert (out / "trajectories_round_0.csv").read_text().splitlines()[0] == \
        "step,open,kept,taken,q_pred,pi_pred,max_deg_open,max_Y,max_Z"
    rep = verify_pack_dir(out)
    assert rep.hard_ok
    # tamper: move an edge from leftover into G_0 twice
    u, v = res.graphs[1].edge_list()[0]
    g0 = (out / "G_0000.edges").read_text() + f"{u} {v}\n"
    (out / "G_0000.edges").write_text(g0)
    bad = verify_pack_dir(out)
    assert not bad.hard_ok
    assert "pairwise-disjoint" in {c.name for c in bad.failures()}


def test_srk3_padded_export_verifies(tmp_path):
    res, rep = srk3_demo(3, 1.0, seed=0, overrides={"p": 0.0, "steps": 2})
    assert len(res.graphs) == 3 and len(res.per_round) == 3
    write_pack_dir(res, tmp_path / "s", EdgeSet.complete(rep["N_r"]))
    assert verify_pack_dir(tmp_path / "s").hard_ok
