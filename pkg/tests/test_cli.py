import json
import math

import pytest

from nibblepack.cli import load_host, main, parse_overrides, UsageError
from nibblepack.graph import EdgeSet


def read_tree(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_params_mode(capsys):
    assert main(["--mode", "params", "--n", "100000"]) == 0
    out = capsys.readouterr().out.splitlines()
    header = json.loads(out[0])
    assert header["n"] == 100000 and header["I"] == 2
    assert out[1] == "i,q_i,pi_i,tau_i"
    assert len(out) == 2 + header["I"] + 1
    assert float(out[2].split(",")[1]) == 1.0


def test_usage_errors(capsys):
    assert main(["--mode", "params"]) == 2
    assert main(["--mode", "params", "--n", "100", "--override", "steps"]) == 2
    assert main(["--mode", "params", "--n", "100", "--override", "nope=1"]) == 2
    assert main(["--mode", "pack", "--host", "weird", "--n", "5"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["--mode", "bogus"])
    assert info.value.code == 2


def test_bad_host_file(tmp_path, capsys):
    f = tmp_path / "h.edges"
    f.write_text("n 4\n0 1\n1 1\n")
    assert main(["--mode", "nibble", "--host", f"file:{f}", "--seed", "1"]) == 2
    assert "line 3" in capsys.readouterr().err


def test_load_host():
    assert len(load_host("complete", 5, 0)) == 10
    assert load_host("gnp:1.0", 30, 0) == EdgeSet.complete(30)
    G = load_host("gnp:0.3", 1000, 9)
    m = 1000 * 999 // 2
    assert abs(len(G) - 0.3 * m) <= 4 * math.sqrt(m * 0.3 * 0.7)
    with pytest.raises(UsageError):
        load_host("gnp:2", 5, 0)


def test_parse_overrides():
    assert parse_overrides(["steps=40", "p=0.1"]) == {"steps": 40, "p": 0.1}
    with pytest.raises(UsageError):
        parse_overrides(["steps=1.5"])


def test_nibble_mode(tmp_path):
    out = tmp_path / "run"
    code = main(["--mode", "nibble", "--n", "40", "--seed", "3", "--override", "steps=5", "--override", "s=8",
                 "--out", str(out), "--retain-samples", "--trace", "--audit-budget", "5"])
    assert code == 0
    assert {"G.edges", "trajectories.csv", "run.json", "audit.json", "steps.jsonl"} <= set(read_tree(out))
    assert len((out / "steps.jsonl").read_text().splitlines()) == 5
    meta = json.loads((out / "run.json").read_text())
    assert meta["seed"] == 3 and meta["triangles"] == 0


def test_seed_recorded_when_omitted(tmp_path):
    out = tmp_path / "run"
    assert main(["--mode", "nibble", "--n", "20", "--override", "steps=2", "--out", str(out)]) == 0
    assert isinstance(json.loads((out / "run.json").read_text())["seed"], int)


def test_pack_deterministic_and_verify(tmp_path):
    args = ["--mode", "pack", "--host", "complete", "--n", "200", "--eps", "0.5", "--seed", "7",
            "--override", "steps=40"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert read_tree(a) == read_tree(b)
    report = tmp_path / "audit.json"
    assert main(["--mode", "verify", "--in", str(a), "--out", str(report)]) == 0
    assert json.loads(report.read_text())["hard_ok"] is True


def test_threads_env(tmp_path, monkeypatch):
    args = ["--mode", "pack", "--host", "gnp:0.5", "--n", "120", "--xi", "0.3", "--seed", "2", "--override", "steps=10",
            "--override", "rounds=3"]
    a, b = tmp_path / "a", tmp_path / "b"
    monkeypatch.setenv("NIBBLEPACK_THREADS", "8")
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--threads", "1"]) == 0
    assert read_tree(a) == read_tree(b)


def test_verify_missing(tmp_path):
    assert main(["--mode", "verify", "--in", str(tmp_path)]) == 2


def test_srk3_and_handshake(tmp_path, capsys):
    assert main(["--mode", "srk3", "--r", "2", "--A", "2", "--seed", "1", "--override", "steps=6",
                 "--override", "p=0.3", "--override", "sigma=0.3", "--out", str(tmp_path / "s")]) == 0
    meta = json.loads((tmp_path / "s" / "packing.json").read_text())
    assert meta["srk3"]["N_r"] == 5
    capsys.readouterr()
    assert main(["--mode", "handshake", "--n", "50", "--t", "5", "--s", "5", "--samples", "10", "--seed", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["ratio"] == 1.0
