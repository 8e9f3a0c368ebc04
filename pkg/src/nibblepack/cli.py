"""Command-line front end.

    nibblepack --mode params --n 100000
    nibblepack --mode nibble --host complete --n 500 --seed 1 --override steps=39 --out run500
    nibblepack --mode pack --host complete --n 200 --eps 0.5 --seed 7 --override steps=40 --out pack200
    nibblepack --mode verify --in pack200

Exit codes: 0 success, 1 hard check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io, rng
from .graph import EdgeListError, EdgeSet, check_state_soundness, format_edge_list, read_edge_list
from .params import ScheduleError, build_schedule
from .run import TRAJECTORY_COLUMNS, AuditInfeasible, audit_events, run
from .packing import pack, srk3_demo, write_pack_dir
from .verify import handshake_check, packing_report, triangle_count, verify_pack_dir

MODES = ("params", "nibble", "pack", "srk3", "verify", "handshake")
INT_KEYS = {"steps", "s", "rounds"}


class UsageError(Exception):
    pass


def parse_overrides(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise UsageError(f"bad --override {item!r}, expected key=value")
        try:
            num = float(val)
        except ValueError:
            raise UsageError(f"bad --override value {val!r} for {key}") from None
        if key in INT_KEYS:
            if num != int(num):
                raise UsageError(f"--override {key} needs an integer")
            num = int(num)
        out[key] = num
    return out


def load_host(desc: str, n: int | None, seed: int) -> EdgeSet:
    """``complete``, ``gnp:<p>`` (seeded) or ``file:<path>``."""
    if desc.startswith("file:"):
        try:
            host = read_edge_list(desc[5:])
        except EdgeListError as exc:
            raise UsageError(str(exc)) from None
        except OSError as exc:
            raise UsageError(f"cannot read host file: {exc}") from None
        if n is not None and n != host.n:
            raise UsageError(f"--n {n} disagrees with host file (n {host.n})")
        return host
    if n is None:
        raise UsageError(f"--host {desc} needs --n")
    if n < 1:
        raise UsageError("--n must be positive")
    if desc == "complete":
        return EdgeSet.complete(n)
    if desc.startswith("gnp:"):
        try:
            p = float(desc[4:])
        except ValueError:
            raise UsageError(f"bad edge probability in {desc!r}") from None
        if not 0 <= p <= 1:
            raise UsageError("gnp probability must lie in [0, 1]")
        us, vs = np.triu_indices(n, 1)
        u = rng.pair_uniforms(seed, 0, 0, rng.HOST, us.size)
        keep = u < p
        return EdgeSet.from_arrays(n, us[keep], vs[keep])
    raise UsageError(f"unknown host {desc!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nibblepack", description="Triangle-free nibble and packing experiments.")
    ap.add_argument("--mode", required=True, choices=MODES)
    ap.add_argument("--n", type=int)
    ap.add_argument("--eps", type=float, default=0.5)
    ap.add_argument("--xi", type=float, default=1.0)
    ap.add_argument("--C0", type=float, default=1.0)
    ap.add_argument("--A", type=float, default=1.0)
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    ap.add_argument("--host", default="complete")
    ap.add_argument("--out")
    ap.add_argument("--in", dest="in_dir")
    ap.add_argument("--audit-budget", type=int, default=30)
    ap.add_argument("--retain-samples", action="store_true")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--trace", action="store_true", help="write per-step counts as JSON lines")
    ap.add_argument("--t", type=int, help="handshake: subset size")
    ap.add_argument("--s", type=int, help="handshake: set size")
    ap.add_argument("--samples", type=int, default=10_000)
    return ap


def _schedule(n, overrides, **extra):
    ov = dict(overrides)
    ov.update({k: v for k, v in extra.items() if v is not None})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_schedule(n, ov)


def mode_params(args, ov) -> int:
    if args.n is None:
        raise UsageError("--mode params needs --n")
    sched = _schedule(args.n, ov)
    text = json.dumps(sched.header(), sort_keys=True) + "\n"
    text += io.csv_text(("i", "q_i", "pi_i", "tau_i"), [(i, repr(q), repr(p), repr(t)) for i, q, p, t in sched.rows()])
    if args.out:
        io.atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def mode_nibble(args, ov, seed, threads) -> int:
    host = load_host(args.host, args.n, seed)
    sched = _schedule(host.n, ov, eps=args.eps, xi=args.xi, C0=args.C0)
    steps = []
    retain = args.retain_samples
    res = run(host, sched, seed, threads=threads, retain_samples=retain, retain_states=retain,
              trace=steps.append if args.trace else None)
    tri = triangle_count(res.graph)
    ok = tri == 0 and res.graph.issubset(host)
    meta = {"seed": seed, "host": args.host, "schedule": sched.header(), "edges": len(res.graph),
            "triangles": tri, "host_edges": len(host)}
    audit = None
    if retain:
        final = check_state_soundness(res.states[-1], host)
        ok = ok and not final
        try:
            rep = audit_events(res.states, [s.gamma for s in res.samples], sched, args.audit_budget, seed, host)
            audit = rep.to_dict()
            ok = ok and rep.hard_ok
        except AuditInfeasible as exc:
            audit = {"infeasible": str(exc)}
    meta["hard_ok"] = ok
    if args.out:
        with io.staged_directory(args.out) as stage:
            stage = Path(stage)
            (stage / "G.edges").write_text(format_edge_list(res.graph))
            (stage / "trajectories.csv").write_text(io.csv_text(TRAJECTORY_COLUMNS, [r.row() for r in res.trajectories]))
            (stage / "run.json").write_text(io.dumps_json(meta))
            if audit is not None:
                (stage / "audit.json").write_text(io.dumps_json(audit))
            if args.trace:
                (stage / "steps.jsonl").write_text("".join(json.dumps(c, sort_keys=True) + "\n" for c in steps))
    else:
        sys.stdout.write(io.dumps_json(meta))
    print(f"seed={seed} n={host.n} steps={sched.steps} kept={len(res.graph)} triangles={tri}", file=sys.stderr)
    return 0 if ok else 1


def mode_pack(args, ov, seed, threads) -> int:
    host = load_host(args.host, args.n, seed)
    steps = []

    def trace(c, _rounds=steps):
        _rounds.append(c)

    res = pack(host, args.eps, args.xi, args.C0, seed, ov, threads=threads, audit_budget=args.audit_budget,
               trace=trace if args.trace else None)
    rep = packing_report(host, res.graphs, res.leftover)
    extra = {"host": args.host, "hard_ok": rep.hard_ok}
    if args.out:
        write_pack_dir(res, args.out, host, extra)
        if args.trace:
            io.atomic_write_text(Path(args.out) / "steps.jsonl",
                                 "".join(json.dumps(c, sort_keys=True) + "\n" for c in steps))
    print(f"seed={seed} rounds={len(res.graphs)} coverage={res.coverage:.6f} "
          f"covered={res.covered_edges}/{res.host_edges}", file=sys.stderr)
    if not rep.hard_ok:
        print(rep.summary(), file=sys.stderr)
    return 0 if rep.hard_ok else 1


def mode_srk3(args, ov, seed, threads) -> int:
    res, report = srk3_demo(args.r, args.A, seed, ov, threads=threads)
    N = report["N_r"]
    rep = packing_report(EdgeSet.complete(N), res.graphs, EdgeSet.complete(N) - _union(res.graphs, N))
    report["seed"] = seed
    report["hard_ok"] = rep.hard_ok
    if args.out:
        write_pack_dir(res, args.out, EdgeSet.complete(N), {"host": "complete", "srk3": report, "hard_ok": rep.hard_ok})
    else:
        sys.stdout.write(io.dumps_json(report))
    for row in report["graphs"]:
        alpha = row["alpha"] if row["exact"] else f"witness rate {row['witness_rate']:.4g} at m={row['m']}"
        print(f"G_{row['graph']}: edges={row['edges']} triangles={row['triangles']} alpha={alpha} "
              f"target={row['target']}", file=sys.stderr)
    return 0 if rep.hard_ok else 1


def _union(graphs, n):
    u = EdgeSet(n)
    for G in graphs:
        u = u | G
    return u


def mode_verify(args) -> int:
    if not args.in_dir:
        raise UsageError("--mode verify needs --in")
    if not (Path(args.in_dir) / "packing.json").exists():
        raise UsageError(f"{args.in_dir} has no packing.json")
    try:
        rep = verify_pack_dir(args.in_dir)
    except EdgeListError as exc:
        raise UsageError(str(exc)) from None
    text = io.dumps_json(rep.to_dict())
    if args.out:
        io.atomic_write_text(args.out, text)
        print(rep.summary())
    else:
        sys.stdout.write(text)
        print(rep.summary(), file=sys.stderr)
    return 0 if rep.hard_ok else 1


def mode_handshake(args, seed) -> int:
    host = load_host(args.host, args.n, seed)
    s = args.s if args.s is not None else host.n // 2
    t = args.t if args.t is not None else max(1, s // 2)
    if not 0 < t <= s <= host.n // 2:
        raise UsageError("need 0 < t <= s <= n/2")
    res = handshake_check(host, t, s, args.samples, seed)
    res["seed"] = seed
    text = io.dumps_json(res)
    if args.out:
        io.atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ov = parse_overrides(args.override)
        seed = args.seed if args.seed is not None else rng.fresh_seed()
        if seed < 0:
            raise UsageError("--seed must be nonnegative")
        threads = args.threads if args.threads is not None else rng.default_threads()
        if threads < 1:
            raise UsageError("--threads must be >= 1")
        if args.mode == "params":
            return mode_params(args, ov)
        if args.mode == "nibble":
            return mode_nibble(args, ov, seed, threads)
        if args.mode == "pack":
            return mode_pack(args, ov, seed, threads)
        if args.mode == "srk3":
            return mode_srk3(args, ov, seed, threads)
        if args.mode == "verify":
            return mode_verify(args)
        return mode_handshake(args, seed)
    except (UsageError, ScheduleError) as exc:
        print(f"nibblepack: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"nibblepack: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
