"""Iterated packing: peel triangle-free graphs off a host one round at a time."""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io, rng
from .graph import EdgeSet, format_edge_list, read_edge_list
from .params import build_schedule
from .run import TRAJECTORY_COLUMNS, TrajectoryRecord, count_between, run, sample_family
from .verify import independence_exact, independence_witness_rate, triangle_count, uniformity_check

# pack-level overrides, everything else goes to build_schedule
PACK_OVERRIDES = frozenset({"rounds"})


@dataclass
class PackingResult:
    graphs: list[EdgeSet]
    leftover: EdgeSet
    host_edges: int
    covered_edges: int
    coverage: float
    constants: dict
    per_round: list[dict]
    trajectories: list[list[TrajectoryRecord]] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    seed: int = 0

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "n": self.leftover.n,
            "rounds": len(self.graphs),
            "host_edges": self.host_edges,
            "covered_edges": self.covered_edges,
            "leftover_edges": len(self.leftover),
            "coverage": self.coverage,
            "constants": self.constants,
            "per_round": self.per_round,
            "diagnostics": self.diagnostics,
            "warnings": self.warnings,
        }


def edge_digest(es: EdgeSet) -> str:
    h = hashlib.sha256(f"n {es.n}\n".encode())
    h.update(np.ascontiguousarray(es.bits, dtype="<u8").tobytes())
    return h.hexdigest()


def _split_overrides(overrides):
    ov = dict(overrides or {})
    rounds = ov.pop("rounds", None)
    return ov, (int(rounds) if rounds is not None else None)


def pack(
    host: EdgeSet,
    eps: float = 0.5,
    xi: float = 1.0,
    C0: float = 1.0,
    seed: int = 0,
    overrides: dict | None = None,
    *,
    threads: int = 1,
    audit_budget: int = 30,
    record_maxima: bool = True,
    trace=None,
) -> PackingResult:
    """Peel off triangle-free graphs G_0, G_1, ... from ``host``.

    Round k runs the nibble on the current remainder H_k and sets
    H_{k+1} = H_k minus G_k. Stops after the outer round count (or the
    ``rounds`` override), or earlier after two consecutive empty rounds.
    """
    n = host.n
    host_edges = len(host)
    ov, rounds = _split_overrides(overrides)
    ov.update(eps=eps, xi=xi, C0=C0)
    with warnings.catch_warnings():
        # capping notes are kept in sched.warnings
        warnings.simplefilter("ignore")
        sched = build_schedule(n, ov)
    notes = list(sched.warnings)
    total_rounds = rounds if rounds is not None else sched.I_outer
    constants = sched.header()
    constants["rounds_planned"] = total_rounds

    if host_edges == 0:
        return PackingResult([], host.copy(), 0, 0, 1.0, constants, [], warnings=notes, seed=seed)

    g = rng.generator(seed, rng.AUDIT, 0)
    t = min(math.ceil(C0 * math.sqrt(n * math.log(n))), n // 2)
    diagnostics = {}
    if t >= 1:
        pre = uniformity_check(host, t, xi, audit_budget, seed)
        diagnostics["uniformity"] = pre
        if not pre["holds"]:
            msg = f"sampled host density {pre['min_density']:.4g} < xi={xi} at set size {t}"
            notes.append(msg)
            warnings.warn(msg, stacklevel=2)

    family = []
    if 0 < sched.s <= n // 2:
        family, _ = sample_family(host, sched.s, sched.gamma, audit_budget, g)
    base = np.array([b for _, _, b in family], dtype=float)
    invariant = []

    def track(k, H):
        if not family:
            return
        ratios = np.array([count_between(H, A, B) for A, B, _ in family]) / base
        lo = (1 - (1 + sched.delta) * sched.rho) ** k
        hi = (1 - (1 - sched.delta) * sched.rho) ** k
        invariant.append({
            "round": k,
            "min_ratio": float(ratios.min()),
            "max_ratio": float(ratios.max()),
            "bracket": [lo, hi],
            "within": bool(ratios.min() >= lo and ratios.max() <= hi),
        })

    H = host.copy()
    graphs, per_round, trajs = [], [], []
    covered = 0
    empty_streak = 0
    track(0, H)
    for k in range(total_rounds):
        step_trace = (lambda c, k=k: trace({**c, "round": k})) if trace is not None else None
        res = run(H, sched, seed, k, threads=threads, record_maxima=record_maxima, trace=step_trace)
        G = res.graph
        before = len(H)
        H = H - G
        graphs.append(G)
        trajs.append(res.trajectories)
        covered += len(G)
        per_round.append({"round": k, "edges": len(G), "host_before": before, "host_after": len(H),
                          "coverage": covered / host_edges})
        track(k + 1, H)
        empty_streak = empty_streak + 1 if len(G) == 0 else 0
        if empty_streak >= 2:
            notes.append(f"stopped after round {k}: two consecutive empty rounds")
            break
    diagnostics["invariant"] = invariant
    diagnostics["family_size"] = len(family)
    return PackingResult(graphs, H, host_edges, covered, covered / host_edges, constants, per_round,
                         trajs, diagnostics, notes, seed)


def pack_complete(n: int, eps: float = 0.5, seed: int = 0, overrides: dict | None = None, **kw) -> PackingResult:
    return pack(EdgeSet.complete(n), eps, 1.0, 1.0, seed, overrides, **kw)


def srk3_size(r: int, A: float) -> int:
    return math.floor(A * r * r * math.log(r))


def srk3_demo(r: int, A: float, seed: int = 0, overrides: dict | None = None, *, samples: int = 2000, threads: int = 1):
    """r edge-disjoint triangle-free graphs on N_r = floor(A r^2 log r) vertices, with their
    independence numbers (exact up to 60 vertices, sampled beyond) against floor(N_r / r).
    """
    if r < 2:
        raise ValueError("need r >= 2")
    if A <= 0:
        raise ValueError("need A > 0")
    N = srk3_size(r, A)
    if N < 3:
        raise ValueError(f"N_r = {N} < 3; increase A")
    ov, _ = _split_overrides(overrides)
    ov["rounds"] = r
    res = pack(EdgeSet.complete(N), 0.5, 1.0, 1.0, seed, ov, threads=threads, record_maxima=False)
    # pack stops early on empty rounds; pad so exactly r graphs are reported
    left = len(res.leftover)
    while len(res.graphs) < r:
        res.per_round.append({"round": len(res.graphs), "edges": 0, "host_before": left, "host_after": left,
                              "coverage": res.coverage})
        res.graphs.append(EdgeSet(N))
    target = N // r
    rows = []
    for k, G in enumerate(res.graphs):
        row = {"graph": k, "edges": len(G), "triangles": triangle_count(G), "target": target}
        if N <= 60:
            alpha, witness = independence_exact(G)
            row.update(alpha=alpha, exact=True, witness=witness, below_target=alpha < N / r)
        else:
            est = independence_witness_rate(G, max(2, target), samples, seed + k)
            row.update(alpha=None, exact=False, witness_rate=est["rate"], witness_se=est["se"], m=est["m"])
        rows.append(row)
    report = {"r": r, "A": A, "N_r": N, "target": target, "graphs": rows}
    return res, report


# -- directory export ----------------------------------------------------------


def write_pack_dir(result: PackingResult, out_dir, host: EdgeSet, extra: dict | None = None) -> None:
    """Write G_kkkk.edges, leftover.edges, packing.json and per-round trajectory CSVs atomically."""
    with io.staged_directory(out_dir) as stage:
        stage = Path(stage)
        for k, G in enumerate(result.graphs):
            (stage / f"G_{k:04d}.edges").write_text(format_edge_list(G))
        (stage / "leftover.edges").write_text(format_edge_list(result.leftover))
        for k, recs in enumerate(result.trajectories):
            (stage / f"trajectories_round_{k}.csv").write_text(
                io.csv_text(TRAJECTORY_COLUMNS, [rec.row() for rec in recs]))
        meta = result.summary()
        meta["host_digest"] = edge_digest(host)
        meta["graph_files"] = [f"G_{k:04d}.edges" for k in range(len(result.graphs))]
        if extra:
            meta.update(extra)
        (stage / "packing.json").write_text(io.dumps_json(meta))


def read_pack_dir(path):
    import json

    path = Path(path)
    meta = json.loads((path / "packing.json").read_text())
    files = meta.get("graph_files") or sorted(p.name for p in path.glob("G_*.edges"))
    graphs = [read_edge_list(path / f) for f in files]
    leftover = read_edge_list(path / "leftover.edges")
    return meta, graphs, leftover
