"""Independent checks on runs: from-the-definitions step oracle, triangle and
independence-number computations, and statistical tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels, rng
from .graph import EdgeSet, GraphState
from .params import ParamSchedule
from .report import FAIL, PASS, REPORT, AuditReport
from .run import count_between, sample_disjoint_pair, sample_family
from .step import StepSample

ORACLE_MAX_N = 64
EXACT_ALPHA_MAX_N = 60


# -- step oracle -------------------------------------------------------------


@dataclass
class OracleResult:
    ok: bool
    divergence: str | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


def _pairset(es: EdgeSet) -> set[tuple[int, int]]:
    return set(es.edge_list())


def _e(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def oracle_step(state: GraphState, sched: ParamSchedule, sample: StepSample, new_state: GraphState | None = None) -> OracleResult:
    """Recompute one step from the definitions with naive set scans and compare.

    The random draws are regenerated from ``sample.key``; every derived set
    is rebuilt by exhaustive loops over vertex pairs and triples.
    """
    n = state.n
    if n > ORACLE_MAX_N:
        raise ValueError(f"oracle is cubic; n={n} exceeds {ORACLE_MAX_N}")
    i = state.step
    O, E, F = _pairset(state.open), _pairset(state.taken), _pairset(state.kept)
    seed, round_, step = sample.key
    if step != i + 1 or sample.step != i + 1:
        return OracleResult(False, "step-index", (i, sample.step, step))

    total = n * (n - 1) // 2
    ug = rng.pair_uniforms(seed, round_, step, rng.GAMMA, total)
    us_ = rng.pair_uniforms(seed, round_, step, rng.STABILIZATION, total)

    def idx(u, v):
        return u * n - u * (u + 1) // 2 + (v - u - 1)

    gamma = {e for e in O if ug[idx(*e)] < sched.p}

    def Y(u, v):
        out = set()
        for w in range(n):
            if w in (u, v):
                continue
            if _e(u, w) in O and _e(v, w) in E:
                out.add(_e(u, w))
            if _e(v, w) in O and _e(u, w) in E:
                out.add(_e(v, w))
        return out

    thr = 2.0 * sched.q[i] * (sched.pi[i] + math.sqrt(sched.sigma)) * math.sqrt(n)
    Ys = {e: Y(*e) for e in O}
    stab = set()
    for e in O:
        expo = max(thr - len(Ys[e]), 0.0)
        p_hat = 1.0 - (1.0 - sched.p) ** expo
        if us_[idx(*e)] < p_hat:
            stab.add(e)

    bad = []
    for u, v, w in combinations(range(n), 3):
        tri = [(u, v), (u, w), (v, w)]
        inside = [t in gamma for t in tri]
        if all(inside):
            bad.append(tuple(tri))
        for k in range(3):
            # the edge opposite to one vertex is kept, the other two are in gamma
            others = [tri[j] for j in range(3) if j != k]
            if tri[k] in F and inside[(k + 1) % 3] and inside[(k + 2) % 3]:
                bad.append(tuple(sorted(others)))
    bad.sort()
    repaired, used = [], set()
    for el in bad:
        if not used.intersection(el):
            repaired.append(el)
            used.update(el)

    c1 = {f for f in O if Ys[f] & gamma}
    c2 = set()
    for u, v in O:
        for w in range(n):
            if w not in (u, v) and _e(u, w) in gamma and _e(v, w) in gamma:
                c2.add((u, v))
                break

    new_O = O - (gamma | c1 | stab | c2)
    new_E = E | gamma
    new_F = F | (gamma - used)

    def diff(name, want, got):
        if want != got:
            extra = sorted(set(got) - set(want))[:3]
            missing = sorted(set(want) - set(got))[:3]
            return OracleResult(False, name, {"unexpected": extra, "missing": missing})
        return None

    checks = [
        ("gamma", gamma, _pairset(sample.gamma)),
        ("bad", bad, list(sample.bad)),
        ("repaired", repaired, list(sample.repaired)),
        ("closed1", c1, _pairset(sample.closed1)),
        ("closed2", c2, _pairset(sample.closed2)),
        ("stabilized", stab, _pairset(sample.stabilized)),
    ]
    if new_state is not None:
        checks += [
            ("open", new_O, _pairset(new_state.open)),
            ("taken", new_E, _pairset(new_state.taken)),
            ("kept", new_F, _pairset(new_state.kept)),
        ]
    for name, want, got in checks:
        res = diff(name, want, got)
        if res is not None:
            return res
    return OracleResult(True)


# -- graph invariants --------------------------------------------------------


def triangle_count(G: EdgeSet) -> int:
    us, vs = G.edges()
    if us.size == 0:
        return 0
    return int(kernels.pair_popcounts(G.bits, G.bits, us, vs).sum()) // 3


def independence_exact(G: EdgeSet) -> tuple[int, list[int]]:
    """Independence number and a maximum independent set (n <= 60)."""
    if G.n > EXACT_ALPHA_MAX_N:
        raise ValueError(f"exact independence number capped at n={EXACT_ALPHA_MAX_N}, got {G.n}")
    best = kernels.max_independent_set(np.ascontiguousarray(G.bits[:, :1]), G.n)
    return len(best), best


def independence_witness_rate(G: EdgeSet, m: int, samples: int, seed: int = 0) -> dict:
    """Fraction of uniformly random m-sets spanning no edge, with its standard error."""
    if not 0 < m <= G.n:
        raise ValueError("need 0 < m <= n")
    g = rng.generator(seed, rng.VERIFY, 1)
    dense = G.to_dense()
    hits = 0
    for _ in range(samples):
        S = g.choice(G.n, size=m, replace=False)
        if not dense[np.ix_(S, S)].any():
            hits += 1
    rate = hits / samples
    return {"m": m, "samples": samples, "rate": rate, "se": math.sqrt(rate * (1 - rate) / samples)}


def packing_report(host: EdgeSet, graphs: list[EdgeSet], leftover: EdgeSet) -> AuditReport:
    """Hard checks: every G_i triangle-free and inside the host; graphs, leftover partition the host."""
    report = AuditReport()
    union = EdgeSet(host.n)
    total = 0
    overlaps = []
    for k, G in enumerate(graphs):
        tri = triangle_count(G)
        report.add("triangle-free", f"G_{k}", "0 triangles", tri, PASS if tri == 0 else FAIL)
        inside = G.issubset(host)
        report.add("subgraph-of-host", f"G_{k}", "G_i subset of H", inside, PASS if inside else FAIL)
        if not union.isdisjoint(G):
            overlaps.append(k)
        union = union | G
        total += len(G)
    report.add("pairwise-disjoint", "all", "no shared edges", overlaps or 0, PASS if not overlaps else FAIL,
               witnesses=overlaps or None)
    left_ok = leftover.isdisjoint(union) and (union | leftover) == host
    report.add("partition", "host", "graphs + leftover = host", left_ok, PASS if left_ok else FAIL)
    counts_ok = total + len(leftover) == len(host)
    report.add("edge-accounting", "host", f"sum e(G_i) + e(leftover) = {len(host)}", total + len(leftover),
               PASS if counts_ok else FAIL)
    return report


# -- statistical tests -------------------------------------------------------


def equalization_target(sched: ParamSchedule, i: int, y: int) -> float:
    expo = max(sched.threshold(i), float(y))
    return (1.0 - sched.p) ** expo


def equalization_test(state: GraphState, sched: ParamSchedule, edge: tuple[int, int], trials: int = 100_000, seed: int = 0) -> dict:
    """Survival frequency of ``edge`` against closure in one step, versus (1-p)^max(threshold, |Y_e|).

    Each trial draws fresh nibble indicators for the edges of Y_e (a nibble
    hit on any of them closes e) and a fresh stabilization indicator for e.
    Pass iff the deviation is within 4 binomial standard errors.
    """
    from .graph import mixed_codegree
    from .params import stabilization_prob

    u, v = edge
    if edge not in state.open:
        raise ValueError(f"{edge} is not open")
    i = state.step
    y, _ = mixed_codegree(state, u, v)
    p_hat = stabilization_prob(sched, i, y)
    g = rng.generator(seed, rng.VERIFY, 2, u, v)
    survive = np.ones(trials, dtype=bool)
    if y and sched.p > 0:
        # number of nibble hits among the y co-edges per trial
        hits = g.binomial(y, sched.p, size=trials)
        survive &= hits == 0
    survive &= g.random(trials) >= p_hat
    freq = float(survive.mean())
    target = equalization_target(sched, i, y)
    se = math.sqrt(target * (1 - target) / trials)
    diff = abs(freq - target)
    ok = diff <= 4 * se if se > 0 else diff == 0
    return {
        "edge": [u, v],
        "step": i,
        "y": int(y),
        "threshold": sched.threshold(i),
        "p_hat": p_hat,
        "frequency": freq,
        "target": target,
        "se": se,
        "pass": bool(ok),
    }


def edge_density_test(G: EdgeSet, O0: EdgeSet, s: int, delta: float, samples: int, seed: int = 0, gamma: float = 0.0) -> dict:
    """Ratios |G(A,B)| / |O_0(A,B)| on random (A, B) with |A| = |B| = s and host density >= gamma,
    against the band (1 +- delta) rho_emp where rho_emp = |G| / |O_0|.
    """
    if 2 * s > G.n:
        raise ValueError("s exceeds n/2")
    g = rng.generator(seed, rng.VERIFY, 3)
    rho_emp = len(G) / len(O0) if len(O0) else 0.0
    family, tries = sample_family(O0, s, gamma, samples, g)
    ratios = np.array([count_between(G, A, B) / base for A, B, base in family if base > 0])
    lo, hi = (1 - delta) * rho_emp, (1 + delta) * rho_emp
    inside = float(((ratios >= lo) & (ratios <= hi)).mean()) if ratios.size else float("nan")
    hist, edges = np.histogram(ratios, bins=10) if ratios.size else (np.array([]), np.array([]))
    return {
        "s": s,
        "delta": delta,
        "rho_emp": rho_emp,
        "band": [lo, hi],
        "sampled": int(ratios.size),
        "tries": tries,
        "fraction_inside": inside,
        "ratios": ratios.tolist(),
        "histogram": {"counts": hist.tolist(), "edges": edges.tolist()},
    }


def handshake_check(host: EdgeSet, t: int, s: int, samples: int, seed: int = 0) -> dict:
    """Average of e(A', B') / t^2 over random t-subsets of a fixed random (A, B) of size s,
    compared with e(A, B) / s^2.
    """
    n = host.n
    if not 0 < t <= s or 2 * s > n:
        raise ValueError("need 0 < t <= s <= n/2")
    g = rng.generator(seed, rng.VERIFY, 4)
    A, B = sample_disjoint_pair(g, n, s)
    full = count_between(host, A, B) / (s * s)
    vals = np.empty(samples)
    for k in range(samples):
        a = np.sort(g.choice(A, size=t, replace=False))
        b = np.sort(g.choice(B, size=t, replace=False))
        vals[k] = count_between(host, a, b) / (t * t)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    diff = abs(mean - full)
    ok = diff <= 4 * se if se > 0 else diff <= 1e-12
    return {
        "t": t,
        "s": s,
        "samples": samples,
        "density_full": full,
        "density_sub_mean": mean,
        "ratio": mean / full if full else float("nan"),
        "se": se,
        "pass": bool(ok),
    }


def uniformity_check(host: EdgeSet, t: int, xi: float, samples: int, seed: int = 0) -> dict:
    """Sampled minimum of e_H(A, B) / |A||B| over disjoint t-sets, against xi."""
    g = rng.generator(seed, rng.VERIFY, 5)
    t = min(t, host.n // 2)
    worst = math.inf
    for _ in range(samples):
        A, B = sample_disjoint_pair(g, host.n, t)
        worst = min(worst, count_between(host, A, B) / (t * t))
    return {"t": t, "xi": xi, "samples": samples, "min_density": worst, "holds": bool(worst >= xi)}


def verify_pack_dir(path) -> AuditReport:
    """Re-check a packing output directory from its files alone."""
    from .packing import edge_digest, read_pack_dir

    meta, graphs, leftover = read_pack_dir(path)
    n = leftover.n
    report = AuditReport(seeds={"pack": meta.get("seed")})
    bad_n = [k for k, G in enumerate(graphs) if G.n != n]
    report.add("vertex-count", "files", f"all files on n={n}", bad_n or n, PASS if not bad_n else FAIL)
    if bad_n:
        return report
    union = EdgeSet(n)
    overlaps, total = [], 0
    for k, G in enumerate(graphs):
        tri = triangle_count(G)
        report.add("triangle-free", f"G_{k}", "0 triangles", tri, PASS if tri == 0 else FAIL)
        if not union.isdisjoint(G):
            overlaps.append(k)
        union = union | G
        total += len(G)
    report.add("pairwise-disjoint", "all", "no shared edges", overlaps or 0, PASS if not overlaps else FAIL,
               witnesses=overlaps or None)
    host_edges = meta["host_edges"]
    disjoint_left = union.isdisjoint(leftover)
    report.add("leftover-disjoint", "leftover", "leftover shares no edge with any G_i", disjoint_left,
               PASS if disjoint_left else FAIL)
    report.add("edge-accounting", "host", f"sum e(G_i) + e(leftover) = {host_edges}", total + len(leftover),
               PASS if total + len(leftover) == host_edges else FAIL)
    if "host_digest" in meta:
        same = edge_digest(union | leftover) == meta["host_digest"]
        report.add("partition", "host", "union of G_i and leftover equals recorded host", same,
                   PASS if same else FAIL)
    rounds = meta.get("per_round", [])
    mism = [r["round"] for r, G in zip(rounds, graphs)
            if r["edges"] != len(G) or r["host_before"] - r["host_after"] != len(G)]
    report.add("round-accounting", "per_round", "e(G_i) = e(H_i) - e(H_{i+1})", mism or 0,
               PASS if not mism and len(rounds) == len(graphs) else FAIL)
    cov = meta.get("coverage")
    report.add("coverage", "host", "covered / host edges", cov, REPORT)
    return report


def summarize(report: AuditReport) -> str:
    return report.summary()


__all__ = [
    "OracleResult",
    "oracle_step",
    "triangle_count",
    "independence_exact",
    "independence_witness_rate",
    "packing_report",
    "equalization_test",
    "edge_density_test",
    "handshake_check",
    "uniformity_check",
    "verify_pack_dir",
    "REPORT",
]
