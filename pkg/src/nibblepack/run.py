"""Full I-step runs, per-step trajectory records and event audits."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import kernels, rng
from .graph import EdgeSet, GraphState, check_state_soundness, vertex_mask
from .params import ParamSchedule
from .report import FAIL, PASS, REPORT, AuditReport
from .step import StepSample, advance

TRAJECTORY_COLUMNS = ("step", "open", "kept", "taken", "q_pred", "pi_pred", "max_deg_open", "max_Y", "max_Z")


class AuditInfeasible(ValueError):
    pass


@dataclass
class TrajectoryRecord:
    step: int
    open_count: int
    kept_count: int
    taken_count: int
    predicted_open_fraction: float
    predicted_density: float
    max_open_degree: int
    max_mixed_codegree: int
    max_codegree: int

    def row(self) -> tuple:
        return (
            self.step,
            self.open_count,
            self.kept_count,
            self.taken_count,
            repr(self.predicted_open_fraction),
            repr(self.predicted_density),
            self.max_open_degree,
            self.max_mixed_codegree,
            self.max_codegree,
        )


@dataclass
class RunResult:
    graph: EdgeSet
    trajectories: list[TrajectoryRecord]
    samples: list[StepSample] | None = None
    states: list[GraphState] | None = None
    seed: int = 0
    round: int = 0
    step_counts: list[dict] = field(default_factory=list)


def pair_maxima(state: GraphState, which=("X", "Y", "Z")) -> dict[str, int]:
    """Maxima of |X_uv|, |Y_uv|, |Z_uv| over all pairs u != v."""
    O, E, n = state.open.bits, state.taken.bits, state.n
    out = {}
    if "X" in which:
        out["X"] = kernels.max_pair_popcount(O, O, n, False)
    if "Y" in which:
        out["Y"] = kernels.max_pair_popcount(O, E, n, True)
    if "Z" in which:
        out["Z"] = kernels.max_pair_popcount(E, E, n, False)
    return out


def trajectory_record(state: GraphState, sched: ParamSchedule, maxima: bool = True) -> TrajectoryRecord:
    i = state.step
    m = pair_maxima(state, ("Y", "Z")) if maxima else {"Y": -1, "Z": -1}
    deg = state.open.degrees()
    return TrajectoryRecord(
        step=i,
        open_count=len(state.open),
        kept_count=len(state.kept),
        taken_count=len(state.taken),
        predicted_open_fraction=float(sched.q[i]),
        predicted_density=float(sched.pi[i] / math.sqrt(sched.n)),
        max_open_degree=int(deg.max()) if deg.size else 0,
        max_mixed_codegree=m["Y"],
        max_codegree=m["Z"],
    )


def run(
    host: EdgeSet,
    sched: ParamSchedule,
    seed: int,
    round_: int = 0,
    *,
    retain_samples: bool = False,
    retain_states: bool = False,
    threads: int = 1,
    trace: Callable[[dict], None] | None = None,
    record_maxima: bool = True,
) -> RunResult:
    """Run all ``sched.steps`` steps on ``host``; the kept edges form the triangle-free output.

    With ``record_maxima=False`` the all-pairs codegree maxima in the
    trajectory records are skipped (reported as -1).
    """
    if host.n != sched.n:
        raise ValueError(f"host has {host.n} vertices, schedule expects {sched.n}")
    state = GraphState.initial(host)
    trajectories = [trajectory_record(state, sched, record_maxima)]
    samples = [] if retain_samples else None
    states = [state.copy()] if retain_states else None
    counts = []
    for i in range(sched.steps):
        rand = rng.StepRandom(seed, round_, i + 1, threads)
        state, sample = advance(state, sched, rand)
        trajectories.append(trajectory_record(state, sched, record_maxima))
        c = sample.counts()
        c.update(open=len(state.open), kept=len(state.kept))
        counts.append(c)
        if trace is not None:
            trace(c)
        if samples is not None:
            samples.append(sample)
        if states is not None:
            states.append(state.copy())
    return RunResult(state.kept, trajectories, samples, states, seed, round_, counts)


# -- event audits -------------------------------------------------------------


def sample_disjoint_pair(g: np.random.Generator, n: int, a: int, b: int | None = None):
    b = a if b is None else b
    perm = g.permutation(n)[: a + b]
    return np.sort(perm[:a]), np.sort(perm[a:])


def count_between(es: EdgeSet, A: np.ndarray, B: np.ndarray) -> int:
    return int(np.bitwise_count(es.bits[A] & vertex_mask(es.n, B)).sum())


def sample_family(host: EdgeSet, s: int, gamma: float, budget: int, g: np.random.Generator, max_tries: int | None = None):
    """Random pairs (A, B), |A| = |B| = s, kept iff host density between them is at least gamma."""
    pairs = []
    tries = 0
    max_tries = max_tries if max_tries is not None else 20 * budget
    while len(pairs) < budget and tries < max_tries:
        tries += 1
        A, B = sample_disjoint_pair(g, host.n, s)
        base = count_between(host, A, B)
        if base >= gamma * s * s:
            pairs.append((A, B, base))
    return pairs, tries


def _bounded(report, name, scope, observed, bound_value, bound_text):
    report.add(name, scope, bound_text, observed, REPORT, within_bound=bool(observed <= bound_value + 1e-12))


def audit_events(
    states: list[GraphState],
    gammas: list[EdgeSet] | None,
    sched: ParamSchedule,
    budget: int = 50,
    seed: int = 0,
    host: EdgeSet | None = None,
) -> AuditReport:
    """Degree, codegree and open-edge-count events for every retained step, plus T_I at the end.

    Degree/codegree events are checked exhaustively; the set-pair events on
    ``budget`` random pairs. The bounds are asymptotic, so they are
    report-only; state soundness is a hard check.
    """
    n = sched.n
    if not 1 <= sched.s <= n // 2:
        raise AuditInfeasible(f"s={sched.s} outside [1, n/2]")
    if not states:
        raise ValueError("no states to audit")
    host = host if host is not None else states[0].open
    g = rng.generator(seed, rng.AUDIT)
    report = AuditReport(seeds={"audit": seed}, budgets={"pairs": budget})
    logn = math.log(n)
    sqn = math.sqrt(n)

    family, tries = sample_family(host, sched.s, sched.gamma, budget, g)
    report.budgets["family_accepted"] = len(family)
    report.budgets["family_tries"] = tries
    small_pairs = []
    lo, hi = max(1, sched.s0), max(1, n // 2)
    for _ in range(budget):
        size = int(g.integers(lo, hi + 1))
        small_pairs.append(sample_disjoint_pair(g, n, size))

    for idx, st in enumerate(states):
        i = st.step
        scope = f"i={i}"
        q, pi, tau = sched.q[i], sched.pi[i], sched.tau[i]
        viol = check_state_soundness(st, host)
        report.add("state-soundness", scope, "no violations", len(viol), PASS if not viol else FAIL,
                   witnesses=[list(v) for v in viol] or None)

        deg = st.open.degrees()
        _bounded(report, "N:open-degree", scope, int(deg.max()) if deg.size else 0, q * n, f"q_i n = {q * n:.4g}")
        if gammas is not None and i >= 1 and idx >= 1:
            gdeg = gammas[idx - 1].degrees()
            bound = 2 * sched.sigma * sched.q[i - 1] * sqn
            _bounded(report, "N:gamma-degree", scope, int(gdeg.max()) if gdeg.size else 0, bound,
                     f"2 sigma q_(i-1) sqrt(n) = {bound:.4g}")

        m = pair_maxima(st)
        _bounded(report, "P:X", scope, m["X"], q * q * n, f"q_i^2 n = {q * q * n:.4g}")
        _bounded(report, "P:Y", scope, m["Y"], 2 * q * pi * sqn, f"2 q_i pi_i sqrt(n) = {2 * q * pi * sqn:.4g}")
        _bounded(report, "P:Z", scope, m["Z"], i * logn**9, f"i (log n)^9 = {i * logn ** 9:.4g}")
        _bounded(report, "P:Z-sharp", scope, m["Z"], logn**2, f"(log n)^2 = {logn ** 2:.4g}")

        worst = 0.0
        for A, B in small_pairs:
            worst = max(worst, count_between(st.open, A, B) / (q * len(A) * len(B)))
        _bounded(report, "Q+:open-upper", scope, round(worst, 6), 1.0, f"|O_i(A,B)| / (q_i |A||B|) <= 1, |A|=|B| in [{lo},{hi}]")

        if family:
            ratios = np.array([count_between(st.open, A, B) / base for A, B, base in family])
            report.add("Q:open-two-sided", scope, f"ratio in [tau_i q_i, q_i] = [{tau * q:.4g}, {q:.4g}]",
                       f"[{ratios.min():.6g}, {ratios.max():.6g}]", REPORT,
                       within_bound=bool(ratios.min() >= tau * q - 1e-12 and ratios.max() <= q + 1e-12))

    last = states[-1]
    if family and last.step == sched.steps:
        ratios = np.array([count_between(last.kept, A, B) / base for A, B, base in family])
        lo_b, hi_b = (1 - sched.delta) * sched.rho, (1 + sched.delta) * sched.rho
        report.add("T:kept-density", f"I={sched.steps}", f"ratio in (1 +- delta) rho = [{lo_b:.4g}, {hi_b:.4g}]",
                   f"[{ratios.min():.6g}, {ratios.max():.6g}]", REPORT,
                   within_bound=bool(ratios.min() >= lo_b and ratios.max() <= hi_b))
    return report


def trajectories_to_dicts(records: list[TrajectoryRecord]) -> list[dict]:
    return [asdict(r) for r in records]
