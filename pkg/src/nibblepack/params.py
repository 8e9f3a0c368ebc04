"""Deterministic parameters of the nibble: Psi, the q/pi/tau schedules and run constants.

All logarithms are natural.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

D0 = 108.0
BETA0 = 1.0 / 14.0

# x beyond this makes exp(Psi(x)**2) overflow a double
PSI_MAX_ARG = 1e300

SCHEDULE_OVERRIDES = frozenset(
    {"beta", "sigma", "steps", "delta", "gamma", "C", "C0", "eps", "xi", "s", "p"}
)


class ScheduleError(ValueError):
    """Raised for invalid schedule requests."""


# -- Psi ---------------------------------------------------------------------


def _simpson(a, fa, fb, fm, b):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def integral_exp_sq(a: float, b: float, rtol: float = 1e-14, atol: float = 1e-15) -> float:
    """Adaptive Simpson quadrature of exp(t**2) over [a, b]."""
    if b == a:
        return 0.0
    f = lambda t: math.exp(t * t)
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = _simpson(a, fa, fb, fm, b)
    tol = max(atol, rtol * abs(whole))
    total = 0.0
    # explicit stack: (a, fa, m, fm, b, fb, whole, tol, depth)
    stack = [(a, fa, m, fm, b, fb, whole, tol, 0)]
    while stack:
        a, fa, m, fm, b, fb, whole, tol, depth = stack.pop()
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = _simpson(a, fa, fm, flm, m)
        right = _simpson(m, fm, fb, frm, b)
        delta = left + right - whole
        if depth >= 50 or abs(delta) <= 15.0 * tol:
            total += left + right + delta / 15.0
        else:
            stack.append((a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1))
            stack.append((m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1))
    return total


def _solve_increment(y0: float, target: float) -> float:
    """Return y >= y0 with integral of exp(t^2) over [y0, y] equal to target."""
    if target <= 0.0:
        return y0
    # convex increasing integrand: bracket, then Newton from the right end
    lo = y0
    hi = y0 + min(target * math.exp(-y0 * y0), 1.0)
    while integral_exp_sq(y0, hi) < target:
        lo, hi = hi, hi + 1.0
    y = hi
    for _ in range(200):
        g = integral_exp_sq(y0, y) - target
        if g > 0:
            hi = y
        else:
            lo = y
        if abs(g) <= max(1e-13, 1e-15 * target):
            return y
        step = g * math.exp(-y * y)
        y_new = y - step
        if not lo < y_new < hi:
            y_new = 0.5 * (lo + hi)
        if abs(y_new - y) <= 1e-16 * max(1.0, y):
            return y_new
        y = y_new
    return y


def psi(x: float) -> float:
    """Solve x = integral_0^y exp(t^2) dt for y.

    This is the solution of Psi' = exp(-Psi^2), Psi(0) = 0.
    """
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"psi needs a finite x >= 0, got {x!r}")
    if x > PSI_MAX_ARG:
        raise OverflowError(f"psi({x:g}) out of representable range")
    return _solve_increment(0.0, x)


def psi_grid(sigma: float, steps: int) -> np.ndarray:
    """Psi(i * sigma) for i = 0..steps, solved incrementally from the previous root."""
    if steps * sigma > PSI_MAX_ARG:
        raise OverflowError("schedule argument out of representable range")
    ys = np.empty(steps + 1)
    ys[0] = 0.0
    y, reached = 0.0, 0.0
    for i in range(1, steps + 1):
        target = i * sigma
        y_next = _solve_increment(y, target - reached)
        reached += integral_exp_sq(y, y_next)
        y = y_next
        ys[i] = y
    return ys


# -- constants ---------------------------------------------------------------


@dataclass(frozen=True)
class Constants:
    eps: float
    xi: float
    C0: float
    delta: float
    gamma: float
    beta: float
    C: float
    C1: float
    s: int | None = None
    I_outer: int | None = None


def rho_of(n: int, beta: float) -> float:
    return math.sqrt(beta * math.log(n) / n)


def outer_rounds(eps: float, rho: float, delta: float) -> int:
    return math.ceil(math.log(1.0 / eps) / (rho * (1.0 - delta)))


def choose_constants(eps: float, xi: float = 1.0, C0: float = 1.0, n: int | None = None) -> Constants:
    """The packing constants: delta=1/4, gamma=eps^2 xi, beta=beta0/2, C=max(C0, D0/(delta^2 sqrt(beta) gamma)).

    With ``n`` given, also fills in ``s = ceil(C sqrt(n log n))`` (uncapped) and
    the outer round count ``ceil(log(1/eps) / (rho (1 - delta)))``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not 0 < xi <= 1:
        raise ValueError("xi must lie in (0, 1]")
    if C0 <= 0:
        raise ValueError("C0 must be positive")
    delta = 0.25
    gamma = eps * eps * xi
    beta = BETA0 / 2.0
    C = max(C0, D0 / (delta**2 * math.sqrt(beta) * gamma))
    s = I_outer = None
    if n is not None:
        s = math.ceil(C * math.sqrt(n * math.log(n)))
        I_outer = outer_rounds(eps, rho_of(n, beta), delta)
    return Constants(eps, xi, C0, delta, gamma, beta, C, 3.0 * C, s, I_outer)


# -- schedule ----------------------------------------------------------------


@dataclass(frozen=True)
class ParamSchedule:
    n: int
    beta: float
    sigma: float
    p: float
    steps: int
    q: np.ndarray
    pi: np.ndarray
    tau: np.ndarray
    rho: float
    s: int
    s0: int
    s0_raw: int
    delta: float
    gamma: float
    C: float
    C0: float
    C1: float
    xi: float
    eps: float
    I_outer: int
    source: dict = field(default_factory=dict)
    warnings: tuple = ()

    def threshold(self, i: int) -> float:
        """Stabilization target exponent 2 q_i (pi_i + sqrt(sigma)) sqrt(n)."""
        return 2.0 * self.q[i] * (self.pi[i] + math.sqrt(self.sigma)) * math.sqrt(self.n)

    def header(self) -> dict:
        return {
            "n": self.n,
            "sigma": self.sigma,
            "p": self.p,
            "I": self.steps,
            "rho": self.rho,
            "s": self.s,
            "s0": self.s0,
            "s0_raw": self.s0_raw,
            "constants": {
                "beta": self.beta,
                "delta": self.delta,
                "gamma": self.gamma,
                "C": self.C,
                "C0": self.C0,
                "C1": self.C1,
                "xi": self.xi,
                "eps": self.eps,
                "D0": D0,
                "beta0": BETA0,
                "I_outer": self.I_outer,
            },
            "provenance": dict(self.source),
            "warnings": list(self.warnings),
        }

    def rows(self):
        for i in range(self.steps + 1):
            yield i, float(self.q[i]), float(self.pi[i]), float(self.tau[i])


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def build_schedule(n: int, overrides: dict | None = None, *, require_s0: bool = False) -> ParamSchedule:
    """Compute every deterministic quantity of a run on ``n`` vertices.

    ``overrides`` may replace any of beta, sigma, steps, delta, gamma, C, C0,
    eps, xi, s, p; each value's provenance is recorded in ``source``.
    With ``require_s0`` the call fails when s0 = floor(sigma^4 q_I^2 s) < 1.
    """
    if n < 3:
        raise ScheduleError(f"need n >= 3, got {n}")
    ov = dict(overrides or {})
    unknown = set(ov) - SCHEDULE_OVERRIDES
    if unknown:
        raise ScheduleError(f"unknown override(s): {sorted(unknown)}")
    source = {}

    def pick(name, default):
        if name in ov and ov[name] is not None:
            source[name] = "override"
            return ov[name]
        source[name] = "default"
        return default

    eps = float(pick("eps", 0.5))
    xi = float(pick("xi", 1.0))
    C0 = float(pick("C0", 1.0))
    if not 0 < eps < 1:
        raise ScheduleError("eps must lie in (0, 1)")
    if not 0 < xi <= 1:
        raise ScheduleError("xi must lie in (0, 1]")
    if C0 <= 0:
        raise ScheduleError("C0 must be positive")
    delta = float(pick("delta", 0.25))
    gamma = float(pick("gamma", eps * eps * xi))
    beta = float(pick("beta", BETA0 / 2.0))
    if not 0 < beta < 1:
        raise ScheduleError("beta must lie in (0, 1)")
    if not 0 < delta < 1:
        raise ScheduleError("delta must lie in (0, 1)")
    if not 0 < gamma <= 1:
        raise ScheduleError("gamma must lie in (0, 1]")
    C = float(pick("C", max(C0, D0 / (delta**2 * math.sqrt(beta) * gamma))))
    logn = math.log(n)
    sigma = float(pick("sigma", logn**-2))
    if not 0 < sigma < 1:
        raise ScheduleError("sigma must lie in (0, 1)")
    steps = int(pick("steps", math.ceil(n**beta)))
    if steps < 1:
        raise ScheduleError("steps must be >= 1")
    p = float(pick("p", sigma / math.sqrt(n)))
    if not 0 <= p <= 1:
        raise ScheduleError("p must lie in [0, 1]")

    ys = psi_grid(sigma, steps)
    q = np.exp(-ys * ys)
    q[0] = 1.0
    pi = np.empty(steps + 1)
    pi[0] = sigma
    for i in range(steps):
        pi[i + 1] = pi[i] + sigma * q[i]
    tau = 1.0 - delta * pi / (2.0 * pi[-1])
    tau[-1] = 1.0 - delta / 2.0

    notes = []
    rho = rho_of(n, beta)
    s = int(pick("s", math.ceil(C * math.sqrt(n * logn))))
    if s > n // 2:
        notes.append(f"s={s} capped at floor(n/2)={n // 2}")
        warnings.warn(notes[-1], stacklevel=2)
        s = n // 2
    s0_raw = math.floor(sigma**4 * q[-1] ** 2 * s)
    if s0_raw < 1:
        if require_s0:
            raise ScheduleError(f"audit infeasible at this scale: s0 = {s0_raw} < 1")
        notes.append(f"s0={s0_raw} floored at 1")
    s0 = max(1, s0_raw)
    for name in ("rho", "q", "pi", "tau", "s0", "C1", "I_outer"):
        source[name] = "derived"

    return ParamSchedule(
        n=n,
        beta=beta,
        sigma=sigma,
        p=p,
        steps=steps,
        q=_frozen(q),
        pi=_frozen(pi),
        tau=_frozen(tau),
        rho=rho,
        s=s,
        s0=s0,
        s0_raw=s0_raw,
        delta=delta,
        gamma=gamma,
        C=C,
        C0=C0,
        C1=3.0 * C,
        xi=xi,
        eps=eps,
        I_outer=outer_rounds(eps, rho, delta),
        source=source,
        warnings=tuple(notes),
    )


def stabilization_prob(sched: ParamSchedule, i: int, y_e: int) -> float:
    """Probability 1 - (1-p)^max(threshold_i - y_e, 0) of closing an open edge artificially."""
    if not 0 <= i < sched.steps:
        raise IndexError(f"step {i} outside [0, {sched.steps})")
    if y_e < 0:
        raise ValueError("y_e must be nonnegative")
    expo = max(sched.threshold(i) - y_e, 0.0)
    return _closing_prob(sched.p, expo)


def _closing_prob(p: float, expo):
    expo = np.asarray(expo, dtype=float)
    if p >= 1.0:
        out = (expo > 0).astype(float)
    else:
        out = -np.expm1(expo * math.log1p(-p))
    return float(out) if out.ndim == 0 else out


def stabilization_probs(sched: ParamSchedule, i: int, y: np.ndarray) -> np.ndarray:
    """Vectorised ``stabilization_prob`` over an array of mixed codegrees."""
    expo = np.maximum(sched.threshold(i) - np.asarray(y, dtype=float), 0.0)
    return np.asarray(_closing_prob(sched.p, expo), dtype=float)
