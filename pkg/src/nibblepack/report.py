"""Audit report containers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

PASS, FAIL, REPORT = "pass", "fail", "report-only"


@dataclass
class Check:
    name: str
    scope: str
    bound: str
    observed: float | int | str | None
    verdict: str
    within_bound: bool | None = None
    witnesses: list | None = None

    def line(self) -> str:
        extra = ""
        if self.verdict == REPORT and self.within_bound is not None:
            extra = " (within bound)" if self.within_bound else " (bound exceeded)"
        return f"[{self.verdict:>11}] {self.name} @ {self.scope}: observed {self.observed} vs {self.bound}{extra}"


@dataclass
class AuditReport:
    checks: list[Check] = field(default_factory=list)
    seeds: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)

    def add(self, *args, **kwargs) -> Check:
        check = Check(*args, **kwargs)
        self.checks.append(check)
        return check

    def extend(self, other: "AuditReport") -> None:
        self.checks.extend(other.checks)
        self.seeds.update(other.seeds)
        self.budgets.update(other.budgets)

    @property
    def hard_ok(self) -> bool:
        return all(c.verdict != FAIL for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.verdict == FAIL]

    def to_dict(self) -> dict:
        return {
            "hard_ok": self.hard_ok,
            "checks": [asdict(c) for c in self.checks],
            "seeds": self.seeds,
            "budgets": self.budgets,
        }

    def summary(self) -> str:
        n_pass = sum(c.verdict == PASS for c in self.checks)
        n_fail = sum(c.verdict == FAIL for c in self.checks)
        n_rep = sum(c.verdict == REPORT for c in self.checks)
        lines = [c.line() for c in self.checks]
        lines.append(f"{n_pass} pass, {n_fail} fail, {n_rep} report-only")
        return "\n".join(lines)
