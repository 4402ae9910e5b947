"""Verification reports shared by every verifier."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAX_OFFENDERS = 5


@dataclass
class VerificationReport:
    check: str
    samples: int
    max_residual: float
    tol: float
    passed: bool
    worst: list = field(default_factory=list)  # [(sample index, residual), ...]
    failures: int = 0
    seed: int | None = None
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    margin: bool = False  # passes when max_residual > tol

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "samples": self.samples,
            "max_residual": _num(self.max_residual),
            "tol": self.tol,
            "pass": self.passed,
            "margin": self.margin,
            "worst": [[int(i), _num(r)] for i, r in self.worst],
            "failures": self.failures,
            "seed": self.seed,
            "notes": list(self.notes),
            "extra": {k: _jsonable(v) for k, v in sorted(self.extra.items())},
        }

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        if self.margin:
            return f"[{flag}] {self.check}: margin {self.max_residual:.3e} (needs > {self.tol:.1e}, {self.samples} samples)"
        return f"[{flag}] {self.check}: max residual {self.max_residual:.3e} (tol {self.tol:.1e}, {self.samples} samples)"


def from_residuals(check, residuals, tol, seed=None, notes=(), extra=None) -> VerificationReport:
    """Reduce per-sample residuals. ``None`` or non-finite entries count as
    failures and make the maximum infinite."""
    res = [math.inf if r is None or not math.isfinite(r) else float(r) for r in residuals]
    failures = sum(1 for r in res if not math.isfinite(r))
    mx = max(res) if res else 0.0
    order = sorted(range(len(res)), key=lambda i: (-res[i], i))[:MAX_OFFENDERS]
    return VerificationReport(
        check=check,
        samples=len(res),
        max_residual=mx,
        tol=tol,
        passed=bool(mx <= tol),
        worst=[(i, res[i]) for i in order],
        failures=failures,
        seed=seed,
        notes=list(notes),
        extra=dict(extra or {}),
    )


def threshold_report(check, value, tol, above=False, **kw) -> VerificationReport:
    """Single-value report. With ``above=True`` the check passes when
    ``value > tol`` (used for nondegeneracy margins and negative controls)."""
    passed = value > tol if above else value <= tol
    return VerificationReport(check, 1, float(value), tol, bool(passed), [(0, float(value))], margin=above, **kw)


def _num(x):
    x = float(x)
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return "nan"
    return x


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in sorted(v.items())}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _num(v)
    return v
