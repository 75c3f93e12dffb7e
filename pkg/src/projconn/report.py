"""Check reports: residual statistics for one verified identity."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["CheckReport"]


@dataclass
class CheckReport:
    """Outcome of one identity check over a sample set.

    ``passed`` is true exactly when the check ran (not skipped) and its max
    residual met the tolerance.  A skipped report records why in ``notes``
    and may carry observed magnitudes in ``extras``; skipped reports never
    count as failures.
    """

    check_id: str
    manifold: str
    samples: int
    seed: int
    residual_max: float | None
    residual_mean: float | None
    tolerance: float
    passed: bool
    gate_status: str  # "passed" | "failed" | "not_required"
    skipped: bool = False
    notes: str = ""
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "manifold": self.manifold,
            "samples": self.samples,
            "seed": self.seed,
            "residual_max": self.residual_max,
            "residual_mean": self.residual_mean,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "gate_status": self.gate_status,
            "skipped": self.skipped,
            "notes": self.notes,
            "extras": {k: self.extras[k] for k in sorted(self.extras)},
        }

    def human_line(self) -> str:
        if self.skipped:
            status = "SKIP"
        elif self.passed:
            status = "PASS"
        else:
            status = "FAIL"
        if self.residual_max is None:
            body = f"tol={self.tolerance:.2e}"
        else:
            body = (
                f"max={self.residual_max:.2e} mean={self.residual_mean:.2e} "
                f"tol={self.tolerance:.2e}"
            )
        line = f"{status:4s} {self.check_id:<16s} {body}"
        if self.notes:
            line += f"  [{self.notes}]"
        return line
