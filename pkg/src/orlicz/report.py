"""Violation reports shared by the check_* operations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

DEFAULT_TOLERANCE = 1e-9


def scaled_violation(lhs, rhs):
    """Amount by which ``lhs <= rhs`` fails, relative to the larger side.

    Returns ``max(lhs - rhs, 0) / max(1, |lhs|, |rhs|)`` elementwise, so the
    value is an absolute violation for O(1) quantities and a relative one
    for large quantities.
    """
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return np.maximum(lhs - rhs, 0.0) / scale


def max_or_zero(values) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if np.isnan(values).any():
        return float("inf")
    return float(values.max())


@dataclass
class CheckReport:
    """Maximum scaled violation per inequality over a batch of cases.

    ``violations`` maps an inequality name to the largest value returned by
    :func:`scaled_violation` over the sampled cases. The report passes when
    every entry is at most ``tolerance``.
    """

    name: str
    violations: dict[str, float]
    samples: int
    tolerance: float = DEFAULT_TOLERANCE
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance for v in self.violations.values())

    @property
    def failing(self) -> list[str]:
        return [k for k, v in self.violations.items() if not v <= self.tolerance]

    def merge(self, other: "CheckReport") -> "CheckReport":
        """Combine two reports on the same inequalities (max of violations)."""
        merged = dict(self.violations)
        for key, val in other.violations.items():
            merged[key] = max(merged.get(key, 0.0), val)
        return CheckReport(self.name, merged, self.samples + other.samples,
                           max(self.tolerance, other.tolerance), dict(self.details))

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "max_violation": dict(sorted(self.violations.items())),
            "details": self.details,
        }
