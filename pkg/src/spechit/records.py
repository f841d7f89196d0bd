"""Record types shared by the verification operations and the harness."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class VerificationRecord:
    """One inequality instance: lhs <= rhs expected, margin = rhs - lhs."""

    id: str
    chain: str
    lhs: float
    rhs: float
    tolerance: float = 0.0
    witness: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        self.tolerance = float(self.tolerance)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return bool(self.margin >= -self.tolerance)


@dataclass
class SuiteReport:
    suite: str
    records: list[VerificationRecord]
    summary: dict = field(default_factory=dict)

    @property
    def n_failed(self) -> int:
        return sum(0 if r.passed else 1 for r in self.records)

    @property
    def all_passed(self) -> bool:
        return self.n_failed == 0
