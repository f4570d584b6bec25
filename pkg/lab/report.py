from typing import Literal

import polars as pl
from pydantic import BaseModel

from common import SUBSEQUENCE_NOTE


class StatisticRecord(BaseModel):
    name: str
    kind: Literal["ks", "moment_gap", "relative_gap", "standard_errors", "fraction", "median", "exact"]
    value: float
    threshold: float | None = None
    p: int | None = None
    at: float | None = None
    component: int | None = None

    @property
    def passed(self) -> bool | None:
        if self.threshold is None:
            return None
        return self.value == self.value and self.value <= self.threshold


class ExperimentReport(BaseModel):
    experiment: str
    config: dict
    seed: int
    scales: list[int]
    replicates: int
    statistics: list[StatisticRecord]
    excluded_fraction: float = 0.0
    excluded_threshold: float = 0.05
    monotonicity_violations: list[str] = []
    verdict: bool = False
    notes: list[str] = []
    runtime_s: float = 0.0

    def fingerprint(self) -> str:
        return self.model_dump_json(exclude={"runtime_s"})

    def failures(self) -> list[StatisticRecord]:
        return [s for s in self.statistics if s.passed is False]

    def evaluate(self) -> bool:
        """Verdict from the stored statistics alone."""
        return (
            not self.failures()
            and len(self.monotonicity_violations) <= 1
            and self.excluded_fraction < self.excluded_threshold
        )

    def ks_table(self) -> pl.DataFrame:
        rows = [
            {
                "name": s.name,
                "kind": s.kind,
                "p": s.p,
                "at": s.at,
                "component": s.component,
                "value": s.value,
                "threshold": s.threshold,
                "passed": s.passed,
            }
            for s in self.statistics
        ]
        schema = {
            "name": pl.String,
            "kind": pl.String,
            "p": pl.Int64,
            "at": pl.Float64,
            "component": pl.Int64,
            "value": pl.Float64,
            "threshold": pl.Float64,
            "passed": pl.Boolean,
        }
        return pl.DataFrame(rows, schema=schema)


def monotonicity_violations(statistics: list[StatisticRecord]) -> list[str]:
    """KS distances at the largest p must not exceed those at the smallest p."""
    groups: dict[tuple, dict[int, float]] = {}
    for s in statistics:
        if s.kind == "ks" and s.p is not None:
            groups.setdefault((s.name, s.at, s.component), {})[s.p] = s.value
    out = []
    for (name, at, component), by_p in groups.items():
        if len(by_p) < 2:
            continue
        small, large = by_p[min(by_p)], by_p[max(by_p)]
        if large > small:
            out.append(f"{name} at {at} (type {component}): {large:.4f} at p={max(by_p)} > {small:.4f} at p={min(by_p)}")
    return out


def default_notes(left_height: bool = False) -> list[str]:
    return [SUBSEQUENCE_NOTE] if left_height else []
