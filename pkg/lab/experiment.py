import time
from abc import ABC, abstractmethod

import numpy as np
import polars as pl
from loguru import logger

from common import InsufficientSampleError
from utils.artifact_sink import ArtifactSink
from utils.replicates import default_threads
from .report import ExperimentReport, StatisticRecord, default_notes, monotonicity_violations
from .thresholds import Thresholds


class Experiment(ABC):
    name: str = ""
    left_height_note = False

    def __init__(
        self,
        replicates: int,
        seed: int = 0,
        thresholds: Thresholds | None = None,
        threads: int | None = None,
        config: dict | None = None,
    ) -> None:
        self.replicates = replicates
        self.seed = seed
        self.thresholds = thresholds or Thresholds()
        self.threads = threads or default_threads()
        self.config = config or {}
        self._seeds = np.random.SeedSequence(seed)
        self.statistics: list[StatisticRecord] = []
        self.samples: dict[str, np.ndarray] = {}
        self.notes: list[str] = default_notes(self.left_height_note)
        self.excluded = 0
        self.attempted = 0

    @property
    @abstractmethod
    def scales(self) -> list[int]:
        pass

    @abstractmethod
    def collect(self):
        """Simulate both sides and record statistics."""

    def next_seed(self) -> np.random.SeedSequence:
        return self._seeds.spawn(1)[0]

    def require_replicates(self, minimum: int | None = None):
        minimum = minimum or self.thresholds.min_replicates
        if self.replicates < minimum:
            raise InsufficientSampleError(f"{self.name} needs at least {minimum} replicates, got {self.replicates}")

    def record(self, name: str, kind: str, value: float, threshold: float | None = None, **where):
        stat = StatisticRecord(name=name, kind=kind, value=float(value), threshold=threshold, **where)
        self.statistics.append(stat)
        logger.debug(f"{self.name}: {name} {where} = {value:.5g}")
        return stat

    def keep(self, name: str, sample: np.ndarray):
        self.samples[name] = np.asarray(sample, dtype=float)

    def run(self) -> ExperimentReport:
        start = time.perf_counter()
        logger.info(f"Running {self.name} with {self.replicates} replicates on {self.threads} workers")
        self.collect()
        fraction = self.excluded / self.attempted if self.attempted else 0.0
        if fraction >= self.thresholds.excluded_fraction:
            self.notes.append(f"horizon diagnostic: {fraction:.2%} of replicates excluded")
        violations = monotonicity_violations(self.statistics)
        if len(violations) == 1:
            self.notes.append("one monotonicity violation tolerated as Monte-Carlo noise")
        report = ExperimentReport(
            experiment=self.name,
            config=self.config,
            seed=self.seed,
            scales=self.scales,
            replicates=self.replicates,
            statistics=self.statistics,
            excluded_fraction=fraction,
            excluded_threshold=self.thresholds.excluded_fraction,
            monotonicity_violations=violations,
            notes=self.notes,
        )
        report.verdict = report.evaluate()
        report.runtime_s = time.perf_counter() - start
        logger.info(f"{self.name} finished in {report.runtime_s:.1f}s, verdict={'pass' if report.verdict else 'fail'}")
        return report

    def write_samples(self, sink: ArtifactSink, prefix: str = "samples_"):
        for name, sample in self.samples.items():
            sink.write_frame(f"{prefix}{name}.csv", pl.DataFrame({"value": sample}))
