import hashlib
import json

import numpy as np
import polars as pl
from loguru import logger

from common import (
    EXIT_IDENTITY_VIOLATION,
    EXIT_OK,
    EXIT_THRESHOLD_FAILURE,
    IDENTITY_REPORT_FILE,
    MANIFEST_FILE,
    REPORT_FILE,
    ConfigError,
)
from distributions.families import check_A3
from encoding import IdentityReport, encode_forest, export_bundle, verify_identities
from forest import ColoredForest, census_frame, forest_to_jsonl, generate_forest, read_forest
from lab import EXPERIMENTS, Experiment, ExperimentReport
from limit import build_limit_system
from utils import log_exectime
from utils.artifact_sink import ArtifactSink, FileSink, MemorySink, StampedSink
from utils.replicates import run_replicates, spawn_seeds
from .config import RunConfig


def _grow(rng, ensemble, h_max):
    return generate_forest(ensemble, h_max, rng)


def config_hash(config: RunConfig) -> str:
    """Short digest of the resolved config, stamped on every CSV of a run."""
    text = json.dumps(config.echo(), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def build_experiment(config: RunConfig) -> Experiment:
    if config.experiment is None:
        raise ConfigError("experiment command needs --experiment")
    scales = config.scales
    common = {
        "seed": config.seed,
        "thresholds": config.thresholds,
        "threads": config.threads,
        "config": config.echo(),
    }
    cls = EXPERIMENTS[config.experiment]
    if cls.name in ("sde-moment", "lamperti"):
        if config.mechanism is None:
            raise ConfigError(f"{cls.name} needs a mechanism")
        steps = {"dt": scales.dt} if cls.name == "sde-moment" else {"dv": scales.dv, "dt": scales.dt}
        return cls(config.mechanism, scales.v_list[-1], config.replicates, **steps, **common)
    family = config.scaling_family()
    if cls.name == "profile-convergence":
        return cls(family, scales.v_list, scales.p, config.replicates, dt=scales.dt, **common)
    if cls.name == "height-convergence":
        return cls(family, scales.t_list, scales.p, config.replicates, dt=scales.dt, h_factor=scales.h_factor, **common)
    if cls.name == "left-height-convergence":
        return cls(
            family,
            scales.t_list,
            scales.p[-1],
            config.replicates,
            dt=scales.dt,
            dv=scales.dv,
            v_horizon=scales.v_horizon,
            h_factor=scales.h_factor,
            **common,
        )
    if cls.name == "ray-knight":
        return cls(
            family, scales.v_list, scales.p[-1], config.replicates, dt=scales.dt, dv=scales.dv, eps=scales.eps, t_cap=scales.t_cap, **common
        )
    return cls(family, scales.p, config.replicates, t=scales.t_list[-1], **common)


class CommandRunner:
    """Runs one subcommand against a sink; every handler returns the process exit code."""

    def __init__(self, config: RunConfig, sink: ArtifactSink | None = None):
        self.config = config
        self.config_hash = config_hash(config)
        inner = sink or (MemorySink() if config.dry_run else FileSink(config.output_dir))
        self.sink = StampedSink(inner, "config_hash", self.config_hash)
        self.outputs: dict = {}

    def run(self) -> int:
        handler = getattr(self, f"cmd_{self.config.command}")
        if self.config.dry_run:
            logger.info(f"Dry run of {self.config.command}, nothing simulated")
            print(json.dumps(self.config.echo(), indent=2, sort_keys=True))
            return EXIT_OK
        return handler()

    def write_manifest(self, **extra) -> str:
        payload = {"config": self.config.echo(), "config_hash": self.config_hash, "seed": self.config.seed, "outputs": self.outputs, **extra}
        return self.sink.write_json(MANIFEST_FILE, payload)

    def forests(self) -> list[ColoredForest]:
        """Forests from the input files, or freshly generated ones."""
        if self.config.inputs:
            return [read_forest(path) for path in self.config.inputs]
        return self._generate()

    @log_exectime
    def _generate(self) -> list[ColoredForest]:
        ensemble = self.config.resolved_ensemble()
        return run_replicates(_grow, self.config.seed, self.config.forests, ensemble, self.config.scales.h_max, threads=self.config.threads)

    def cmd_generate(self) -> int:
        forests = self._generate()
        seeds = spawn_seeds(self.config.seed, len(forests))
        for k, (forest, seed) in enumerate(zip(forests, seeds)):
            name = f"forest_{k:04d}"
            path = self.sink.write_text(f"{name}.jsonl", forest_to_jsonl(forest))
            census = self.sink.write_frame(f"{name}_census.csv", census_frame(forest))
            self.outputs[name] = {"file": path, "census": census, "vertices": len(forest), "spawn_key": list(seed.spawn_key)}
        self.write_manifest()
        logger.info(f"Wrote {len(forests)} forests to {self.config.output_dir}")
        return EXIT_OK

    def cmd_encode(self) -> int:
        for k, forest in enumerate(self.forests()):
            bundle = encode_forest(forest)
            self.outputs[f"forest_{k:04d}"] = export_bundle(bundle, self.sink, prefix=f"forest_{k:04d}/")
        self.write_manifest()
        return EXIT_OK

    @log_exectime
    def cmd_verify(self) -> int:
        report = IdentityReport()
        for forest in self.forests():
            report = report.merge(verify_identities(forest))
        self.outputs["identities"] = self.sink.write_text(IDENTITY_REPORT_FILE, report.model_dump_json(indent=2))
        self.write_manifest(violation_counts=report.violation_counts, checks=report.checks)
        for name, count in sorted(report.checks.items()):
            print(f"{name}: {count} checked, {report.violation_counts.get(name, 0)} violated")
        if not report.ok:
            first = report.first_violation
            logger.error(f"Identity violations {report.violation_counts}; first: {first.model_dump(exclude_none=True)}")
            return EXIT_IDENTITY_VIOLATION
        return EXIT_OK

    @log_exectime
    def cmd_simulate(self) -> int:
        mechanism = self.config.mechanism
        if mechanism is None:
            raise ConfigError("simulate needs a mechanism")
        scales = self.config.scales
        system = build_limit_system(
            mechanism,
            np.random.default_rng(self.config.seed),
            dt=scales.dt,
            dv=scales.dv,
            v_max=scales.v_max,
            levels=scales.v_list or None,
            eps=scales.eps,
            t_cap=scales.t_cap,
            semimartingale=self.config.semimartingale,
        )
        z = system.Z.values[0]
        trajectory = pl.DataFrame({"level": np.arange(z.shape[0]) * system.Z.dv, **{f"Z_{j + 1}": z[:, j] for j in range(z.shape[1])}})
        self.outputs["Z"] = self.sink.write_frame("Z.csv", trajectory)
        for j, part in enumerate(system.types, start=1):
            paths = {
                "X": part.height.X,
                "H": part.height.H,
                "ell": part.height.ell,
                "J": part.left.J,
                "left_height": part.left.values,
                "U": system.U[j - 1],
            }
            for name, path in paths.items():
                self.outputs[f"{name}_{j}"] = self.sink.write_frame(f"{name}_{j}.csv", path.to_frame())
            if part.local_time is not None:
                table = pl.DataFrame({"level": part.local_time.levels, "local_time": part.local_time.values})
                self.outputs[f"local_time_{j}"] = self.sink.write_frame(f"local_time_{j}.csv", table)
        gaps = system.self_consistency()
        monotone = system.check_monotone()
        self.write_manifest(
            self_consistency=[None if np.isnan(g) else float(g) for g in gaps],
            monotone=monotone,
            capped=[part.capped for part in system.types],
        )
        if not monotone:
            logger.warning("limit paths failed the monotonicity checks")
        return EXIT_OK

    def cmd_experiment(self) -> int:
        experiment = build_experiment(self.config)
        report = experiment.run()
        self.outputs["report"] = self.sink.write_text(REPORT_FILE, report.model_dump_json(indent=2))
        self.outputs["ks_table"] = self.sink.write_frame("ks_table.csv", report.ks_table())
        experiment.write_samples(self.sink)
        if self.config.mechanism is not None and experiment.scales:
            family = self.config.scaling_family()
            self.outputs["a3"] = self.sink.write_frame("a3.csv", check_A3(family, 1.0, experiment.scales))
        self.write_manifest(verdict=report.verdict)
        return self._verdict(report)

    def cmd_report(self) -> int:
        if not self.config.inputs:
            raise ConfigError("report needs a stored report file via --input")
        stored = ExperimentReport.model_validate_json(FileSink(".").read_text(self.config.inputs[0]))
        verdict = stored.evaluate()
        if verdict != stored.verdict:
            logger.warning(f"stored verdict {stored.verdict} differs from the recomputed {verdict}")
        self.outputs["ks_table"] = self.sink.write_frame("ks_table.csv", stored.ks_table())
        self.write_manifest(source=self.config.inputs[0], verdict=verdict)
        stored.verdict = verdict
        return self._verdict(stored)

    @staticmethod
    def _verdict(report: ExperimentReport) -> int:
        for failure in report.failures():
            logger.error(f"{failure.name} at p={failure.p} t/v={failure.at} type={failure.component}: {failure.value:.4f} > {failure.threshold}")
        for note in report.notes:
            logger.info(note)
        print(f"{report.experiment}: {'PASS' if report.verdict else 'FAIL'}")
        return EXIT_OK if report.verdict else EXIT_THRESHOLD_FAILURE
