import json
import os
from pathlib import Path
from typing import Literal, get_args

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_serializer, model_validator

from common import ConfigError
from distributions import AdmissibleMechanism
from distributions.families import ScalingFamily
from forest import OffspringEnsemble
from lab import EXPERIMENTS, Thresholds
from utils import env_int, env_str

Command = Literal["generate", "encode", "verify", "simulate", "experiment", "report"]
COMMANDS = get_args(Command)
DEFAULT_OUTPUT_DIR = "runs"


def available_threads() -> int:
    return max(1, env_int("GWI_THREADS", os.cpu_count() or 1))


class Scales(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    p: list[int] = [50, 200]
    h_max: int = 20
    dt: float = 1e-3
    dv: float = 1e-3
    eps: float = 0.02
    t_list: list[float] = [0.5, 1.0]
    v_list: list[float] = [0.25, 0.5]
    v_max: float = 1.0
    v_horizon: float = 6.0
    t_cap: float = 20.0
    h_factor: float = 3.0

    @model_validator(mode="after")
    def _check(self):
        if not self.p or any(p < 1 for p in self.p):
            raise ConfigError("scales.p needs positive integers")
        if self.h_max < 0:
            raise ConfigError("scales.h_max must be nonnegative")
        for name in ("dt", "dv", "eps", "v_max", "v_horizon", "t_cap", "h_factor"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"scales.{name} must be positive")
        if any(t < 0 for t in self.t_list) or any(v < 0 for v in self.v_list):
            raise ConfigError("scales.t_list and scales.v_list must be nonnegative")
        return self


class RunConfig(BaseModel):
    """Everything a run depends on; echoed verbatim into every manifest and report."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command = "experiment"
    experiment: str | None = None
    ensemble: OffspringEnsemble | None = None
    mechanism: AdmissibleMechanism | None = None
    family: Literal["brownian", "stable"] = "brownian"
    scales: Scales = Scales()
    replicates: int = 1000
    forests: int = 1
    seed: int = 0
    output_dir: str = Field(default_factory=lambda: env_str("GWI_OUTPUT_DIR", DEFAULT_OUTPUT_DIR))
    threads: int = Field(default_factory=available_threads)
    log_level: str | None = None
    thresholds: Thresholds = Thresholds()
    dry_run: bool = False
    semimartingale: bool = False
    inputs: list[str] = []

    @field_serializer("ensemble")
    def _dump_ensemble(self, ensemble: OffspringEnsemble | None):
        return None if ensemble is None else ensemble.spec()

    @model_validator(mode="after")
    def _check(self):
        if self.experiment is not None and self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(sorted(EXPERIMENTS))}")
        if self.replicates < 1 or self.forests < 1:
            raise ConfigError("replicates and forests must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        return self

    def scaling_family(self) -> ScalingFamily:
        if self.mechanism is None:
            raise ConfigError(f"{self.command} needs a mechanism")
        return ScalingFamily(mechanism=self.mechanism, kind=self.family)

    def resolved_ensemble(self) -> OffspringEnsemble:
        """The explicit ensemble, or the scaling family at the first p."""
        if self.ensemble is not None:
            return self.ensemble
        return self.scaling_family().ensemble(self.scales.p[0])

    def echo(self) -> dict:
        return self.model_dump(mode="json")


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """JSON config file merged with flag overrides (flags win); environment fills what both leave unset."""
    payload = {}
    if path is not None:
        try:
            payload = json.loads(Path(path).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from None
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if isinstance(value, dict):
            payload[key] = {**payload.get(key, {}), **value}
        else:
            payload[key] = value
    try:
        return RunConfig.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"{where}: {first['msg']}") from None
