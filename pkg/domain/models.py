# domain/models.py

"""
Pydantic schemas for the experiment config file (schema_version 1) and for
the reports written by the evaluation package.
"""

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from core.config import config
from core.errors import ConfigError

SCHEMA_VERSION = 1
METHOD_NAMES = ("baseline", "kmm", "tca", "isda", "re_isda")


# ============================================================
# Experiment config
# ============================================================

class FriedmanSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_source: int = Field(80, ge=1)
    n_target: int = Field(41, ge=1)
    domain_low: float = 0.2
    domain_high: float = 1.2
    shift: float = 0.2
    dims: int = Field(5, ge=1)

    @model_validator(mode="after")
    def _check(self):
        if self.n_target > self.n_source:
            raise ValueError("n_target must not exceed n_source")
        if not self.domain_low < self.domain_high:
            raise ValueError("domain_low must be below domain_high")
        return self


class CsvPaths(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source: str
    target: str
    calibration: str | None = None
    truth: str | None = None


class DatasetSection(BaseModel):
    """Exactly one of friedman / bundle / csv."""
    model_config = ConfigDict(extra="forbid")

    friedman: FriedmanSection | None = None
    bundle: str | None = None
    csv: CsvPaths | None = None

    @model_validator(mode="after")
    def _one_source(self):
        given = [k for k in ("friedman", "bundle", "csv") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"dataset needs exactly one of friedman, bundle, csv (got {given or 'none'})")
        return self


class PreprocessingSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    normalize: bool = False
    normalize_fit: Literal["joint", "source"] = "joint"
    frame_difference: Literal["auto", "on", "off"] = "auto"
    pca_retained: int | None = Field(None, ge=1)
    pca_variance: float | None = Field(None, gt=0, le=1)
    ordering: Literal["auto", "by_distance", "keep_order"] = "auto"
    multi_source: bool = False

    @model_validator(mode="after")
    def _pca(self):
        if self.pca_retained is not None and self.pca_variance is not None:
            raise ValueError("set at most one of pca_retained, pca_variance")
        return self


class LearnerSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    layer_sizes: list[int] = Field(default_factory=lambda: list(config.learner.layer_sizes), min_length=2)
    optimizer: Literal["gd", "adam"] = config.learner.optimizer
    learning_rate: float = Field(config.learner.learning_rate, gt=0)
    epochs: int = Field(config.learner.epochs, ge=0)
    activation: Literal["tanh", "sigmoid", "relu"] = config.learner.activation
    scale_inputs: bool = config.learner.scale_inputs
    scale_targets: bool = config.learner.scale_targets


class MethodSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Literal["baseline", "kmm", "tca", "isda", "re_isda"]
    # self-labeling
    eta: int = Field(config.self_labeling.eta, ge=1)
    epochs: int | None = Field(None, ge=1)
    warm_start: bool = config.self_labeling.warm_start
    # kmm
    kmm_bandwidth: float = Field(config.kmm.bandwidth, gt=0)
    kmm_box: float = Field(config.kmm.box_upper, gt=0)
    kmm_slack: float | None = Field(config.kmm.slack, ge=0)
    # tca
    tca_bandwidth: float | None = Field(config.tca.bandwidth, gt=0)
    tca_latent_dim: int = Field(config.tca.latent_dim, ge=1)
    tca_mu: float = Field(config.tca.mu, gt=0)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1]
    name: str = "experiment"
    dataset: DatasetSection
    preprocessing: PreprocessingSection = Field(default_factory=PreprocessingSection)
    learner: LearnerSection = Field(default_factory=LearnerSection)
    methods: list[MethodSection] = Field(min_length=1)
    seeds: list[int] = Field(default_factory=lambda: list(config.run.seeds), min_length=1)
    output_dir: str | None = None
    record_timings: bool = config.run.record_timings
    max_workers: int = Field(config.run.max_workers, ge=1)

    @model_validator(mode="after")
    def _unique(self):
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate method entries: {names}")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("duplicate seeds")
        return self


def load_experiment_config(path) -> ExperimentConfig:
    """Parse and validate a config file; every failure becomes ConfigError."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"{path}: {e}") from e


# ============================================================
# Reports
# ============================================================

class MethodRun(BaseModel):
    method: str
    seed: int
    ok: bool
    rmse: float | None = None
    predictions: list[float] = Field(default_factory=list)
    abs_errors: list[float] = Field(default_factory=list)
    loss_trace: list[float] = Field(default_factory=list)
    wall_time: float | None = None
    error: str | None = None


class MethodSummary(BaseModel):
    method: str
    n_ok: int
    n_failed: int
    median_rmse: float | None = None
    mean_rmse: float | None = None
    min_rmse: float | None = None
    max_rmse: float | None = None
    q1_rmse: float | None = None
    q3_rmse: float | None = None
    representative_seed: int | None = None


class RunReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    metadata: dict = Field(default_factory=dict)
    truth: list[float] = Field(default_factory=list)
    target_ids: list[int] = Field(default_factory=list)
    runs: list[MethodRun] = Field(default_factory=list)
    summaries: list[MethodSummary] = Field(default_factory=list)

    def methods(self) -> list[str]:
        return [s.method for s in self.summaries]

    def summary_for(self, method: str) -> MethodSummary:
        for s in self.summaries:
            if s.method == method:
                return s
        raise KeyError(method)

    def run_for(self, method: str, seed: int) -> MethodRun:
        for r in self.runs:
            if r.method == method and r.seed == seed:
                return r
        raise KeyError((method, seed))

    @property
    def any_failed(self) -> bool:
        return any(not r.ok for r in self.runs)


class EtaTrace(BaseModel):
    """RMSE of the labeled-so-far targets after each Re-ISDA iteration."""
    eta: int
    seed: int
    rmse_trace: list[float] = Field(default_factory=list)
    error: str | None = None


class SweepReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    metadata: dict = Field(default_factory=dict)
    traces: list[EtaTrace] = Field(default_factory=list)

    def etas(self) -> list[int]:
        return sorted({t.eta for t in self.traces})

    def for_eta(self, eta: int) -> list[EtaTrace]:
        return [t for t in self.traces if t.eta == eta]

    @property
    def any_failed(self) -> bool:
        return any(t.error is not None for t in self.traces)
