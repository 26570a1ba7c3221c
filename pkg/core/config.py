# core/config.py

"""
Unified configuration for the domain-adaptation benchmark.
Defaults for the base learner, the self-labeling methods, KMM, TCA,
the numerical kernels, run orchestration and output paths.
Every section can be overridden from the environment (REISDA_* variables,
`.env` files honoured).
"""

import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, str(default)))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


def _env_optional_float(name: str) -> Optional[float]:
    raw = os.getenv(name, "")
    return float(raw) if raw else None


# ============================================================
# Base Learner
# ============================================================

@dataclass
class LearnerConfig:
    """
    Feed-forward base learner defaults (Friedman experiment setup).
    optimizer: "gd" = plain full-batch gradient descent, "adam" = full-batch Adam.
    """
    layer_sizes: Tuple[int, ...] = (5, 10, 5, 1)
    optimizer: str = os.getenv("REISDA_OPTIMIZER", "adam")
    learning_rate: float = _env_float("REISDA_LEARNING_RATE", 0.01)
    epochs: int = _env_int("REISDA_EPOCHS", 2000)
    activation: str = os.getenv("REISDA_ACTIVATION", "tanh")
    scale_inputs: bool = os.getenv("REISDA_SCALE_INPUTS", "1") != "0"
    scale_targets: bool = os.getenv("REISDA_SCALE_TARGETS", "1") != "0"
    ridge_alpha: float = 1e-3


# ============================================================
# Self-labeling (ISDA / Re-ISDA)
# ============================================================

@dataclass
class SelfLabelingConfig:
    """Block size and iteration behaviour."""
    eta: int = _env_int("REISDA_ETA", 2)
    warm_start: bool = False
    oracle_budget: int = 1_000_000


# ============================================================
# Kernel Mean Matching
# ============================================================

@dataclass
class KmmDefaults:
    """KMM re-weighting defaults. epsilon None = (sqrt(q) - 1) / sqrt(q)."""
    bandwidth: float = _env_float("REISDA_KMM_BANDWIDTH", 0.5)
    box_upper: float = 1000.0
    slack: Optional[float] = _env_optional_float("REISDA_KMM_SLACK")
    qp_tol: float = 1e-6
    qp_max_iter: int = 50_000


# ============================================================
# Transfer Component Analysis
# ============================================================

@dataclass
class TcaDefaults:
    """TCA defaults. bandwidth None = median pairwise distance."""
    bandwidth: Optional[float] = _env_optional_float("REISDA_TCA_BANDWIDTH")
    latent_dim: int = 5
    mu: float = 1.0


# ============================================================
# Numerical kernels
# ============================================================

@dataclass
class NumericsConfig:
    """Eigensolver and QP solver budgets."""
    symmetry_tol: float = 1e-10
    jacobi_tol: float = 1e-12     # off-diagonal norm relative to ||A||_F
    jacobi_max_sweeps: int = 100
    qp_tol: float = 1e-8
    qp_max_iter: int = 20_000


# ============================================================
# Run orchestration
# ============================================================

@dataclass
class RunConfig:
    """Seeds and parallelism for comparison runs."""
    seeds: Tuple[int, ...] = tuple(range(10))
    max_workers: int = _env_int("REISDA_MAX_WORKERS", 1)
    record_timings: bool = os.getenv("REISDA_RECORD_TIMINGS", "0") == "1"


# ============================================================
# Logging
# ============================================================

@dataclass
class LogConfig:
    level: str = os.getenv("REISDA_LOG_LEVEL", "INFO")
    fmt: str = "%(levelname)s %(name)s: %(message)s"


# ============================================================
# Path Configuration
# ============================================================

@dataclass
class PathConfig:
    """Default paths."""
    output_dir: str = os.getenv("REISDA_OUTPUT_DIR", "./outputs")


# ============================================================
# Unified Config Instance
# ============================================================

@dataclass
class AppConfig:
    """Master configuration object."""
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    self_labeling: SelfLabelingConfig = field(default_factory=SelfLabelingConfig)
    kmm: KmmDefaults = field(default_factory=KmmDefaults)
    tca: TcaDefaults = field(default_factory=TcaDefaults)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    run: RunConfig = field(default_factory=RunConfig)
    log: LogConfig = field(default_factory=LogConfig)
    paths: PathConfig = field(default_factory=PathConfig)


# Single global config instance
config = AppConfig()
