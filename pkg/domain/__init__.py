# domain/__init__.py

"""
Shared data types.
- data: numpy-backed sample containers
- models: pydantic config and report schemas
"""

from domain.data import Dataset, DomainPair, LabeledSample, ScoredPair
from domain.models import (
    ExperimentConfig, MethodRun, MethodSummary, RunReport, SweepReport,
    load_experiment_config,
)
