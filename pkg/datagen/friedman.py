# datagen/friedman.py

"""
Friedman regression benchmark with a shifted target domain.

Source inputs are scaled Halton points, targets are the first n_target
source points moved by `shift` in every coordinate. The calibration sample
is the first shifted point with its exact label. Targets are returned
sorted by distance to the calibration input; their true labels sit in the
ScoredPair's sealed field.
"""

import math
from dataclasses import dataclass

import numpy as np

from core.errors import InvalidInputError
from domain.data import Dataset, DomainPair, LabeledSample, ScoredPair
from numerics.halton import halton_points
from numerics.linalg import as_matrix
from preprocessing.sequence import order_targets

FRIEDMAN_DIMS = 5


def friedman_batch(x) -> np.ndarray:
    """Row-wise friedman over the first five columns."""
    x = as_matrix(x, "x")
    if x.shape[1] < FRIEDMAN_DIMS:
        raise InvalidInputError(f"friedman needs {FRIEDMAN_DIMS} columns, got {x.shape[1]}")
    z1, z2, z3, z4, z5 = (x[:, i] for i in range(FRIEDMAN_DIMS))
    # polynomial part first: sin(pi) ~ 1e-16 must not perturb integer sums
    return 20.0 * (z3 - 0.5) ** 2 + 10.0 * z4 + 5.0 * z5 + 10.0 * np.sin(math.pi * z1 * z2)


def friedman(z) -> float:
    """10 sin(pi z1 z2) + 20 (z3 - 0.5)^2 + 10 z4 + 5 z5."""
    v = np.asarray(z, dtype=np.float64)
    if v.shape != (FRIEDMAN_DIMS,):
        raise InvalidInputError(f"friedman takes a vector of length 5, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("friedman input has non-finite entries")
    return float(friedman_batch(v.reshape(1, -1))[0])


@dataclass(frozen=True)
class FriedmanBenchmarkSpec:
    n_source: int = 80
    n_target: int = 41
    domain_low: float = 0.2
    domain_high: float = 1.2
    shift: float = 0.2
    dims: int = FRIEDMAN_DIMS

    def __post_init__(self):
        if self.n_source < 1 or self.n_target < 1:
            raise InvalidInputError("n_source and n_target must be >= 1")
        if self.n_target > self.n_source:
            raise InvalidInputError(
                f"n_target ({self.n_target}) must not exceed n_source ({self.n_source})"
            )
        if self.dims < FRIEDMAN_DIMS:
            raise InvalidInputError(f"dims must be >= {FRIEDMAN_DIMS}, got {self.dims}")
        if not self.domain_low < self.domain_high:
            raise InvalidInputError("domain_low must be below domain_high")


def source_inputs(spec: FriedmanBenchmarkSpec) -> np.ndarray:
    """Halton points 1..n_source mapped affinely into [low, high]^dims."""
    unit = halton_points(spec.n_source, spec.dims, start=1)
    return spec.domain_low + (spec.domain_high - spec.domain_low) * unit


def make_friedman_benchmark(spec: FriedmanBenchmarkSpec = None, reorder: bool = True) -> ScoredPair:
    spec = spec or FriedmanBenchmarkSpec()
    xs = source_inputs(spec)
    ys = friedman_batch(xs)
    xt = xs[: spec.n_target] + spec.shift
    truth = friedman_batch(xt)
    calibration = LabeledSample(xt[0], truth[0])
    scored = ScoredPair(DomainPair(Dataset(xs, ys), xt, calibration), truth)
    if not reorder:
        return scored
    return scored.reordered(order_targets(xt, calibration.x, "by_distance"))
