# domain/data.py

"""
Sample containers: Dataset, LabeledSample, DomainPair and the scored pair
that keeps the hidden target labels away from the adaptation methods.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.errors import InvalidInputError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with an optional label vector."""
    inputs: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        x = _frozen(self.inputs)
        if x.ndim != 2:
            raise InvalidInputError(f"inputs must be 2-D, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("inputs have non-finite entries")
        object.__setattr__(self, "inputs", x)
        if self.labels is not None:
            y = _frozen(self.labels)
            if y.ndim != 1 or y.shape[0] != x.shape[0]:
                raise InvalidInputError(
                    f"labels must be a vector of length {x.shape[0]}, got shape {y.shape}"
                )
            if not np.all(np.isfinite(y)):
                raise InvalidInputError("labels have non-finite entries")
            object.__setattr__(self, "labels", y)

    @property
    def size(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    @property
    def labeled(self) -> bool:
        return self.labels is not None

    def require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise InvalidInputError("dataset is unlabeled")
        return self.labels

    def subset(self, index) -> "Dataset":
        idx = np.asarray(index, dtype=int)
        labels = None if self.labels is None else self.labels[idx]
        return Dataset(self.inputs[idx], labels)

    @staticmethod
    def concat(*parts: "Dataset") -> "Dataset":
        """Row-wise concatenation; all parts must be labeled."""
        if not parts:
            raise InvalidInputError("nothing to concatenate")
        x = np.vstack([p.inputs for p in parts])
        y = np.concatenate([p.require_labels() for p in parts])
        return Dataset(x, y)


@dataclass(frozen=True)
class LabeledSample:
    """A single labeled point, used for the calibration sample."""
    x: np.ndarray
    y: float

    def __post_init__(self):
        x = _frozen(self.x).reshape(-1)
        if not np.all(np.isfinite(x)) or not np.isfinite(self.y):
            raise InvalidInputError("calibration sample has non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", float(self.y))

    def as_dataset(self) -> Dataset:
        return Dataset(self.x.reshape(1, -1), np.array([self.y]))


@dataclass(frozen=True)
class DomainPair:
    """Labeled source, ordered unlabeled targets, one labeled calibration sample."""
    source: Dataset
    target_inputs: np.ndarray
    calibration: LabeledSample

    def __post_init__(self):
        t = _frozen(self.target_inputs)
        if t.ndim != 2:
            raise InvalidInputError(f"target inputs must be 2-D, got shape {t.shape}")
        object.__setattr__(self, "target_inputs", t)
        self.source.require_labels()
        if self.source.size < 1 or t.shape[0] < 1:
            raise InvalidInputError("source and target sets must be non-empty")
        d = self.source.dim
        if t.shape[1] != d or self.calibration.x.shape[0] != d:
            raise InvalidInputError(
                f"feature dimensions disagree: source {d}, target {t.shape[1]}, "
                f"calibration {self.calibration.x.shape[0]}"
            )

    @property
    def q(self) -> int:
        return self.source.size

    @property
    def p(self) -> int:
        return self.target_inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.source.dim

    def initial_pool(self) -> Dataset:
        """S_0 = source plus the calibration sample."""
        return Dataset.concat(self.source, self.calibration.as_dataset())

    def reordered(self, permutation) -> "DomainPair":
        perm = np.asarray(permutation, dtype=int)
        return DomainPair(self.source, self.target_inputs[perm], self.calibration)

    def with_inputs(self, source_inputs, target_inputs, calibration_input) -> "DomainPair":
        """Same labels, transformed features."""
        return DomainPair(
            Dataset(source_inputs, self.source.labels),
            target_inputs,
            LabeledSample(calibration_input, self.calibration.y),
        )


@dataclass(frozen=True)
class ScoredPair:
    """A DomainPair plus hidden target labels, read only by the scorer."""
    pair: DomainPair
    _truth: np.ndarray = field(repr=False)
    target_ids: Optional[np.ndarray] = None

    def __post_init__(self):
        truth = _frozen(self._truth).reshape(-1)
        if truth.shape[0] != self.pair.p:
            raise InvalidInputError(
                f"truth has {truth.shape[0]} labels for {self.pair.p} targets"
            )
        object.__setattr__(self, "_truth", truth)
        ids = np.arange(self.pair.p) if self.target_ids is None else np.asarray(self.target_ids)
        object.__setattr__(self, "target_ids", ids.astype(int))

    def truth_for_scoring(self) -> np.ndarray:
        return self._truth

    def reordered(self, permutation) -> "ScoredPair":
        perm = np.asarray(permutation, dtype=int)
        return ScoredPair(self.pair.reordered(perm), self._truth[perm], self.target_ids[perm])

    def with_truth(self, truth) -> "ScoredPair":
        return ScoredPair(self.pair, truth, self.target_ids)
