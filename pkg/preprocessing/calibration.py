# preprocessing/calibration.py

"""Calibration-point choice."""

from typing import Optional

import numpy as np

from core.errors import InvalidInputError
from domain.data import Dataset, LabeledSample
from numerics.linalg import as_matrix


def choose_calibration(
    source: Dataset,
    targets,
    provided: Optional[LabeledSample] = None,
) -> LabeledSample:
    """
    A provided labeled target sample wins. Otherwise the source sample with
    the least mean Euclidean distance to the targets (lowest index on ties).
    """
    if source.size == 0:
        raise InvalidInputError("source set is empty")
    if provided is not None:
        return provided
    t = as_matrix(targets, "targets")
    if t.shape[0] == 0:
        raise InvalidInputError("no targets to measure distance against")
    if t.shape[1] != source.dim:
        raise InvalidInputError(
            f"targets have {t.shape[1]} columns, source has {source.dim}"
        )
    labels = source.require_labels()
    diffs = source.inputs[:, None, :] - t[None, :, :]
    mean_dist = np.sqrt(np.sum(diffs * diffs, axis=2)).mean(axis=1)
    best = int(np.argmin(mean_dist))
    return LabeledSample(source.inputs[best], labels[best])
