# preprocessing/normalize.py

"""Max-min normalisation fitted per column."""

from dataclasses import dataclass

import numpy as np

from core.errors import InvalidInputError
from numerics.linalg import as_matrix


@dataclass(frozen=True)
class MinMaxParams:
    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        if np.any(self.minimum > self.maximum):
            raise InvalidInputError("min exceeds max for some column")


def minmax_fit(data) -> MinMaxParams:
    x = as_matrix(data, "data")
    if x.shape[0] == 0:
        raise InvalidInputError("cannot fit normalisation on empty data")
    return MinMaxParams(x.min(axis=0), x.max(axis=0))


def minmax_apply(params: MinMaxParams, data) -> np.ndarray:
    """(x - min) / (max - min); constant columns map to 0; no clipping."""
    x = as_matrix(data, "data")
    if x.shape[1] != params.minimum.shape[0]:
        raise InvalidInputError(
            f"data has {x.shape[1]} columns, normalisation was fitted on {params.minimum.shape[0]}"
        )
    span = params.maximum - params.minimum
    constant = span == 0
    out = (x - params.minimum) / np.where(constant, 1.0, span)
    out[:, constant] = 0.0
    return out
