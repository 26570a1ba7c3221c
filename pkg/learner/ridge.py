# learner/ridge.py

"""Closed-form ridge regression with an unpenalised intercept."""

from dataclasses import dataclass

import numpy as np

from core.errors import InvalidInputError
from domain.data import Dataset


@dataclass(frozen=True)
class RidgeModel:
    coef: np.ndarray
    intercept: float

    def predict(self, inputs) -> np.ndarray:
        x = np.asarray(inputs, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.coef.shape[0]:
            raise InvalidInputError(
                f"input has shape {x.shape}, model expects {self.coef.shape[0]} columns"
            )
        return x @ self.coef + self.intercept


class RidgeLearner:
    """Deterministic learner for oracle experiments: (weighted) ridge on centred data."""

    name = "ridge"

    def __init__(self, alpha: float = 1e-3):
        if not alpha >= 0:
            raise InvalidInputError(f"alpha must be >= 0, got {alpha}")
        self.alpha = alpha

    def fit(self, data: Dataset, sample_weights=None, init=None) -> RidgeModel:
        if data.size == 0:
            raise InvalidInputError("cannot fit on an empty dataset")
        x, y = data.inputs, data.require_labels()
        w = np.ones(data.size) if sample_weights is None else np.asarray(sample_weights, float)
        w = w / w.sum()
        x_mean = w @ x
        y_mean = float(w @ y)
        xc = x - x_mean
        yc = y - y_mean
        gram = xc.T @ (w[:, None] * xc) + self.alpha * np.eye(x.shape[1])
        coef = np.linalg.solve(gram, xc.T @ (w * yc))
        return RidgeModel(coef, y_mean - float(x_mean @ coef))

    def __repr__(self) -> str:
        return f"RidgeLearner(alpha={self.alpha})"
