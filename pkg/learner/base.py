# learner/base.py

"""
Learner interface used by the adaptation methods.
A learner turns a labeled Dataset (plus optional sample weights and an
optional warm-start predictor) into a predictor.
"""

from typing import Optional, Protocol, Sequence

import numpy as np

from domain.data import Dataset
from learner.mlp import MlpModel, MlpSpec, train


class Predictor(Protocol):
    def predict(self, inputs) -> np.ndarray: ...


class Learner(Protocol):
    name: str

    def fit(
        self,
        data: Dataset,
        sample_weights: Optional[Sequence[float]] = None,
        init: Optional[Predictor] = None,
    ) -> Predictor: ...


class MlpLearner:
    """Feed-forward network base learner; first layer follows the data dimension."""

    name = "mlp"

    def __init__(self, spec: MlpSpec):
        self.spec = spec

    def fit(self, data: Dataset, sample_weights=None, init=None) -> MlpModel:
        spec = self.spec
        if spec.layer_sizes[0] != data.dim:
            spec = spec.with_input_dim(data.dim)
        warm = init if isinstance(init, MlpModel) else None
        return train(spec, data, sample_weights=sample_weights, init=warm)

    def __repr__(self) -> str:
        return f"MlpLearner({self.spec})"
