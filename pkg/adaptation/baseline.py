# adaptation/baseline.py

"""No adaptation: train on source plus calibration, predict the targets."""

import numpy as np

from domain.data import DomainPair
from learner.base import Learner, MlpLearner
from learner.mlp import MlpSpec


def run_baseline(pair: DomainPair, base: MlpSpec, learner: Learner = None) -> np.ndarray:
    learner = learner or MlpLearner(base)
    model = learner.fit(pair.initial_pool())
    return model.predict(pair.target_inputs)
