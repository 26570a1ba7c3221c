# learner/__init__.py

"""
Base learners.
- mlp: feed-forward network with full-batch gradient descent
- ridge: closed-form ridge regression (deterministic, for oracle runs)
- base: the Learner interface
"""

from learner.base import Learner, MlpLearner, Predictor
from learner.mlp import (
    MlpModel, MlpSpec, gradient_check, initialize_model,
    model_from_json, model_to_json, predict, train,
)
from learner.ridge import RidgeLearner, RidgeModel
