# tests/conftest.py

"""Shared fixtures: tiny domain pairs, deterministic learners, fast network specs."""

import numpy as np
import pytest

from datagen.friedman import FriedmanBenchmarkSpec, make_friedman_benchmark
from domain.data import Dataset, DomainPair, LabeledSample
from learner.mlp import MlpSpec


class NearestNeighbourLearner:
    """Lookup table: predicts the label of the closest pooled row."""

    name = "nn1"

    def fit(self, data, sample_weights=None, init=None):
        return _Lookup(data.inputs.copy(), data.require_labels().copy())


class _Lookup:
    def __init__(self, x, y):
        self.x, self.y = x, y

    def predict(self, inputs):
        q = np.asarray(inputs, dtype=np.float64)
        d = np.sum((q[:, None, :] - self.x[None, :, :]) ** 2, axis=2)
        return self.y[np.argmin(d, axis=1)]


class ConstantModel:
    def __init__(self, value):
        self.value = value

    def predict(self, inputs):
        return np.full(np.asarray(inputs).shape[0], float(self.value))


def make_linear_pair(rng, q=6, p=3, dim=2, shift=0.5, noise=0.0) -> DomainPair:
    """Linear law y = x . w + 1, targets shifted away from the source."""
    w = rng.normal(size=dim)
    xs = rng.uniform(0.0, 1.0, (q, dim))
    ys = xs @ w + 1.0 + noise * rng.normal(size=q)
    xt = rng.uniform(0.0, 1.0, (p, dim)) + shift
    xc = rng.uniform(0.0, 1.0, dim) + shift
    return DomainPair(Dataset(xs, ys), xt, LabeledSample(xc, float(xc @ w + 1.0)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def nn_learner():
    return NearestNeighbourLearner()


@pytest.fixture
def fast_spec():
    return MlpSpec(layer_sizes=(5, 8, 1), learning_rate=0.05, epochs=40, seed=3)


@pytest.fixture
def small_friedman():
    """A 20-source / 8-target Friedman instance, targets in distance order."""
    return make_friedman_benchmark(FriedmanBenchmarkSpec(n_source=20, n_target=8))
