# learner/mlp.py

"""
Feed-forward regression network trained on the full batch every epoch.

- Glorot-uniform initialisation from numpy's PCG64 generator seeded by
  MlpSpec.seed, biases zero
- hidden activation tanh / sigmoid / relu, identity output
- (weighted) mean squared error; weights are normalised by their sum
- optimizer "gd" (plain gradient descent) or "adam" (full-batch Adam,
  moments restart at zero on a warm start)
- optional input and target standardisation with the training statistics,
  stored on the model and applied / undone at prediction time
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.config import config
from core.errors import DivergenceError, InvalidInputError
from domain.data import Dataset

logger = logging.getLogger(__name__)

ACTIVATIONS = ("tanh", "sigmoid", "relu")
OPTIMIZERS = ("gd", "adam")

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


@dataclass(frozen=True)
class MlpSpec:
    layer_sizes: Tuple[int, ...] = config.learner.layer_sizes
    learning_rate: float = config.learner.learning_rate
    epochs: int = config.learner.epochs
    activation: str = config.learner.activation
    seed: int = 0
    scale_targets: bool = config.learner.scale_targets
    scale_inputs: bool = config.learner.scale_inputs
    optimizer: str = config.learner.optimizer

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise InvalidInputError(f"layer_sizes must have >= 2 positive entries, got {sizes}")
        if sizes[-1] != 1:
            raise InvalidInputError(f"last layer size must be 1, got {sizes[-1]}")
        if self.epochs < 0:
            raise InvalidInputError(f"epochs must be >= 0, got {self.epochs}")
        if not self.learning_rate > 0:
            raise InvalidInputError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.activation not in ACTIVATIONS:
            raise InvalidInputError(
                f"activation must be one of {ACTIVATIONS}, got {self.activation!r}"
            )
        if self.optimizer not in OPTIMIZERS:
            raise InvalidInputError(
                f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}"
            )

    def with_seed(self, seed: int) -> "MlpSpec":
        return replace(self, seed=int(seed))

    def with_input_dim(self, dim: int) -> "MlpSpec":
        return replace(self, layer_sizes=(int(dim),) + self.layer_sizes[1:])


@dataclass(frozen=True)
class MlpModel:
    spec: MlpSpec
    weights: Tuple[np.ndarray, ...]     # layer l: (fan_in, fan_out)
    biases: Tuple[np.ndarray, ...]
    final_training_loss: float = float("nan")
    target_offset: float = 0.0
    target_scale: float = 1.0
    loss_history: Tuple[float, ...] = field(default=(), repr=False)
    input_offset: Optional[np.ndarray] = field(default=None, repr=False)   # None = zeros
    input_scale: Optional[np.ndarray] = field(default=None, repr=False)    # None = ones

    def __post_init__(self):
        sizes = self.spec.layer_sizes
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise InvalidInputError("parameter count does not match layer_sizes")
        ws, bs = [], []
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            w = np.array(w, dtype=np.float64).reshape(sizes[l], sizes[l + 1])
            b = np.array(b, dtype=np.float64).reshape(sizes[l + 1])
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise InvalidInputError(f"layer {l} has non-finite parameters")
            w.setflags(write=False)
            b.setflags(write=False)
            ws.append(w)
            bs.append(b)
        object.__setattr__(self, "weights", tuple(ws))
        object.__setattr__(self, "biases", tuple(bs))

        dim = sizes[0]
        off = np.zeros(dim) if self.input_offset is None else np.array(self.input_offset, dtype=np.float64)
        scl = np.ones(dim) if self.input_scale is None else np.array(self.input_scale, dtype=np.float64)
        if off.shape != (dim,) or scl.shape != (dim,) or np.any(scl <= 0):
            raise InvalidInputError(f"input scaling must be {dim} offsets and {dim} positive scales")
        off.setflags(write=False)
        scl.setflags(write=False)
        object.__setattr__(self, "input_offset", off)
        object.__setattr__(self, "input_scale", scl)

    @property
    def input_dim(self) -> int:
        return self.spec.layer_sizes[0]

    def predict(self, inputs) -> np.ndarray:
        return predict(self, inputs)


# ============================================================
# Activations
# ============================================================

def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _activation(name: str) -> Tuple[Callable, Callable]:
    """(f, f') with f' taking the pre-activation and the activation."""
    if name == "tanh":
        return np.tanh, lambda z, a: 1.0 - a * a
    if name == "sigmoid":
        return _sigmoid, lambda z, a: a * (1.0 - a)
    if name == "relu":
        return (lambda z: np.maximum(z, 0.0)), (lambda z, a: (z > 0).astype(np.float64))
    raise InvalidInputError(f"unknown activation {name!r}")


# ============================================================
# Forward / backward
# ============================================================

def _forward(weights, biases, x: np.ndarray, act: Callable):
    """Returns (output vector, activations per layer, pre-activations per layer)."""
    acts = [x]
    pres = []
    a = x
    last = len(weights) - 1
    for l, (w, b) in enumerate(zip(weights, biases)):
        z = a @ w + b
        pres.append(z)
        a = z if l == last else act(z)
        acts.append(a)
    return a[:, 0], acts, pres


def _loss_and_grads(weights, biases, x, t, coeffs, act, dact):
    out, acts, pres = _forward(weights, biases, x, act)
    resid = out - t
    loss = float(np.sum(coeffs * resid * resid))
    delta = (2.0 * coeffs * resid)[:, None]
    grads_w: List[np.ndarray] = [None] * len(weights)
    grads_b: List[np.ndarray] = [None] * len(weights)
    for l in range(len(weights) - 1, -1, -1):
        grads_w[l] = acts[l].T @ delta
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ weights[l].T) * dact(pres[l - 1], acts[l])
    return loss, grads_w, grads_b


def _adam_step(params, grads, m, v, lr: float, k: int) -> List[np.ndarray]:
    """One bias-corrected Adam update at step k >= 1; m and v are updated in place."""
    c1 = 1.0 - _ADAM_BETA1 ** k
    c2 = 1.0 - _ADAM_BETA2 ** k
    out = []
    for i, (p, g) in enumerate(zip(params, grads)):
        m[i] = _ADAM_BETA1 * m[i] + (1.0 - _ADAM_BETA1) * g
        v[i] = _ADAM_BETA2 * v[i] + (1.0 - _ADAM_BETA2) * (g * g)
        out.append(p - lr * (m[i] / c1) / (np.sqrt(v[i] / c2) + _ADAM_EPS))
    return out


def _check_inputs(spec: MlpSpec, x: np.ndarray) -> None:
    if x.ndim != 2 or x.shape[1] != spec.layer_sizes[0]:
        raise InvalidInputError(
            f"input has {x.shape[-1] if x.ndim else 0} columns, "
            f"network expects {spec.layer_sizes[0]}"
        )


def _coefficients(n: int, sample_weights) -> np.ndarray:
    w = np.ones(n) if sample_weights is None else np.array(sample_weights, dtype=np.float64)
    if w.shape != (n,):
        raise InvalidInputError(f"sample_weights must have length {n}, got shape {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidInputError("sample_weights must be finite and non-negative")
    total = w.sum()
    if not total > 0:
        raise InvalidInputError("sample_weights sum to zero")
    return w / total


def _target_scaling(spec: MlpSpec, y: np.ndarray) -> Tuple[float, float]:
    if not spec.scale_targets:
        return 0.0, 1.0
    offset = float(np.mean(y))
    scale = float(np.std(y))
    return offset, (scale if scale > 1e-12 else 1.0)


def _input_scaling(spec: MlpSpec, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    dim = x.shape[1]
    if not spec.scale_inputs:
        return np.zeros(dim), np.ones(dim)
    scale = x.std(axis=0)
    return x.mean(axis=0), np.where(scale > 1e-12, scale, 1.0)


def _scaled(model: MlpModel, x: np.ndarray) -> np.ndarray:
    return (x - model.input_offset) / model.input_scale


def _scaled_targets(model: MlpModel, data: Dataset) -> np.ndarray:
    return (data.require_labels() - model.target_offset) / model.target_scale


# ============================================================
# Public API
# ============================================================

def initialize_model(spec: MlpSpec, data: Dataset) -> MlpModel:
    """The seeded starting point of train(): what train returns when epochs = 0."""
    if data.size == 0:
        raise InvalidInputError("cannot train on an empty dataset")
    _check_inputs(spec, data.inputs)
    y = data.require_labels()
    rng = np.random.default_rng(spec.seed)
    sizes = spec.layer_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    offset, scale = _target_scaling(spec, y)
    x_off, x_scale = _input_scaling(spec, data.inputs)
    model = MlpModel(
        spec, tuple(weights), tuple(biases),
        target_offset=offset, target_scale=scale,
        input_offset=x_off, input_scale=x_scale,
    )
    loss = training_loss(model, data)
    return replace(model, final_training_loss=loss)


def training_loss(model: MlpModel, data: Dataset, sample_weights=None) -> float:
    """Loss in the model's (possibly standardised) target space."""
    _check_inputs(model.spec, data.inputs)
    act, _ = _activation(model.spec.activation)
    out, _, _ = _forward(model.weights, model.biases, _scaled(model, data.inputs), act)
    coeffs = _coefficients(data.size, sample_weights)
    r = out - _scaled_targets(model, data)
    return float(np.sum(coeffs * r * r))


def loss_gradient(model: MlpModel, data: Dataset, sample_weights=None):
    """Analytic gradient of the training loss: (loss, [dW per layer], [db per layer])."""
    _check_inputs(model.spec, data.inputs)
    act, dact = _activation(model.spec.activation)
    coeffs = _coefficients(data.size, sample_weights)
    return _loss_and_grads(
        model.weights, model.biases, _scaled(model, data.inputs),
        _scaled_targets(model, data), coeffs, act, dact,
    )


def train(
    spec: MlpSpec,
    data: Dataset,
    sample_weights: Optional[Sequence[float]] = None,
    init: Optional[MlpModel] = None,
) -> MlpModel:
    """
    spec.epochs full-batch updates. A warm start keeps init's parameters and
    its input / target scaling.
    """
    start = initialize_model(spec, data)
    coeffs = _coefficients(data.size, sample_weights)
    act, dact = _activation(spec.activation)

    if init is not None:
        if init.spec.layer_sizes != spec.layer_sizes:
            raise InvalidInputError("warm-start model has different layer sizes")
        start = replace(
            start,
            weights=init.weights,
            biases=init.biases,
            target_offset=init.target_offset,
            target_scale=init.target_scale,
            input_offset=init.input_offset,
            input_scale=init.input_scale,
        )
    elif spec.epochs == 0:
        return start

    x = _scaled(start, data.inputs)
    t = _scaled_targets(start, data)
    lr = spec.learning_rate
    layers = len(start.weights)
    params = [np.array(p) for p in start.weights + start.biases]
    first = [np.zeros_like(p) for p in params]
    second = [np.zeros_like(p) for p in params]
    history = []
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(spec.epochs):
            loss, gw, gb = _loss_and_grads(params[:layers], params[layers:], x, t, coeffs, act, dact)
            if not math.isfinite(loss):
                raise DivergenceError(epoch, loss)
            history.append(loss)
            grads = gw + gb
            if spec.optimizer == "adam":
                params = _adam_step(params, grads, first, second, lr, epoch + 1)
            else:
                params = [p - lr * g for p, g in zip(params, grads)]
        out, _, _ = _forward(params[:layers], params[layers:], x, act)
    r = out - t
    final = float(np.sum(coeffs * r * r))
    if not math.isfinite(final):
        raise DivergenceError(spec.epochs, final)
    return replace(
        start,
        spec=spec,
        weights=tuple(params[:layers]),
        biases=tuple(params[layers:]),
        final_training_loss=final,
        loss_history=tuple(history),
    )


def predict(model: MlpModel, inputs) -> np.ndarray:
    """Deterministic forward pass, mapped back to label units."""
    x = np.asarray(inputs, dtype=np.float64)
    _check_inputs(model.spec, x)
    act, _ = _activation(model.spec.activation)
    out, _, _ = _forward(model.weights, model.biases, _scaled(model, x), act)
    return out * model.target_scale + model.target_offset


def gradient_check(spec: MlpSpec, data: Dataset, fd_step: float = 1e-5) -> float:
    """
    Max relative discrepancy between the backprop gradient of the training
    loss at the seeded initialisation and central finite differences.
    Entries where both gradients are below 1e-10 count as exact.
    """
    if not 0 < fd_step <= 1e-3:
        raise InvalidInputError(f"fd_step must be in (0, 1e-3], got {fd_step}")
    model = initialize_model(spec, data)
    act, dact = _activation(spec.activation)
    t = _scaled_targets(model, data)
    coeffs = _coefficients(data.size, None)
    x = _scaled(model, data.inputs)
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    _, gw, gb = _loss_and_grads(weights, biases, x, t, coeffs, act, dact)

    def loss_at() -> float:
        out, _, _ = _forward(weights, biases, x, act)
        r = out - t
        return float(np.sum(coeffs * r * r))

    worst = 0.0
    for params, grads in ((weights, gw), (biases, gb)):
        for p, g in zip(params, grads):
            flat, gflat = p.reshape(-1), g.reshape(-1)
            for i in range(flat.size):
                saved = flat[i]
                flat[i] = saved + fd_step
                up = loss_at()
                flat[i] = saved - fd_step
                down = loss_at()
                flat[i] = saved
                numeric = (up - down) / (2.0 * fd_step)
                analytic = float(gflat[i])
                big = max(abs(numeric), abs(analytic))
                if big < 1e-10:
                    continue
                worst = max(worst, abs(numeric - analytic) / max(big, 1e-5))
    return worst


# ============================================================
# Serialisation
# ============================================================

def model_to_dict(model: MlpModel) -> Dict:
    return {
        "layer_sizes": list(model.spec.layer_sizes),
        "activation": model.spec.activation,
        "learning_rate": model.spec.learning_rate,
        "epochs": model.spec.epochs,
        "seed": model.spec.seed,
        "optimizer": model.spec.optimizer,
        "scale_targets": model.spec.scale_targets,
        "scale_inputs": model.spec.scale_inputs,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "target_offset": model.target_offset,
        "target_scale": model.target_scale,
        "input_offset": model.input_offset.tolist(),
        "input_scale": model.input_scale.tolist(),
        "final_training_loss": model.final_training_loss,
    }


def model_from_dict(d: Dict) -> MlpModel:
    spec = MlpSpec(
        layer_sizes=tuple(d["layer_sizes"]),
        learning_rate=d.get("learning_rate", 0.1),
        epochs=d.get("epochs", 0),
        activation=d.get("activation", "tanh"),
        seed=d.get("seed", 0),
        scale_targets=d.get("scale_targets", True),
        scale_inputs=d.get("scale_inputs", False),
        optimizer=d.get("optimizer", "gd"),
    )
    return MlpModel(
        spec,
        tuple(np.array(w) for w in d["weights"]),
        tuple(np.array(b) for b in d["biases"]),
        final_training_loss=d.get("final_training_loss", float("nan")),
        target_offset=d.get("target_offset", 0.0),
        target_scale=d.get("target_scale", 1.0),
        input_offset=d.get("input_offset"),
        input_scale=d.get("input_scale"),
    )


def model_to_json(model: MlpModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True)


def model_from_json(text: str) -> MlpModel:
    return model_from_dict(json.loads(text))
