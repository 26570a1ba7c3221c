# adaptation/self_labeling.py

"""
Iterative self-labeling domain adaptation.

Targets are visited in the order given by the DomainPair (see
preprocessing.order_targets) in blocks of eta. Every training pool starts
from S_0 = source + calibration with their original labels.

- ISDA: train on the pool, pseudo-label the next block, append it, never
  touch those labels again
- Re-ISDA: train on the pool, re-predict every target added so far plus
  the next block, and rebuild the pool from S_0 and the fresh labels

Both record the state loss r_n = |f_n(x_c) - y_c| of the model trained at
step n on the calibration sample.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.config import config
from core.errors import AdaptationStepError, InvalidInputError, ReisdaError
from domain.data import Dataset, DomainPair, LabeledSample
from learner.base import Learner, MlpLearner, Predictor
from learner.mlp import MlpSpec
from preprocessing.sequence import order_targets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdaptationConfig:
    """
    eta:        targets added per step
    renew:      False = ISDA, True = Re-ISDA
    warm_start: initialise each fit from the previous step's model
    epochs:     Re-ISDA iteration count P; None = ceil(p / eta). Extra
                iterations past full coverage re-label every target again.
    label_grid: optional sorted candidates pseudo-labels are snapped to
    """
    eta: int = config.self_labeling.eta
    base: MlpSpec = field(default_factory=MlpSpec)
    renew: bool = True
    warm_start: bool = config.self_labeling.warm_start
    epochs: Optional[int] = None
    label_grid: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if int(self.eta) < 1:
            raise InvalidInputError(f"eta must be >= 1, got {self.eta}")
        if self.epochs is not None and int(self.epochs) < 1:
            raise InvalidInputError(f"epochs must be >= 1, got {self.epochs}")
        if self.label_grid is not None:
            grid = tuple(sorted(set(float(v) for v in self.label_grid)))
            if not grid or not all(math.isfinite(v) for v in grid):
                raise InvalidInputError("label_grid must be a non-empty set of finite values")
            object.__setattr__(self, "label_grid", grid)

    @property
    def method(self) -> str:
        return "re_isda" if self.renew else "isda"

    def block_count(self, p: int) -> int:
        return math.ceil(p / self.eta)

    def check_against(self, pair: DomainPair) -> None:
        if self.eta > pair.p:
            raise InvalidInputError(f"eta = {self.eta} exceeds the {pair.p} targets")


@dataclass(frozen=True)
class IterationState:
    step: int
    labeled_pool: Dataset           # u1: the pool the step's model was trained on
    pending_block: np.ndarray       # u2: target inputs labeled for the first time at this step
    pseudo_labels: np.ndarray       # labels of every target added so far, after this step
    state_loss: float               # r_n
    block: Tuple[int, int] = (0, 0)  # [start, stop) target indices of u2


def snap_to_grid(values: np.ndarray, grid: Optional[Sequence[float]]) -> np.ndarray:
    """Nearest grid value per entry; ties go to the lower value."""
    v = np.asarray(values, dtype=np.float64)
    if grid is None:
        return v
    g = np.asarray(grid, dtype=np.float64)
    idx = np.argmin(np.abs(v[:, None] - g[None, :]), axis=1)
    return g[idx]


def blocks(p: int, eta: int) -> List[Tuple[int, int]]:
    """Contiguous [start, stop) blocks; the last one may be partial."""
    return [(s, min(s + eta, p)) for s in range(0, p, eta)]


def pool_with(pair: DomainPair, labels: np.ndarray, count: int) -> Dataset:
    """S_0 followed by the first `count` targets with the given labels."""
    s0 = pair.initial_pool()
    if count == 0:
        return s0
    return Dataset.concat(s0, Dataset(pair.target_inputs[:count], np.asarray(labels)[:count]))


def fit_step(
    learner: Learner,
    pool: Dataset,
    method: str,
    step: int,
    init: Optional[Predictor] = None,
) -> Predictor:
    try:
        return learner.fit(pool, init=init)
    except ReisdaError as e:
        raise AdaptationStepError(method, step, e) from e
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        raise AdaptationStepError(method, step, e) from e


def calibration_loss(model: Predictor, calibration: LabeledSample) -> float:
    return float(abs(model.predict(calibration.x.reshape(1, -1))[0] - calibration.y))


def _learner(cfg: AdaptationConfig, learner: Optional[Learner]) -> Learner:
    return learner or MlpLearner(cfg.base)


# ============================================================
# ISDA
# ============================================================

def run_isda(
    pair: DomainPair,
    cfg: AdaptationConfig,
    learner: Learner = None,
) -> Tuple[np.ndarray, List[IterationState]]:
    """Self-labeling with pseudo-labels fixed once assigned."""
    cfg.check_against(pair)
    learner = _learner(cfg, learner)
    p = pair.p
    labels = np.zeros(p)
    states: List[IterationState] = []
    model = None

    for n, (start, stop) in enumerate(blocks(p, cfg.eta)):
        pool = pool_with(pair, labels, start)
        model = fit_step(learner, pool, "isda", n, model if cfg.warm_start else None)
        r = calibration_loss(model, pair.calibration)
        new = snap_to_grid(model.predict(pair.target_inputs[start:stop]), cfg.label_grid)
        labels[start:stop] = new
        states.append(IterationState(
            n, pool, pair.target_inputs[start:stop], labels[:stop].copy(), r, (start, stop)
        ))
        logger.debug("[ISDA] step %d: pool %d, block [%d, %d), r = %.5f", n, pool.size, start, stop, r)

    return labels, states


# ============================================================
# Re-ISDA
# ============================================================

def run_re_isda(
    pair: DomainPair,
    cfg: AdaptationConfig,
    learner: Learner = None,
) -> Tuple[np.ndarray, List[IterationState]]:
    """Self-labeling that renews every earlier pseudo-label at each iteration."""
    cfg.check_against(pair)
    learner = _learner(cfg, learner)
    p = pair.p
    needed = cfg.block_count(p)
    iterations = needed if cfg.epochs is None else int(cfg.epochs)
    if iterations < needed:
        raise InvalidInputError(
            f"epochs = {iterations} cannot cover {p} targets in blocks of {cfg.eta} "
            f"(need at least {needed})"
        )

    labels = np.zeros(0)
    covered = 0
    states: List[IterationState] = []
    model = None

    for k in range(iterations):
        pool = pool_with(pair, labels, covered)
        model = fit_step(learner, pool, "re_isda", k, model if cfg.warm_start else None)
        r = calibration_loss(model, pair.calibration)
        stop = min(p, (k + 1) * cfg.eta)
        labels = snap_to_grid(model.predict(pair.target_inputs[:stop]), cfg.label_grid)
        states.append(IterationState(
            k, pool, pair.target_inputs[covered:stop], labels.copy(), r, (covered, stop)
        ))
        logger.debug("[Re-ISDA] iteration %d: pool %d, renewed %d, r = %.5f", k, pool.size, stop, r)
        covered = stop

    return labels, states


def run_self_labeling(
    pair: DomainPair,
    cfg: AdaptationConfig,
    learner: Learner = None,
) -> Tuple[np.ndarray, List[IterationState]]:
    """Dispatch on cfg.renew."""
    if cfg.renew:
        return run_re_isda(pair, cfg, learner)
    if cfg.epochs is not None and cfg.epochs != cfg.block_count(pair.p):
        raise InvalidInputError("ISDA runs exactly ceil(p / eta) steps; leave epochs unset")
    return run_isda(pair, cfg, learner)


def loss_trace(states: Sequence[IterationState]) -> np.ndarray:
    if not states:
        raise InvalidInputError("no iteration states")
    return np.array([s.state_loss for s in states])


def run_re_isda_ensemble(
    pair: DomainPair,
    cfg: AdaptationConfig,
    calibrations: Sequence[LabeledSample],
    ordering: str = "by_distance",
    learner: Learner = None,
) -> np.ndarray:
    """
    Average of Re-ISDA runs, one per calibration sample. Each run orders the
    targets against its own calibration input; predictions come back in the
    pair's target order.
    """
    if not calibrations:
        raise InvalidInputError("need at least one calibration sample")
    total = np.zeros(pair.p)
    for c in calibrations:
        perm = order_targets(pair.target_inputs, c.x, ordering)
        run_pair = DomainPair(pair.source, pair.target_inputs[perm], c)
        preds, _ = run_re_isda(run_pair, replace(cfg, renew=True), learner)
        back = np.empty(pair.p)
        back[perm] = preds
        total += back
    return total / len(calibrations)
