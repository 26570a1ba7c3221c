# adaptation/oracle.py

"""
Exhaustive optimum of the self-labeling decision problem on tiny instances.

A labeling assigns every target a value from a finite grid. Walking the
blocks in order, step n trains on S_0 plus the targets of blocks 0..n with
their assigned labels and pays r_n = |f_n(x_c) - y_c|. The oracle
enumerates every assignment and returns the one with the least total;
greedy runs are scored on the same objective through dp_objective.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from adaptation.self_labeling import (
    AdaptationConfig, blocks, calibration_loss, fit_step, pool_with,
)
from core.config import config
from core.errors import InvalidInputError
from domain.data import DomainPair
from learner.base import Learner, MlpLearner

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    best_labels: np.ndarray
    min_total_loss: float
    evaluated: int      # number of complete assignments enumerated


def _check_labels(pair: DomainPair, labels) -> np.ndarray:
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if y.shape[0] != pair.p:
        raise InvalidInputError(f"expected {pair.p} labels, got {y.shape[0]}")
    return y


def dp_objective(
    pair: DomainPair,
    cfg: AdaptationConfig,
    labels,
    learner: Learner = None,
) -> np.ndarray:
    """Per-step losses of a fixed labeling, one entry per block."""
    learner = learner or MlpLearner(cfg.base)
    y = _check_labels(pair, labels)
    losses = []
    model = None
    for n, (_, stop) in enumerate(blocks(pair.p, cfg.eta)):
        model = fit_step(learner, pool_with(pair, y, stop), "oracle", n,
                         model if cfg.warm_start else None)
        losses.append(calibration_loss(model, pair.calibration))
    return np.array(losses)


def total_loss(losses: Sequence[float]) -> float:
    """Left-to-right sum, matching the oracle's accumulation order."""
    total = 0.0
    for r in losses:
        total += float(r)
    return total


def dp_exhaustive_oracle(
    pair: DomainPair,
    cfg: AdaptationConfig,
    label_grid: Sequence[float],
    learner: Learner = None,
    budget: Optional[int] = None,
) -> OracleResult:
    """
    Depth-first enumeration over blocks. A step's loss depends only on the
    labels of blocks up to it, so each prefix is trained once. Ties keep the
    first assignment in grid order.
    """
    grid = tuple(sorted(set(float(v) for v in label_grid)))
    if not grid:
        raise InvalidInputError("label_grid is empty")
    budget = config.self_labeling.oracle_budget if budget is None else budget
    count = len(grid) ** pair.p
    if count > budget:
        raise InvalidInputError(
            f"{len(grid)}^{pair.p} = {count} assignments exceed the budget of {budget}"
        )
    learner = learner or MlpLearner(cfg.base)
    block_list = blocks(pair.p, cfg.eta)
    labels = np.zeros(pair.p)
    best = {"total": np.inf, "labels": None}
    evaluated = 0

    def descend(n: int, partial: float, prev_model) -> None:
        nonlocal evaluated
        if n == len(block_list):
            evaluated += 1
            if partial < best["total"]:
                best["total"] = partial
                best["labels"] = labels.copy()
            return
        start, stop = block_list[n]
        for choice in itertools.product(grid, repeat=stop - start):
            labels[start:stop] = choice
            model = fit_step(learner, pool_with(pair, labels, stop), "oracle", n,
                             prev_model if cfg.warm_start else None)
            descend(n + 1, partial + calibration_loss(model, pair.calibration), model)

    descend(0, 0.0, None)
    logger.info("[Oracle] %d assignments, minimum total loss %.6f", evaluated, best["total"])
    return OracleResult(best["labels"], float(best["total"]), evaluated)


def greedy_gap(
    pair: DomainPair,
    cfg: AdaptationConfig,
    greedy_labels,
    oracle: OracleResult,
    learner: Learner = None,
) -> float:
    """Objective of a greedy labeling minus the oracle minimum (>= 0)."""
    return total_loss(dp_objective(pair, cfg, greedy_labels, learner)) - oracle.min_total_loss


def label_grid_from(values: Sequence[float], points: int) -> List[float]:
    """Evenly spaced grid spanning the given labels."""
    v = np.asarray(values, dtype=np.float64)
    if points < 1:
        raise InvalidInputError("points must be >= 1")
    if points == 1:
        return [float(v.mean())]
    return np.linspace(v.min(), v.max(), points).tolist()
