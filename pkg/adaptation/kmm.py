# adaptation/kmm.py

"""
Kernel mean matching: re-weight source samples so their weighted mean
embedding matches the target mean embedding, then train the base learner
on the weighted pool.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from adaptation.kernels import gaussian_kernel
from core.config import config
from core.errors import InvalidInputError
from domain.data import DomainPair
from learner.base import Learner, MlpLearner
from learner.mlp import MlpSpec
from numerics.linalg import as_matrix
from numerics.qp import QpProblem, solve_qp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KmmConfig:
    bandwidth: float = config.kmm.bandwidth
    box_upper: float = config.kmm.box_upper
    slack: Optional[float] = config.kmm.slack
    qp_tol: float = config.kmm.qp_tol
    qp_max_iter: int = config.kmm.qp_max_iter

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise InvalidInputError(f"bandwidth must be > 0, got {self.bandwidth}")


def default_slack(q: int) -> float:
    return (math.sqrt(q) - 1.0) / math.sqrt(q)


def kmm_problem(source_inputs, target_inputs, cfg: KmmConfig) -> QpProblem:
    xs = as_matrix(source_inputs, "source_inputs")
    xt = as_matrix(target_inputs, "target_inputs")
    if xs.shape[1] != xt.shape[1]:
        raise InvalidInputError(f"dimension mismatch: {xs.shape[1]} vs {xt.shape[1]}")
    q, p = xs.shape[0], xt.shape[0]
    k = gaussian_kernel(xs, xs, cfg.bandwidth)
    k = 0.5 * (k + k.T)
    kappa = (q / p) * gaussian_kernel(xs, xt, cfg.bandwidth).sum(axis=1)
    slack = default_slack(q) if cfg.slack is None else cfg.slack
    return QpProblem(k, kappa, cfg.box_upper, slack, 1.0)


def kmm_weights(source_inputs, target_inputs, cfg: KmmConfig = None) -> np.ndarray:
    """Importance weights for the source rows (length q)."""
    cfg = cfg or KmmConfig()
    problem = kmm_problem(source_inputs, target_inputs, cfg)
    solution = solve_qp(problem, tol=cfg.qp_tol, max_iter=cfg.qp_max_iter)
    w = solution.weights
    logger.debug(
        "[KMM] q=%d weights in [%.3g, %.3g], mean %.3f (%d iterations)",
        w.size, w.min(), w.max(), w.mean(), solution.iterations,
    )
    return w


def run_kmm(
    pair: DomainPair,
    base: MlpSpec,
    cfg: KmmConfig = None,
    learner: Learner = None,
) -> np.ndarray:
    """Weights for source + calibration against the targets, then weighted training."""
    learner = learner or MlpLearner(base)
    pool = pair.initial_pool()
    weights = kmm_weights(pool.inputs, pair.target_inputs, cfg)
    model = learner.fit(pool, sample_weights=weights)
    return model.predict(pair.target_inputs)
