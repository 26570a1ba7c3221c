# adaptation/tca.py

"""
Transfer component analysis.

Finds W maximising the generalised Rayleigh quotient of the centred kernel
K H K against (K L K + mu I), i.e. the latent directions that keep data
variance while shrinking the kernel MMD between source and target.
Both domains are then mapped to Z = K W and the base learner is trained
on the mapped source (plus the mapped calibration sample).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from adaptation.kernels import gaussian_kernel, median_bandwidth, mmd_coefficients
from core.config import config
from core.errors import InvalidInputError
from domain.data import Dataset, DomainPair
from learner.base import Learner, MlpLearner
from learner.mlp import MlpSpec
from numerics.linalg import as_matrix, symmetric_eig, symmetrize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TcaConfig:
    bandwidth: Optional[float] = config.tca.bandwidth
    latent_dim: int = config.tca.latent_dim
    mu: float = config.tca.mu

    def __post_init__(self):
        if self.latent_dim < 1:
            raise InvalidInputError(f"latent_dim must be >= 1, got {self.latent_dim}")
        if not self.mu > 0:
            raise InvalidInputError(f"mu must be > 0, got {self.mu}")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise InvalidInputError(f"bandwidth must be > 0, got {self.bandwidth}")


@dataclass(frozen=True)
class TcaModel:
    inputs: np.ndarray          # pooled source then target rows
    kernel: np.ndarray
    components: np.ndarray      # W, (q + p, m)
    eigenvalues: np.ndarray
    bandwidth: float
    q: int

    @property
    def p(self) -> int:
        return self.inputs.shape[0] - self.q

    @property
    def latent_dim(self) -> int:
        return self.components.shape[1]


def fit_tca(source_inputs, target_inputs, cfg: TcaConfig = None) -> TcaModel:
    cfg = cfg or TcaConfig()
    xs = as_matrix(source_inputs, "source_inputs")
    xt = as_matrix(target_inputs, "target_inputs")
    if xs.shape[1] != xt.shape[1]:
        raise InvalidInputError(f"dimension mismatch: {xs.shape[1]} vs {xt.shape[1]}")
    q, p = xs.shape[0], xt.shape[0]
    n = q + p
    if cfg.latent_dim > n:
        raise InvalidInputError(f"latent_dim {cfg.latent_dim} exceeds q + p = {n}")

    x = np.vstack([xs, xt])
    sigma = cfg.bandwidth if cfg.bandwidth is not None else median_bandwidth(x)
    k = symmetrize(gaussian_kernel(x, x, sigma))
    ell = mmd_coefficients(q, p)
    kl = k @ ell
    h = np.eye(n) - np.full((n, n), 1.0 / n)

    a = np.outer(kl, kl) + cfg.mu * np.eye(n)
    b = symmetrize(k @ h @ k)

    # A = C C^T; the pencil (B, A) becomes C^-1 B C^-T
    c = np.linalg.cholesky(a)
    left = np.linalg.solve(c, b)
    m = symmetrize(np.linalg.solve(c, left.T).T)
    values, vectors = symmetric_eig(m)
    w = np.linalg.solve(c.T, vectors[:, : cfg.latent_dim])

    logger.debug("[TCA] n=%d sigma=%.4g leading eigenvalues %s", n, sigma, values[: cfg.latent_dim])
    return TcaModel(x, k, w, values[: cfg.latent_dim], float(sigma), q)


def latent_coordinates(model: TcaModel) -> Tuple[np.ndarray, np.ndarray]:
    """Latent coordinates of the fitted source and target rows."""
    z = model.kernel @ model.components
    return z[: model.q], z[model.q:]


def tca_transform(source_inputs, target_inputs, cfg: TcaConfig = None) -> Tuple[np.ndarray, np.ndarray]:
    """Fit on both domains and return (source q x m, target p x m) in the latent space."""
    return latent_coordinates(fit_tca(source_inputs, target_inputs, cfg))


def tca_project(model: TcaModel, inputs) -> np.ndarray:
    """Latent coordinates of new rows via their kernel against the fitted rows."""
    x = as_matrix(inputs, "inputs")
    return gaussian_kernel(x, model.inputs, model.bandwidth) @ model.components


def subspace_mmd(model: TcaModel) -> float:
    """
    Squared distance between the source and target mean embeddings after
    orthogonal projection onto span(Phi W). Never exceeds the full kernel MMD.
    """
    ell = mmd_coefficients(model.q, model.p)
    v = model.components.T @ (model.kernel @ ell)
    gram = model.components.T @ model.kernel @ model.components
    coef, *_ = np.linalg.lstsq(gram, v, rcond=None)
    return float(v @ coef)


def latent_mean_gap(model: TcaModel) -> float:
    """Squared Euclidean distance between the latent source and target means."""
    zs, zt = latent_coordinates(model)
    d = zs.mean(axis=0) - zt.mean(axis=0)
    return float(d @ d)


def run_tca(
    pair: DomainPair,
    base: MlpSpec,
    cfg: TcaConfig = None,
    learner: Learner = None,
) -> np.ndarray:
    """Fit on source vs targets, train on the latent source plus calibration."""
    cfg = cfg or TcaConfig()
    learner = learner or MlpLearner(base)
    model = fit_tca(pair.source.inputs, pair.target_inputs, cfg)
    zs, zt = latent_coordinates(model)
    zc = tca_project(model, pair.calibration.x.reshape(1, -1))
    train_set = Dataset.concat(
        Dataset(zs, pair.source.labels),
        Dataset(zc, np.array([pair.calibration.y])),
    )
    return learner.fit(train_set).predict(zt)
