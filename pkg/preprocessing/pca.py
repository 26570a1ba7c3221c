# preprocessing/pca.py

"""
Principal component analysis of the sample covariance (divisor rows - 1),
via the symmetric Jacobi eigensolver.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.errors import InvalidInputError
from numerics.linalg import as_matrix, symmetric_eig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PcaParams:
    means: np.ndarray
    components: np.ndarray     # columns, descending variance
    variances: np.ndarray      # all eigenvalues, descending
    retained: int

    @property
    def explained_fraction(self) -> float:
        total = float(np.sum(self.variances))
        return float(np.sum(self.variances[: self.retained]) / total) if total > 0 else 1.0


def pca_fit(data, retained: Optional[int] = None, variance_fraction: Optional[float] = None) -> PcaParams:
    """
    Fit on rows of data. Keep `retained` components, or, when only
    variance_fraction is given, the fewest components reaching that fraction.
    """
    x = as_matrix(data, "data")
    rows, cols = x.shape
    if rows < 2:
        raise InvalidInputError(f"PCA needs at least 2 rows, got {rows}")
    limit = min(rows - 1, cols)

    means = x.mean(axis=0)
    centred = x - means
    cov = centred.T @ centred / (rows - 1)
    values, vectors = symmetric_eig(0.5 * (cov + cov.T))
    values = np.maximum(values, 0.0)

    if retained is None:
        if variance_fraction is None:
            raise InvalidInputError("give retained or variance_fraction")
        if not 0 < variance_fraction <= 1:
            raise InvalidInputError(f"variance_fraction must be in (0, 1], got {variance_fraction}")
        total = float(values.sum())
        cum = np.cumsum(values) / total if total > 0 else np.ones_like(values)
        retained = int(np.searchsorted(cum, variance_fraction - 1e-12) + 1)
        retained = min(max(retained, 1), limit)
    if not 1 <= retained <= limit:
        raise InvalidInputError(f"retained must be in [1, {limit}], got {retained}")

    params = PcaParams(means, vectors, values, int(retained))
    logger.debug(
        "[PCA] %d -> %d components (%.1f%% variance)",
        cols, retained, 100.0 * params.explained_fraction,
    )
    return params


def pca_apply(params: PcaParams, data) -> np.ndarray:
    """Centre then project onto the first `retained` components."""
    x = as_matrix(data, "data")
    if x.shape[1] != params.means.shape[0]:
        raise InvalidInputError(
            f"data has {x.shape[1]} columns, PCA was fitted on {params.means.shape[0]}"
        )
    return (x - params.means) @ params.components[:, : params.retained]


def pca_inverse(params: PcaParams, scores) -> np.ndarray:
    """Map projected scores back to the input space."""
    z = as_matrix(scores, "scores")
    return z @ params.components[:, : params.retained].T + params.means
