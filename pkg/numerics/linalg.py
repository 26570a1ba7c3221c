# numerics/linalg.py

"""
Dense matrix helpers and the cyclic Jacobi eigensolver for symmetric
matrices. Matrices are float64 numpy arrays.
"""

import logging
import math
from typing import Tuple

import numpy as np

from core.config import config
from core.errors import ConvergenceError, InvalidInputError

logger = logging.getLogger(__name__)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return m


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    x = np.array(v, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidInputError(f"{name} must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return x


def check_symmetric(a: np.ndarray, tol: float = None, name: str = "matrix") -> None:
    """Square and symmetric within tol (scaled by the largest entry when > 1)."""
    tol = config.numerics.symmetry_tol if tol is None else tol
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {a.shape}")
    if a.size == 0:
        return
    scale = max(1.0, float(np.max(np.abs(a))))
    asym = float(np.max(np.abs(a - a.T)))
    if asym > tol * scale:
        raise InvalidInputError(f"{name} is not symmetric (max |a - a^T| = {asym:.3e})")


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _off_norm(a: np.ndarray) -> float:
    """Frobenius norm of the strict off-diagonal part, summed directly."""
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotation(app: float, aqq: float, apq: float) -> Tuple[float, float]:
    """(c, s) of the Jacobi rotation that zeroes a_pq."""
    diff = aqq - app
    if abs(apq) < abs(diff) * 1e-18:
        t = apq / diff
    else:
        theta = diff / (2.0 * apq)
        t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.hypot(theta, 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Largest-magnitude coordinate of each column positive (first index on ties)."""
    if vectors.size == 0:
        return vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def symmetric_eig(
    a,
    tol: float = None,
    max_sweeps: int = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues descending, eigenvectors as columns). Each column is
    signed so its largest-magnitude coordinate is positive.
    """
    tol = config.numerics.jacobi_tol if tol is None else tol
    max_sweeps = config.numerics.jacobi_max_sweeps if max_sweeps is None else max_sweeps

    a = as_matrix(a)
    check_symmetric(a)
    n = a.shape[0]
    work = symmetrize(a)
    vectors = np.eye(n)

    threshold = tol * max(math.sqrt(float(np.sum(work * work))), np.finfo(float).tiny)
    sweeps = 0
    off = _off_norm(work)
    while off > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps", off, sweeps, best=vectors
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation(work[p, p], work[q, q], apq)

                col_p = work[:, p].copy()
                col_q = work[:, q].copy()
                work[:, p] = c * col_p - s * col_q
                work[:, q] = s * col_p + c * col_q
                row_p = work[p, :].copy()
                row_q = work[q, :].copy()
                work[p, :] = c * row_p - s * row_q
                work[q, :] = s * row_p + c * row_q
                work[p, q] = work[q, p] = 0.0

                v_p = vectors[:, p].copy()
                v_q = vectors[:, q].copy()
                vectors[:, p] = c * v_p - s * v_q
                vectors[:, q] = s * v_p + c * v_q
        sweeps += 1
        off = _off_norm(work)

    values = np.diag(work).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = _fix_signs(vectors[:, order])
    logger.debug("[Jacobi] n=%d converged in %d sweeps (off=%.2e)", n, sweeps, off)
    return values, vectors


def eig_residual(a: np.ndarray, values: np.ndarray, vectors: np.ndarray) -> float:
    """max_i ||a v_i - lambda_i v_i||."""
    if values.size == 0:
        return 0.0
    r = a @ vectors - vectors * values
    return float(np.max(np.linalg.norm(r, axis=0)))
