# adaptation/kernels.py

"""Gaussian kernel, bandwidth heuristic and kernel MMD estimates."""

import numpy as np

from core.errors import InvalidInputError
from numerics.linalg import as_matrix


def squared_distances(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[1]:
        raise InvalidInputError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    d = np.sum(a * a, axis=1)[:, None] + np.sum(b * b, axis=1)[None, :] - 2.0 * a @ b.T
    return np.maximum(d, 0.0)


def gaussian_kernel(a, b, sigma: float) -> np.ndarray:
    """k(x, y) = exp(-||x - y||^2 / (2 sigma^2))."""
    if not sigma > 0:
        raise InvalidInputError(f"kernel bandwidth must be > 0, got {sigma}")
    return np.exp(-squared_distances(a, b) / (2.0 * sigma * sigma))


def median_bandwidth(x) -> float:
    """Median of the non-zero pairwise distances; 1.0 when all points coincide."""
    d = np.sqrt(squared_distances(x, x))
    upper = d[np.triu_indices(d.shape[0], k=1)]
    upper = upper[upper > 0]
    return float(np.median(upper)) if upper.size else 1.0


def mmd_coefficients(q: int, p: int) -> np.ndarray:
    """l with l l^T the MMD matrix: 1/q on source rows, -1/p on target rows."""
    return np.concatenate([np.full(q, 1.0 / q), np.full(p, -1.0 / p)])


def kernel_mmd(kernel: np.ndarray, q: int) -> float:
    """Squared MMD of the pooled kernel matrix whose first q rows are source."""
    ell = mmd_coefficients(q, kernel.shape[0] - q)
    return float(ell @ kernel @ ell)


def weighted_mmd(k_ss: np.ndarray, k_st: np.ndarray, k_tt: np.ndarray, weights) -> float:
    """Squared MMD between the weighted source mean embedding and the target mean embedding."""
    w = np.asarray(weights, dtype=np.float64)
    q, p = k_st.shape
    a = w / q
    return float(a @ k_ss @ a - 2.0 * a @ k_st.sum(axis=1) / p + k_tt.sum() / (p * p))
