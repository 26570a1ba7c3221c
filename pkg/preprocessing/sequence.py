# preprocessing/sequence.py

"""
Time-series and ordering helpers.
Frame differencing appends per-column velocities; target ordering decides
the sequence in which self-labeling visits the targets.
"""

from typing import Optional

import numpy as np

from core.errors import InvalidInputError
from numerics.linalg import as_matrix, as_vector

ORDER_MODES = ("by_distance", "keep_order")


def frame_difference(series) -> np.ndarray:
    """[x_t, x_t - x_{t-1}] per row; the first row's velocity is 0."""
    x = as_matrix(series, "series")
    if x.shape[0] < 1:
        raise InvalidInputError("series needs at least one row")
    velocity = np.zeros_like(x)
    velocity[1:] = x[1:] - x[:-1]
    return np.hstack([x, velocity])


def grouped_frame_difference(
    series,
    groups: Optional[np.ndarray] = None,
    times: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    frame_difference applied within each group, rows kept in place.
    With `times`, each group is differenced in ascending time order
    (stable); otherwise in row order.
    """
    x = as_matrix(series, "series")
    n = x.shape[0]
    groups = np.zeros(n, dtype=int) if groups is None else np.asarray(groups)
    if groups.shape[0] != n:
        raise InvalidInputError("groups must have one entry per row")
    if times is not None and np.asarray(times).shape[0] != n:
        raise InvalidInputError("times must have one entry per row")
    out = np.empty((n, 2 * x.shape[1]))
    for g in dict.fromkeys(groups.tolist()):
        rows = np.flatnonzero(groups == g)
        if times is not None:
            rows = rows[np.argsort(np.asarray(times)[rows], kind="stable")]
        out[rows] = frame_difference(x[rows])
    return out


def order_targets(targets, calibration_input, mode: str = "by_distance") -> np.ndarray:
    """
    Permutation visiting the targets. by_distance sorts by Euclidean distance
    to the calibration input (stable, ties by index); keep_order is identity.
    """
    t = as_matrix(targets, "targets")
    c = as_vector(calibration_input, "calibration_input")
    if mode not in ORDER_MODES:
        raise InvalidInputError(f"mode must be one of {ORDER_MODES}, got {mode!r}")
    if t.shape[1] != c.shape[0]:
        raise InvalidInputError(
            f"targets have {t.shape[1]} columns, calibration input has {c.shape[0]}"
        )
    if mode == "keep_order":
        return np.arange(t.shape[0])
    dist = np.linalg.norm(t - c, axis=1)
    return np.argsort(dist, kind="stable")
