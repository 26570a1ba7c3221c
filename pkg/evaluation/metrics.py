# evaluation/metrics.py

"""Scores and seed aggregation."""

import math
from typing import Dict, Sequence

import numpy as np

from core.errors import InvalidInputError


def _pair(predicted, truth):
    a = np.asarray(predicted, dtype=np.float64).reshape(-1)
    b = np.asarray(truth, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise InvalidInputError(f"length mismatch: {a.shape[0]} predictions, {b.shape[0]} labels")
    if a.size == 0:
        raise InvalidInputError("cannot score empty vectors")
    return a, b


def rmse(predicted, truth) -> float:
    a, b = _pair(predicted, truth)
    d = a - b
    return math.sqrt(float(np.sum(d * d)) / d.size)


def abs_errors(predicted, truth) -> np.ndarray:
    a, b = _pair(predicted, truth)
    return np.abs(a - b)


def lower_median_index(values: Sequence[float]) -> int:
    """Index of the lower median (stable on ties)."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise InvalidInputError("no values")
    order = np.argsort(v, kind="stable")
    return int(order[(v.size - 1) // 2])


def summarize(values: Sequence[float]) -> Dict[str, float]:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise InvalidInputError("no values to summarise")
    return {
        "median": float(np.median(v)),
        "mean": float(np.mean(v)),
        "min": float(np.min(v)),
        "max": float(np.max(v)),
        "q1": float(np.percentile(v, 25)),
        "q3": float(np.percentile(v, 75)),
    }
