# numerics/halton.py

"""Halton low-discrepancy sequence (radical inverse in prime bases)."""

from fractions import Fraction
from typing import List

import numpy as np

from core.errors import InvalidInputError

FIRST_PRIMES: List[int] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41,
    43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def halton(index: int, base: int) -> float:
    """Radical inverse of index in the given prime base. Indexing starts at 1."""
    if index < 1:
        raise InvalidInputError(f"Halton index must be >= 1, got {index}")
    if not _is_prime(base):
        raise InvalidInputError(f"Halton base must be prime, got {base}")
    # exact rational accumulation, rounded once
    result = Fraction(0)
    denom = 1
    i = index
    while i > 0:
        denom *= base
        i, digit = divmod(i, base)
        result += Fraction(digit, denom)
    return float(result)


def halton_point(index: int, dims: int) -> np.ndarray:
    """Point `index` of the dims-dimensional sequence; coordinate d uses the d-th prime."""
    if not 1 <= dims <= len(FIRST_PRIMES):
        raise InvalidInputError(f"dims must be in [1, {len(FIRST_PRIMES)}], got {dims}")
    return np.array([halton(index, FIRST_PRIMES[d]) for d in range(dims)])


def halton_points(count: int, dims: int, start: int = 1) -> np.ndarray:
    """Rows are points start .. start + count - 1."""
    return np.array([halton_point(i, dims) for i in range(start, start + count)]).reshape(count, dims)


def star_discrepancy_1d(values: np.ndarray) -> float:
    """Exact star discrepancy of a 1-D point set in [0, 1)."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    if n == 0:
        return 0.0
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))
