# core/errors.py

"""Exception hierarchy shared by every package."""

from typing import Optional

import numpy as np


class ReisdaError(Exception):
    """Root of all errors raised by this project."""


class InvalidInputError(ReisdaError, ValueError):
    """A precondition on an argument does not hold."""


class ConfigError(ReisdaError):
    """An experiment config is malformed or references missing files."""


class InfeasibleError(ReisdaError):
    """The constraint set of an optimisation problem is empty."""


class ConvergenceError(ReisdaError):
    """An iterative solver ran out of budget before reaching tolerance."""

    def __init__(
        self,
        message: str,
        residual: float,
        iterations: int,
        best: Optional[np.ndarray] = None,
    ) -> None:
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations
        self.best = best


class DivergenceError(ReisdaError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, loss: float) -> None:
        super().__init__(f"non-finite training loss {loss!r} at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss


class AdaptationStepError(ReisdaError):
    """Base-learner failure inside a self-labeling iteration."""

    def __init__(self, method: str, step: int, cause: Exception) -> None:
        super().__init__(f"{method} failed at step {step}: {cause}")
        self.method = method
        self.step = step
        self.__cause__ = cause


class OutputError(ReisdaError):
    """A report or bundle file could not be written or read."""

    def __init__(self, path, cause: Exception) -> None:
        super().__init__(f"{path}: {cause}")
        self.path = str(path)
        self.__cause__ = cause
