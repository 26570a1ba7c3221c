# adaptation/selection.py

"""Multi-source rule: keep the source model that best predicts the calibration sample."""

import logging
from typing import Sequence

import numpy as np

from core.errors import InvalidInputError
from domain.data import LabeledSample
from learner.base import Predictor

logger = logging.getLogger(__name__)


def select_source_model(models: Sequence[Predictor], calibration: LabeledSample) -> int:
    """argmin_i |f_i(x*) - y*|, ties toward the lowest index."""
    if not models:
        raise InvalidInputError("no source models to choose from")
    x = calibration.x.reshape(1, -1)
    errors = np.array([abs(float(m.predict(x)[0]) - calibration.y) for m in models])
    best = int(np.argmin(errors))
    logger.info("[Select] source model %d of %d (calibration error %.4f)", best, len(models), errors[best])
    return best
