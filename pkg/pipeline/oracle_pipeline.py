# pipeline/oracle_pipeline.py

"""
Exhaustive-oracle check on a tiny bundle: the optimum labeling over a grid
against the greedy ISDA / Re-ISDA labelings, all with the ridge learner.
"""

import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np

from adaptation.oracle import dp_exhaustive_oracle, dp_objective, label_grid_from, total_loss
from adaptation.self_labeling import AdaptationConfig, run_isda, run_re_isda
from core.errors import ConfigError, InvalidInputError, OutputError
from domain.data import DomainPair
from learner.ridge import RidgeLearner
from pipeline.bundle import read_bundle
from preprocessing.calibration import choose_calibration
from preprocessing.sequence import order_targets

logger = logging.getLogger(__name__)


def run_oracle(
    bundle_dir,
    out_dir,
    eta: int = 1,
    grid: Optional[Sequence[float]] = None,
    grid_points: int = 4,
    alpha: float = 1e-3,
) -> Dict:
    bundle = read_bundle(bundle_dir)
    calibration = bundle.calibration or choose_calibration(bundle.source, bundle.target_inputs)
    try:
        pair = DomainPair(bundle.source, bundle.target_inputs, calibration)
        perm = order_targets(pair.target_inputs, calibration.x, "by_distance")
        pair = pair.reordered(perm)
        values = grid if grid else label_grid_from(bundle.source.labels, grid_points)
        cfg = AdaptationConfig(eta=eta, label_grid=tuple(values))
        learner = RidgeLearner(alpha)
        oracle = dp_exhaustive_oracle(pair, cfg, cfg.label_grid, learner)
    except InvalidInputError as e:
        raise ConfigError(f"oracle: {e}") from e

    result = {
        "eta": eta,
        "grid": list(cfg.label_grid),
        "learner": repr(learner),
        "target_ids": bundle.target_ids[perm].tolist(),
        "evaluated": oracle.evaluated,
        "best_labels": oracle.best_labels.tolist(),
        "min_total_loss": oracle.min_total_loss,
        "greedy": {},
    }
    for name, runner, renew in (("isda", run_isda, False), ("re_isda", run_re_isda, True)):
        labels, _ = runner(pair, replace(cfg, renew=renew), learner)
        total = total_loss(dp_objective(pair, cfg, labels, learner))
        result["greedy"][name] = {
            "labels": labels.tolist(),
            "total_loss": total,
            "gap": total - oracle.min_total_loss,
        }
        logger.info("[Oracle] %s total %.6f (gap %.6f)", name, total, total - oracle.min_total_loss)
    if bundle.truth is not None:
        result["truth_labels"] = np.asarray(bundle.truth)[perm].tolist()

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "oracle.json").write_text(json.dumps(result, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(out / "oracle.json", e) from e
    return result
