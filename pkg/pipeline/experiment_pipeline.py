# pipeline/experiment_pipeline.py

"""
Experiment Pipeline Orchestrator.
Config file → data → preprocessing → methods × seeds → report bundle.

Flow:
1. Load the dataset (builtin Friedman, bundle directory or CSV paths)
2. Pick the calibration sample (provided, else nearest source point)
3. Normalise (joint or source fit), frame-difference time series per group
4. Keep the pre-PCA copy for TCA, then PCA
5. Order the targets (time order or distance to the calibration input)
6. Optional multi-source selection by calibration error
7. Run the comparison or the eta sweep, write the report files
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np

from adaptation.kmm import KmmConfig
from adaptation.selection import select_source_model
from adaptation.self_labeling import AdaptationConfig
from adaptation.tca import TcaConfig
from core.config import config
from core.errors import ConfigError, InvalidInputError
from core.run_tracker import RunTracker
from core.utils import fingerprint, timed
from datagen.friedman import FriedmanBenchmarkSpec, make_friedman_benchmark
from domain.data import Dataset, DomainPair, LabeledSample, ScoredPair
from domain.models import ExperimentConfig, RunReport, SweepReport
from evaluation.comparison import MethodSetup, run_comparison
from evaluation.report import emit_report, emit_sweep
from evaluation.sweep import eta_sweep
from learner.base import MlpLearner
from learner.mlp import MlpSpec
from pipeline.bundle import Bundle, bundle_from_scored, read_bundle, read_csv_files
from pipeline.common import print_pipeline_footer, print_pipeline_header
from preprocessing.calibration import choose_calibration
from preprocessing.normalize import minmax_apply, minmax_fit
from preprocessing.pca import pca_apply, pca_fit
from preprocessing.sequence import grouped_frame_difference, order_targets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreparedData:
    scored: ScoredPair              # what the methods see, plus sealed truth
    raw: ScoredPair                 # same targets and order, before PCA (TCA input)
    info: Dict = field(default_factory=dict)


def base_spec(cfg: ExperimentConfig) -> MlpSpec:
    l = cfg.learner
    return MlpSpec(
        layer_sizes=tuple(l.layer_sizes),
        optimizer=l.optimizer,
        learning_rate=l.learning_rate,
        epochs=l.epochs,
        activation=l.activation,
        scale_inputs=l.scale_inputs,
        scale_targets=l.scale_targets,
    )


def method_setups(cfg: ExperimentConfig) -> list:
    setups = []
    for m in cfg.methods:
        setups.append(MethodSetup(
            name=m.name,
            adaptation=AdaptationConfig(eta=m.eta, epochs=m.epochs, warm_start=m.warm_start),
            kmm=KmmConfig(
                bandwidth=m.kmm_bandwidth,
                box_upper=m.kmm_box,
                slack=m.kmm_slack,
                qp_tol=config.kmm.qp_tol,
                qp_max_iter=config.kmm.qp_max_iter,
            ),
            tca=TcaConfig(bandwidth=m.tca_bandwidth, latent_dim=m.tca_latent_dim, mu=m.tca_mu),
        ))
    return setups


class ExperimentPipeline:
    """Pipeline for one experiment config."""

    def __init__(self, cfg: ExperimentConfig, config_dir: str = ".", output_dir: str = None):
        self.cfg = cfg
        self.config_dir = Path(config_dir)
        if output_dir is None:
            output_dir = str(self._path(cfg.output_dir)) if cfg.output_dir else config.paths.output_dir
        self.output_dir = output_dir

    # ── Loading ──

    def _path(self, p: Optional[str]) -> Optional[Path]:
        if p is None:
            return None
        path = Path(p)
        return path if path.is_absolute() else self.config_dir / path

    def load_bundle(self) -> Bundle:
        ds = self.cfg.dataset
        if ds.friedman is not None:
            spec = FriedmanBenchmarkSpec(**ds.friedman.model_dump())
            scored = make_friedman_benchmark(spec, reorder=False)
            return bundle_from_scored(scored, {"generator": "friedman", **ds.friedman.model_dump()})
        if ds.bundle is not None:
            return read_bundle(self._path(ds.bundle))
        c = ds.csv
        return read_csv_files(
            self._path(c.source), self._path(c.target),
            self._path(c.calibration), self._path(c.truth),
        )

    # ── Preprocessing ──

    def prepare(self, bundle: Bundle) -> PreparedData:
        pp = self.cfg.preprocessing
        if bundle.truth is None:
            raise ConfigError("the dataset has no truth labels (truth.csv) to score against")

        calibration = bundle.calibration
        if calibration is None:
            calibration = choose_calibration(bundle.source, bundle.target_inputs)
            logger.info("[Prepare] no calibration sample given, using nearest source point")

        xs = bundle.source.inputs
        xt = bundle.target_inputs
        xc = calibration.x.reshape(1, -1)
        info: Dict = {"input_columns": len(bundle.columns)}

        if pp.normalize:
            fit_on = xs if pp.normalize_fit == "source" else np.vstack([xs, xt, xc])
            params = minmax_fit(fit_on)
            xs, xt, xc = (minmax_apply(params, a) for a in (xs, xt, xc))

        differencing = pp.frame_difference == "on" or (
            pp.frame_difference == "auto" and bundle.is_time_series
        )
        if differencing:
            xs, xt, xc = self._difference(bundle, xs, xt, xc)
            info["frame_difference"] = True

        raw = (xs, xt, xc)
        if pp.pca_retained is not None or pp.pca_variance is not None:
            fit_on = xs if pp.normalize_fit == "source" else np.vstack([xs, xt, xc])
            params = pca_fit(fit_on, retained=pp.pca_retained, variance_fraction=pp.pca_variance)
            xs, xt, xc = (pca_apply(params, a) for a in (xs, xt, xc))
            info["pca_retained"] = params.retained
            info["pca_explained"] = params.explained_fraction
        info["features"] = xs.shape[1]

        source = Dataset(xs, bundle.source.labels)
        if pp.multi_source and bundle.source_groups is not None:
            rows = self._select_source(source, bundle.source_groups, LabeledSample(xc[0], calibration.y))
            source = source.subset(rows)
            raw = (raw[0][rows], raw[1], raw[2])
            info["selected_group"] = int(bundle.source_groups[rows[0]])

        mode = pp.ordering
        if mode == "auto":
            mode = "keep_order" if bundle.target_times is not None else "by_distance"
        if mode == "keep_order" and bundle.target_times is not None:
            perm = np.argsort(bundle.target_times, kind="stable")
        else:
            perm = order_targets(xt, xc[0], mode)
        info["ordering"] = mode

        pair = DomainPair(source, xt, LabeledSample(xc[0], calibration.y))
        raw_pair = DomainPair(
            Dataset(raw[0], source.labels), raw[1], LabeledSample(raw[2][0], calibration.y)
        )
        scored = ScoredPair(pair, bundle.truth, bundle.target_ids).reordered(perm)
        raw_scored = ScoredPair(raw_pair, bundle.truth, bundle.target_ids).reordered(perm)
        info["fingerprint"] = fingerprint([
            pair.source.inputs, pair.source.labels, pair.target_inputs, pair.calibration.x,
        ])
        return PreparedData(scored, raw_scored, info)

    def _difference(self, bundle: Bundle, xs, xt, xc):
        """Per-subject velocities; the calibration frame leads the target series when timed."""
        xs = grouped_frame_difference(xs, bundle.source_groups, bundle.source_times)
        if bundle.calibration_time is not None and bundle.target_times is not None:
            series = np.vstack([xc, xt])
            times = np.concatenate([[bundle.calibration_time], bundle.target_times])
            both = grouped_frame_difference(series, None, times)
            return xs, both[1:], both[:1]
        return xs, grouped_frame_difference(xt, None, bundle.target_times), grouped_frame_difference(xc)

    def _select_source(self, source: Dataset, groups: np.ndarray, calibration: LabeledSample) -> np.ndarray:
        learner = MlpLearner(base_spec(self.cfg).with_seed(self.cfg.seeds[0]))
        names = sorted(set(groups.tolist()))
        models = [learner.fit(source.subset(np.flatnonzero(groups == g))) for g in names]
        best = select_source_model(models, calibration)
        return np.flatnonzero(groups == names[best])

    def _check_etas(self, etas: Sequence[int], p: int) -> None:
        bad = [e for e in etas if e > p]
        if bad:
            raise ConfigError(f"eta values {bad} exceed the {p} target samples")

    # ── Entry points ──

    def run(self, max_workers: int = None) -> RunReport:
        t0 = time.time()
        print_pipeline_header("Method Comparison", self.cfg.name, {
            "Methods": ", ".join(m.name for m in self.cfg.methods),
            "Seeds": str(len(self.cfg.seeds)),
            "Output": str(self.output_dir),
        })
        data = self._load_and_prepare()
        self._check_etas(
            [m.eta for m in self.cfg.methods if m.name in ("isda", "re_isda")], data.scored.pair.p
        )

        tracker = RunTracker()
        report = run_comparison(
            data.scored,
            method_setups(self.cfg),
            self.cfg.seeds,
            base=base_spec(self.cfg),
            raw=data.raw,
            max_workers=max_workers or self.cfg.max_workers,
            record_timings=self.cfg.record_timings,
            tracker=tracker,
            metadata=self._metadata(data),
        )
        emit_report(report, self.output_dir, tracker if self.cfg.record_timings else None)
        if self.cfg.record_timings:
            tracker.print_report()

        stats = {
            s.method: "failed" if s.median_rmse is None else f"median RMSE {s.median_rmse:.4f}"
            for s in report.summaries
        }
        print_pipeline_footer(self.output_dir, stats, time.time() - t0)
        return report

    def sweep(self, etas: Sequence[int], seeds: Sequence[int] = None, max_workers: int = None) -> SweepReport:
        t0 = time.time()
        seeds = list(seeds or self.cfg.seeds)
        print_pipeline_header("Block-size Sweep", self.cfg.name, {
            "Etas": ", ".join(str(e) for e in etas),
            "Seeds": str(len(seeds)),
            "Output": str(self.output_dir),
        })
        data = self._load_and_prepare()
        self._check_etas(etas, data.scored.pair.p)
        re_isda = next((m for m in self.cfg.methods if m.name == "re_isda"), None)
        sweep = eta_sweep(
            data.scored,
            etas,
            base=base_spec(self.cfg),
            seeds=seeds,
            warm_start=bool(re_isda and re_isda.warm_start),
            max_workers=max_workers or self.cfg.max_workers,
            metadata=self._metadata(data),
        )
        emit_sweep(sweep, self.output_dir)
        print_pipeline_footer(self.output_dir, {
            f"eta={e}": f"{len([t for t in sweep.for_eta(e) if t.error is None])} traces"
            for e in sweep.etas()
        }, time.time() - t0)
        return sweep

    def _load_and_prepare(self) -> PreparedData:
        t = time.time()
        bundle = self.load_bundle()
        try:
            data = self.prepare(bundle)
        except InvalidInputError as e:
            raise ConfigError(f"inconsistent dataset: {e}") from e
        timed("Prepare", t)
        pair = data.scored.pair
        logger.info("[Prepare] q=%d p=%d features=%d", pair.q, pair.p, pair.dim)
        return data

    def _metadata(self, data: PreparedData) -> Dict:
        return {
            "name": self.cfg.name,
            "config": self.cfg.model_dump(mode="json"),
            "dataset": data.info,
        }

