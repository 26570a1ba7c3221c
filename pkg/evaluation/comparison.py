# evaluation/comparison.py

"""
Method registry and the comparison harness.

Every (method, seed) run sees the same DomainPair; only the scorer reads
the sealed truth. Runs may execute on a thread pool, the report is
assembled afterwards in (method, seed) order so it never depends on
completion order.
"""

import concurrent.futures
import logging
import time
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from adaptation.baseline import run_baseline
from adaptation.kmm import KmmConfig, run_kmm
from adaptation.self_labeling import AdaptationConfig, loss_trace, run_self_labeling
from adaptation.tca import TcaConfig, run_tca
from core.errors import InvalidInputError
from core.run_tracker import RunTracker
from domain.data import DomainPair, ScoredPair
from domain.models import METHOD_NAMES, MethodRun, MethodSummary, RunReport
from evaluation.metrics import abs_errors, lower_median_index, rmse, summarize
from learner.mlp import MlpSpec

logger = logging.getLogger(__name__)

PROTOCOL_NOTE = (
    "median RMSE over seeds; the seed sets the network initialisation, "
    "data and target order are identical for every run"
)


@dataclass(frozen=True)
class MethodSetup:
    """One configured method. Unused sections keep their defaults."""
    name: str
    adaptation: AdaptationConfig = field(default_factory=AdaptationConfig)
    kmm: KmmConfig = field(default_factory=KmmConfig)
    tca: TcaConfig = field(default_factory=TcaConfig)

    def __post_init__(self):
        if self.name not in METHOD_NAMES:
            raise InvalidInputError(f"unknown method {self.name!r}; choose from {METHOD_NAMES}")
        if self.name in ("isda", "re_isda"):
            object.__setattr__(
                self, "adaptation", replace(self.adaptation, renew=self.name == "re_isda")
            )


@dataclass(frozen=True)
class MethodOutput:
    predictions: np.ndarray
    loss_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))


def run_method(
    setup: MethodSetup,
    pair: DomainPair,
    base: MlpSpec,
    raw_pair: Optional[DomainPair] = None,
) -> MethodOutput:
    """Run one method with the given base network (seed already set)."""
    if setup.name == "baseline":
        return MethodOutput(run_baseline(pair, base))
    if setup.name == "kmm":
        return MethodOutput(run_kmm(pair, base, setup.kmm))
    if setup.name == "tca":
        return MethodOutput(run_tca(raw_pair if raw_pair is not None else pair, base, setup.tca))
    cfg = replace(setup.adaptation, base=base)
    predictions, states = run_self_labeling(pair, cfg)
    return MethodOutput(predictions, loss_trace(states))


def _execute(setup, seed, pair, raw_pair, base, truth, record_timings, tracker) -> MethodRun:
    tag = f"[{setup.name} seed={seed}]"
    start = time.perf_counter()
    try:
        out = run_method(setup, pair, base.with_seed(seed), raw_pair)
        elapsed = time.perf_counter() - start
        score = rmse(out.predictions, truth)
        logger.info("%s RMSE %.4f", tag, score)
        run = MethodRun(
            method=setup.name,
            seed=seed,
            ok=True,
            rmse=score,
            predictions=out.predictions.tolist(),
            abs_errors=abs_errors(out.predictions, truth).tolist(),
            loss_trace=out.loss_trace.tolist(),
        )
    except Exception as e:
        elapsed = time.perf_counter() - start
        logger.exception("%s failed", tag)
        run = MethodRun(method=setup.name, seed=seed, ok=False, error=f"{type(e).__name__}: {e}")
    if tracker is not None:
        tracker.record(setup.name, seed, elapsed, run.ok)
    if record_timings:
        run = run.model_copy(update={"wall_time": elapsed})
    return run


def summarize_runs(method: str, runs: List[MethodRun]) -> MethodSummary:
    ok = sorted((r for r in runs if r.ok), key=lambda r: r.seed)
    failed = len(runs) - len(ok)
    if not ok:
        return MethodSummary(method=method, n_ok=0, n_failed=failed)
    scores = [r.rmse for r in ok]
    s = summarize(scores)
    return MethodSummary(
        method=method,
        n_ok=len(ok),
        n_failed=failed,
        median_rmse=s["median"],
        mean_rmse=s["mean"],
        min_rmse=s["min"],
        max_rmse=s["max"],
        q1_rmse=s["q1"],
        q3_rmse=s["q3"],
        representative_seed=ok[lower_median_index(scores)].seed,
    )


def run_comparison(
    scored: ScoredPair,
    methods: Sequence[MethodSetup],
    seeds: Sequence[int],
    base: MlpSpec = None,
    raw: Optional[ScoredPair] = None,
    max_workers: int = 1,
    record_timings: bool = False,
    tracker: Optional[RunTracker] = None,
    metadata: Optional[Dict] = None,
) -> RunReport:
    """
    Execute every (method, seed) pair. `raw` carries the same targets in the
    same order before dimensionality reduction; TCA runs on it when given.
    """
    if not methods:
        raise InvalidInputError("no methods configured")
    if not seeds:
        raise InvalidInputError("no seeds configured")
    names = [m.name for m in methods]
    if len(set(names)) != len(names):
        raise InvalidInputError(f"duplicate methods: {names}")
    base = base or MlpSpec()
    pair = scored.pair
    raw_pair = raw.pair if raw is not None else None
    truth = scored.truth_for_scoring()

    jobs = [(m, int(s)) for m in methods for s in seeds]
    workers = max(1, min(max_workers, len(jobs)))
    logger.info("[Compare] %d methods x %d seeds (%d workers)", len(methods), len(seeds), workers)

    runs: List[MethodRun] = []
    progress = tqdm(total=len(jobs), desc="runs", unit="run", disable=None)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_job = {
            executor.submit(_execute, m, s, pair, raw_pair, base, truth, record_timings, tracker): (m.name, s)
            for m, s in jobs
        }
        for future in concurrent.futures.as_completed(future_to_job):
            runs.append(future.result())
            progress.update(1)
    progress.close()

    runs.sort(key=lambda r: (r.method, r.seed))
    summaries = [
        summarize_runs(name, [r for r in runs if r.method == name]) for name in sorted(names)
    ]
    meta = dict(metadata or {})
    meta.update({
        "methods": sorted(names),
        "seeds": sorted(int(s) for s in seeds),
        "q": pair.q,
        "p": pair.p,
        "protocol": PROTOCOL_NOTE,
    })
    return RunReport(
        metadata=meta,
        truth=truth.tolist(),
        target_ids=scored.target_ids.tolist(),
        runs=runs,
        summaries=summaries,
    )


def representative_predictions(report: RunReport) -> Dict[str, List[float]]:
    """Predictions of each method's representative (lower-median) seed."""
    out = {}
    for s in report.summaries:
        if s.representative_seed is not None:
            out[s.method] = report.run_for(s.method, s.representative_seed).predictions
    return out
