# evaluation/sweep.py

"""Re-ISDA block-size sweep: RMSE of the labeled-so-far targets per iteration."""

import concurrent.futures
import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from adaptation.self_labeling import AdaptationConfig, run_re_isda
from core.errors import InvalidInputError
from domain.data import ScoredPair
from domain.models import EtaTrace, SweepReport
from evaluation.metrics import rmse, summarize
from learner.mlp import MlpSpec

logger = logging.getLogger(__name__)


def labeled_rmse_trace(states, truth: np.ndarray) -> List[float]:
    return [rmse(s.pseudo_labels, truth[: s.pseudo_labels.shape[0]]) for s in states]


def _trace(scored: ScoredPair, cfg: AdaptationConfig, eta: int, seed: int) -> EtaTrace:
    try:
        run_cfg = replace(cfg, eta=eta, renew=True, base=cfg.base.with_seed(seed))
        _, states = run_re_isda(scored.pair, run_cfg)
        trace = labeled_rmse_trace(states, scored.truth_for_scoring())
        logger.info("[Sweep eta=%d seed=%d] final RMSE %.4f", eta, seed, trace[-1])
        return EtaTrace(eta=eta, seed=seed, rmse_trace=trace)
    except Exception as e:
        logger.exception("[Sweep eta=%d seed=%d] failed", eta, seed)
        return EtaTrace(eta=eta, seed=seed, error=f"{type(e).__name__}: {e}")


def eta_sweep(
    scored: ScoredPair,
    etas: Sequence[int],
    base: MlpSpec = None,
    seeds: Sequence[int] = (0,),
    warm_start: bool = False,
    max_workers: int = 1,
    metadata: Optional[Dict] = None,
) -> SweepReport:
    if not etas:
        raise InvalidInputError("no eta values given")
    if not seeds:
        raise InvalidInputError("no seeds given")
    p = scored.pair.p
    bad = [e for e in etas if not 1 <= e <= p]
    if bad:
        raise InvalidInputError(f"eta values must lie in [1, {p}], got {bad}")
    cfg = AdaptationConfig(eta=1, base=base or MlpSpec(), renew=True, warm_start=warm_start)

    jobs = [(int(e), int(s)) for e in dict.fromkeys(etas) for s in seeds]
    workers = max(1, min(max_workers, len(jobs)))
    traces = []
    progress = tqdm(total=len(jobs), desc="sweep", unit="run", disable=None)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(_trace, scored, cfg, e, s) for e, s in jobs]
        for future in concurrent.futures.as_completed(futures):
            traces.append(future.result())
            progress.update(1)
    progress.close()

    traces.sort(key=lambda t: (t.eta, t.seed))
    meta = dict(metadata or {})
    meta.update({"etas": sorted({e for e, _ in jobs}), "seeds": sorted(int(s) for s in seeds), "p": p})
    return SweepReport(metadata=meta, traces=traces)


def final_rmse_summary(sweep: SweepReport) -> Dict[int, Dict[str, float]]:
    """Per-eta statistics of the last trace entry over successful seeds."""
    out = {}
    for eta in sweep.etas():
        finals = [t.rmse_trace[-1] for t in sweep.for_eta(eta) if t.error is None]
        if finals:
            out[eta] = summarize(finals)
    return out


def rises_then_falls(trace: Sequence[float]) -> bool:
    """True when the maximum is reached strictly before the last step."""
    v = np.asarray(trace, dtype=np.float64)
    return v.size > 1 and int(np.argmax(v)) < v.size - 1 and v[-1] < v.max()


def median_traces(sweep: SweepReport) -> Dict[int, List[float]]:
    """Step-wise median over the successful seeds of each eta."""
    out = {}
    for eta in sweep.etas():
        ok = [t.rmse_trace for t in sweep.for_eta(eta) if t.error is None and t.rmse_trace]
        if ok:
            out[eta] = np.median(np.asarray(ok, dtype=np.float64), axis=0).tolist()
    return out
