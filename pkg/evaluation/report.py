# evaluation/report.py

"""
Report files.

emit_report writes
  report.json      full RunReport (sorted keys, runs in (method, seed) order)
  table.csv        method,n_ok,n_failed,median_rmse,mean_rmse,min_rmse,max_rmse,representative_seed
  predictions.csv  point,position,truth,<method>...   (representative seed per method)
  traces.csv       method,seed,step,loss
  plot.svg
emit_sweep writes sweep.json, traces.csv (eta,seed,step,rmse) and plot.svg
(one line per eta: the step-wise median over seeds).
CSV files are UTF-8 with RFC-4180 quoting and '.' decimals.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from pydantic import ValidationError

from core.errors import OutputError
from core.run_tracker import RunTracker
from domain.models import RunReport, SweepReport
from evaluation.comparison import representative_predictions
from evaluation.svg_plots import render_report_svg, render_sweep_svg
from evaluation.sweep import median_traces

logger = logging.getLogger(__name__)

TABLE_HEADER = [
    "method", "n_ok", "n_failed", "median_rmse", "mean_rmse",
    "min_rmse", "max_rmse", "representative_seed",
]


def to_json(model) -> str:
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def _cell(v) -> str:
    return "" if v is None else repr(v) if isinstance(v, float) else str(v)


def _write_text(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(path, e) from e


def _write_csv(path: Path, header: List[str], rows: Iterable[List]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\r\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
    except OSError as e:
        raise OutputError(path, e) from e


def _prepare(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(out, e) from e
    return out


def emit_report(report: RunReport, out_dir, tracker: Optional[RunTracker] = None) -> Dict[str, str]:
    """Write the report bundle; returns file name -> path."""
    out = _prepare(out_dir)
    paths = {name: out / name for name in
             ("report.json", "table.csv", "predictions.csv", "traces.csv", "plot.svg")}

    _write_text(paths["report.json"], to_json(report))

    _write_csv(paths["table.csv"], TABLE_HEADER, (
        [s.method, s.n_ok, s.n_failed, s.median_rmse, s.mean_rmse,
         s.min_rmse, s.max_rmse, s.representative_seed]
        for s in report.summaries
    ))

    chosen = representative_predictions(report)
    methods = sorted(chosen)
    _write_csv(
        paths["predictions.csv"],
        ["point", "position", "truth"] + methods,
        (
            [report.target_ids[i], i, report.truth[i]] + [chosen[m][i] for m in methods]
            for i in range(len(report.truth))
        ),
    )

    _write_csv(paths["traces.csv"], ["method", "seed", "step", "loss"], (
        [r.method, r.seed, step, loss]
        for r in report.runs if r.ok
        for step, loss in enumerate(r.loss_trace)
    ))

    errors, traces = {}, {}
    for m in methods:
        run = report.run_for(m, report.summary_for(m).representative_seed)
        errors[m] = run.abs_errors
        if run.loss_trace:
            traces[m] = run.loss_trace
    _write_text(paths["plot.svg"], render_report_svg(report.truth, chosen, errors, traces))

    result = {k: str(v) for k, v in paths.items()}
    if tracker is not None and tracker.runs:
        try:
            result["timings.csv"] = tracker.save_csv(str(out))
        except OSError as e:
            raise OutputError(out / "timings.csv", e) from e
    logger.info("[Report] wrote %d files to %s", len(result), out)
    return result


def emit_sweep(sweep: SweepReport, out_dir) -> Dict[str, str]:
    out = _prepare(out_dir)
    paths = {name: out / name for name in ("sweep.json", "traces.csv", "plot.svg")}
    _write_text(paths["sweep.json"], to_json(sweep))
    _write_csv(paths["traces.csv"], ["eta", "seed", "step", "rmse"], (
        [t.eta, t.seed, step, v]
        for t in sweep.traces if t.error is None
        for step, v in enumerate(t.rmse_trace)
    ))
    lines = {f"eta={eta} median": trace for eta, trace in median_traces(sweep).items()}
    _write_text(paths["plot.svg"], render_sweep_svg(lines))
    logger.info("[Sweep] wrote %d files to %s", len(paths), out)
    return {k: str(v) for k, v in paths.items()}


def _load(path, cls):
    try:
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValidationError) as e:
        raise OutputError(path, e) from e


def load_report(path) -> RunReport:
    return _load(path, RunReport)


def load_sweep(path) -> SweepReport:
    return _load(path, SweepReport)


def read_csv(path) -> List[Dict[str, str]]:
    """Rows of a report CSV as dicts (used by tests and the CLI summary)."""
    try:
        with open(path, newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))
    except OSError as e:
        raise OutputError(path, e) from e

