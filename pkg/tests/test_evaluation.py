# tests/test_evaluation.py

import json
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from adaptation.self_labeling import AdaptationConfig
from adaptation.tca import TcaConfig
from core.errors import InvalidInputError
from core.run_tracker import RunTracker
from domain.models import EtaTrace, MethodRun, RunReport, SweepReport
from evaluation.comparison import MethodSetup, run_comparison, summarize_runs
from evaluation.metrics import abs_errors, lower_median_index, rmse, summarize
from evaluation.report import TABLE_HEADER, emit_report, emit_sweep, load_report, load_sweep, read_csv, to_json
from evaluation.sweep import eta_sweep, final_rmse_summary, median_traces, rises_then_falls


class TestMetrics:

    def test_rmse_identities(self):
        assert rmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
        assert rmse([1.0, 1.0], [0.0, 2.0]) == 1.0
        assert rmse([3.0], [0.0]) == 3.0

    def test_rmse_errors(self):
        with pytest.raises(InvalidInputError):
            rmse([1.0], [1.0, 2.0])
        with pytest.raises(InvalidInputError):
            rmse([], [])

    def test_abs_errors(self):
        assert_array_equal(abs_errors([1.0, -1.0], [0.0, 1.0]), [1.0, 2.0])

    def test_lower_median_index(self):
        assert lower_median_index([3.0, 1.0, 2.0]) == 2
        assert lower_median_index([4.0, 1.0, 3.0, 2.0]) == 3
        assert lower_median_index([1.0, 1.0]) == 0

    def test_summarize(self):
        s = summarize([1.0, 2.0, 3.0, 4.0])
        assert s["median"] == 2.5
        assert s["min"] == 1.0 and s["max"] == 4.0
        assert s["q1"] == 1.75 and s["q3"] == 3.25


class TestComparison:

    def test_single_method_single_seed(self, small_friedman, fast_spec):
        report = run_comparison(small_friedman, [MethodSetup("baseline")], [0], base=fast_spec)
        assert len(report.runs) == 1
        run = report.runs[0]
        assert run.ok
        assert run.rmse == rmse(run.predictions, small_friedman.truth_for_scoring())
        assert len(run.predictions) == small_friedman.pair.p
        assert report.summary_for("baseline").median_rmse == run.rmse

    def test_methods_never_see_the_truth(self, small_friedman, fast_spec):
        setups = [MethodSetup("baseline"), MethodSetup("re_isda", AdaptationConfig(eta=2))]
        canary = small_friedman.with_truth(small_friedman.truth_for_scoring() + 123.0)
        a = run_comparison(small_friedman, setups, [0], base=fast_spec)
        b = run_comparison(canary, setups, [0], base=fast_spec)
        for ra, rb in zip(a.runs, b.runs):
            assert ra.predictions == rb.predictions
            assert ra.loss_trace == rb.loss_trace
            assert ra.rmse != rb.rmse

    def test_method_order_does_not_matter(self, small_friedman, fast_spec):
        setups = [MethodSetup("isda", AdaptationConfig(eta=4)), MethodSetup("baseline")]
        a = run_comparison(small_friedman, setups, [0, 1], base=fast_spec)
        b = run_comparison(small_friedman, setups[::-1], [1, 0], base=fast_spec, max_workers=3)
        assert to_json(a) == to_json(b)
        assert a.methods() == ["baseline", "isda"]

    def test_failure_is_recorded_without_aborting(self, small_friedman, fast_spec):
        tracker = RunTracker()
        setups = [MethodSetup("tca", tca=TcaConfig(latent_dim=500)), MethodSetup("baseline")]
        report = run_comparison(small_friedman, setups, [0], base=fast_spec, tracker=tracker)
        tca = report.run_for("tca", 0)
        assert not tca.ok and tca.error.startswith("InvalidInputError")
        assert report.run_for("baseline", 0).ok
        assert report.any_failed
        assert report.summary_for("tca").n_failed == 1
        assert report.summary_for("tca").median_rmse is None
        assert len(tracker.runs) == 2

    def test_self_labeling_runs_carry_loss_traces(self, small_friedman, fast_spec):
        report = run_comparison(small_friedman, [MethodSetup("re_isda", AdaptationConfig(eta=3))], [0], base=fast_spec)
        assert len(report.runs[0].loss_trace) == 3

    def test_unknown_method(self):
        with pytest.raises(InvalidInputError):
            MethodSetup("svm")

    def test_requires_methods_and_seeds(self, small_friedman):
        with pytest.raises(InvalidInputError):
            run_comparison(small_friedman, [], [0])
        with pytest.raises(InvalidInputError):
            run_comparison(small_friedman, [MethodSetup("baseline")], [])

    def test_summary_uses_lower_median_seed(self):
        runs = [MethodRun(method="kmm", seed=s, ok=True, rmse=v) for s, v in ((0, 3.0), (1, 1.0), (2, 2.0), (3, 4.0))]
        s = summarize_runs("kmm", runs)
        assert s.median_rmse == 2.5
        assert s.representative_seed == 2


class TestReportFiles:

    def _report(self, small_friedman, fast_spec):
        setups = [MethodSetup("baseline"), MethodSetup("isda", AdaptationConfig(eta=4))]
        return run_comparison(small_friedman, setups, [0, 1], base=fast_spec)

    def test_round_trip(self, tmp_path, small_friedman, fast_spec):
        report = self._report(small_friedman, fast_spec)
        paths = emit_report(report, tmp_path)
        assert set(paths) == {"report.json", "table.csv", "predictions.csv", "traces.csv", "plot.svg"}
        assert load_report(paths["report.json"]).model_dump() == report.model_dump()

    def test_table_matches_report(self, tmp_path, small_friedman, fast_spec):
        report = self._report(small_friedman, fast_spec)
        emit_report(report, tmp_path)
        rows = read_csv(tmp_path / "table.csv")
        assert list(rows[0]) == TABLE_HEADER
        assert [r["method"] for r in rows] == ["baseline", "isda"]
        for row in rows:
            assert_allclose(float(row["median_rmse"]), report.summary_for(row["method"]).median_rmse, atol=1e-6)

    def test_predictions_and_traces(self, tmp_path, small_friedman, fast_spec):
        report = self._report(small_friedman, fast_spec)
        emit_report(report, tmp_path)
        preds = read_csv(tmp_path / "predictions.csv")
        assert len(preds) == small_friedman.pair.p
        assert [int(r["point"]) for r in preds] == report.target_ids
        traces = read_csv(tmp_path / "traces.csv")
        assert {r["method"] for r in traces} == {"isda"}
        assert len(traces) == 2 * 2

    def test_empty_report_writes_headers(self, tmp_path):
        emit_report(RunReport(), tmp_path)
        assert read_csv(tmp_path / "table.csv") == []
        with open(tmp_path / "table.csv", encoding="utf-8", newline="") as f:
            assert f.read() == ",".join(TABLE_HEADER) + "\r\n"
        assert (tmp_path / "plot.svg").read_text(encoding="utf-8").startswith("<svg")
        assert json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))["runs"] == []

    def test_timings_only_with_a_tracker(self, tmp_path, small_friedman, fast_spec):
        tracker = RunTracker()
        report = run_comparison(small_friedman, [MethodSetup("baseline")], [0], base=fast_spec, tracker=tracker)
        paths = emit_report(report, tmp_path, tracker)
        assert "timings.csv" in paths
        assert len(read_csv(paths["timings.csv"])) == 1

    def test_json_excludes_wall_time_by_default(self, small_friedman, fast_spec):
        report = run_comparison(small_friedman, [MethodSetup("baseline")], [0], base=fast_spec)
        assert report.runs[0].wall_time is None
        timed = run_comparison(small_friedman, [MethodSetup("baseline")], [0], base=fast_spec, record_timings=True)
        assert timed.runs[0].wall_time >= 0.0


class TestSweep:

    def test_trace_lengths(self, small_friedman, fast_spec):
        sweep = eta_sweep(small_friedman, [2, 3, 8], base=fast_spec, seeds=[0])
        lengths = {t.eta: len(t.rmse_trace) for t in sweep.traces}
        assert lengths == {2: 4, 3: 3, 8: 1}
        assert not sweep.any_failed

    def test_trace_scores_labeled_targets(self, small_friedman, fast_spec):
        sweep = eta_sweep(small_friedman, [8], base=fast_spec, seeds=[0])
        assert np.isfinite(sweep.traces[0].rmse_trace[0])
        assert set(final_rmse_summary(sweep)) == {8}

    def test_eta_out_of_range(self, small_friedman):
        with pytest.raises(InvalidInputError):
            eta_sweep(small_friedman, [9])
        with pytest.raises(InvalidInputError):
            eta_sweep(small_friedman, [0])

    def test_emit_and_load(self, tmp_path, small_friedman, fast_spec):
        sweep = eta_sweep(small_friedman, [4, 8], base=fast_spec, seeds=[0, 1])
        paths = emit_sweep(sweep, tmp_path)
        assert load_sweep(paths["sweep.json"]).model_dump() == sweep.model_dump()
        rows = read_csv(paths["traces.csv"])
        assert len(rows) == 2 * 2 + 2 * 1

    def test_median_traces_combine_every_seed(self):
        sweep = SweepReport(traces=[
            EtaTrace(eta=2, seed=0, rmse_trace=[1.0, 4.0, 2.0]),
            EtaTrace(eta=2, seed=1, rmse_trace=[3.0, 2.0, 6.0]),
            EtaTrace(eta=2, seed=2, rmse_trace=[2.0, 9.0, 1.0]),
            EtaTrace(eta=2, seed=3, error="DivergenceError: boom"),
            EtaTrace(eta=5, seed=0, rmse_trace=[5.0]),
        ])
        assert median_traces(sweep) == {2: [2.0, 4.0, 2.0], 5: [5.0]}

    def test_sweep_plot_draws_the_median(self, tmp_path):
        sweep = SweepReport(traces=[
            EtaTrace(eta=3, seed=0, rmse_trace=[1.0, 5.0]),
            EtaTrace(eta=3, seed=1, rmse_trace=[3.0, 1.0]),
        ])
        svg = Path(emit_sweep(sweep, tmp_path)["plot.svg"]).read_text(encoding="utf-8")
        assert "eta=3 median" in svg
        assert svg.count("<polyline") == 1

    def test_rises_then_falls(self):
        assert rises_then_falls([1.0, 3.0, 2.0])
        assert not rises_then_falls([1.0, 2.0, 3.0])
        assert not rises_then_falls([1.0])
        assert not rises_then_falls([2.0, 2.0])
