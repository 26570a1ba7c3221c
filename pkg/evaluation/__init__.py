# evaluation/__init__.py

"""
Scoring and reporting.
- metrics: rmse, absolute errors, seed statistics
- comparison: method registry and the multi-seed comparison harness
- sweep: Re-ISDA block-size sweep
- report: report.json / CSV / SVG emission
- svg_plots: SVG charts
"""

from evaluation.comparison import MethodSetup, run_comparison, run_method
from evaluation.metrics import abs_errors, rmse, summarize
from evaluation.report import emit_report, emit_sweep, load_report, load_sweep
from evaluation.sweep import eta_sweep
