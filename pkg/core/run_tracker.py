# core/run_tracker.py

"""
Timing tracker for comparison runs.
One record per (method, seed) run with per-method breakdown.
"""

import csv
import os
import threading
import time
from dataclasses import dataclass
from typing import Dict, List


@dataclass
class RunRecord:
    """Record of a single (method, seed) run."""
    method: str
    seed: int
    duration_seconds: float
    ok: bool = True


class RunTracker:
    """Tracks wall time across all runs of a comparison."""

    def __init__(self):
        self.runs: List[RunRecord] = []
        self.start_time: float = time.time()
        self._lock = threading.Lock()

    def record(self, method: str, seed: int, duration: float, ok: bool = True):
        """Record a single run."""
        with self._lock:
            self.runs.append(RunRecord(method, seed, duration, ok))

    def get_method_summary(self) -> Dict[str, Dict]:
        """Per-method run counts and timing."""
        methods: Dict[str, Dict] = {}
        for r in sorted(self.runs, key=lambda r: (r.method, r.seed)):
            m = methods.setdefault(
                r.method, {"runs": 0, "failed": 0, "duration_seconds": 0.0}
            )
            m["runs"] += 1
            m["failed"] += 0 if r.ok else 1
            m["duration_seconds"] += r.duration_seconds
        return methods

    def print_report(self):
        """Print formatted timing report."""
        summary = self.get_method_summary()
        wall_time = time.time() - self.start_time

        print("\n" + "=" * 60)
        print("RUN TIMING REPORT")
        print("=" * 60)
        print(f"{'Method':<20} {'Runs':>6} {'Failed':>7} {'Total':>10} {'Mean':>10}")
        print("-" * 60)
        for name, m in summary.items():
            mean = m["duration_seconds"] / max(m["runs"], 1)
            print(
                f"{name:<20} {m['runs']:>6} {m['failed']:>7} "
                f"{m['duration_seconds']:>9.2f}s {mean:>9.2f}s"
            )
        print("-" * 60)
        print(f"  Wall time: {wall_time:.1f}s ({wall_time / 60:.1f}min)")
        print("=" * 60)

    def save_csv(self, output_dir: str) -> str:
        """Save per-run timings as timings.csv."""
        os.makedirs(output_dir, exist_ok=True)
        path = os.path.join(output_dir, "timings.csv")
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["method", "seed", "seconds", "ok"])
            for r in sorted(self.runs, key=lambda r: (r.method, r.seed)):
                writer.writerow([r.method, r.seed, f"{r.duration_seconds:.4f}", int(r.ok)])
        return path
