# pipeline/common.py

"""
Shared console output for the experiment commands.
Banners go to stdout; everything else is logged.
"""

from typing import Dict

from core.config import config


def print_pipeline_header(
    pipeline_name: str,
    experiment_name: str = "",
    extra_info: Dict[str, str] = None,
):
    """Print formatted pipeline header."""
    print("=" * 65)
    print(f"Re-ISDA bench - {pipeline_name}")
    if experiment_name:
        print(f"  Experiment: {experiment_name}")
    print(f"  Log level: {config.log.level}")
    if extra_info:
        for k, v in extra_info.items():
            print(f"  {k}: {v}")
    print("=" * 65, flush=True)


def print_pipeline_footer(
    output_dir: str,
    stats: Dict[str, object],
    total_time: float,
):
    """Print formatted pipeline footer with stats."""
    print(f"\n{'=' * 65}")
    print("✓ Done")
    print(f"  Output: {output_dir}")
    for k, v in stats.items():
        print(f"  {k}: {v}")
    print(f"  Time: {total_time:.1f}s")
    print("=" * 65, flush=True)
