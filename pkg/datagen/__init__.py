# datagen/__init__.py

"""
Synthetic benchmarks.
- friedman: Halton-sampled Friedman function with a shifted target domain
- motion: multi-subject flexion time series
"""

from datagen.friedman import FriedmanBenchmarkSpec, friedman, friedman_batch, make_friedman_benchmark
from datagen.motion import MotionDataset, MotionSpec, make_motion_dataset
