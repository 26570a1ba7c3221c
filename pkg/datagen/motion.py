# datagen/motion.py

"""
Synthetic multi-subject neck-flexion recordings.

Each subject performs repeated flexion with its own amplitude, phase and
body mass index. A latent flexion angle drives every observed channel:

- 27 marker coordinates = M theta + N theta^2 + subject offset + noise
- neck angle, head angle and the C7-to-mandible distance
- the subject's static BMI

The label is the same smooth function of theta for every subject, so the
conditional law is shared while the input distribution shifts between
subjects. Everything is drawn from numpy's PCG64 generator seeded by
MotionSpec.seed.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from core.errors import InvalidInputError

N_MARKERS = 27
CHANNELS = [f"x_m{i:02d}" for i in range(1, N_MARKERS + 1)] + [
    "x_neck_angle", "x_head_angle", "x_c7_mmp", "x_bmi",
]


@dataclass(frozen=True)
class MotionSpec:
    n_subjects: int = 6
    frames: int = 60
    noise: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.n_subjects < 2:
            raise InvalidInputError("need at least two subjects (sources plus a target)")
        if self.frames < 2:
            raise InvalidInputError("need at least two frames per subject")
        if self.noise < 0:
            raise InvalidInputError("noise must be >= 0")


@dataclass(frozen=True)
class MotionDataset:
    inputs: np.ndarray      # (n_subjects * frames, 31)
    labels: np.ndarray
    groups: np.ndarray      # subject index per row
    times: np.ndarray       # frame index within the subject
    angles: np.ndarray      # latent flexion angle, radians
    columns: List[str]

    def rows_of(self, subject: int) -> np.ndarray:
        return np.flatnonzero(self.groups == subject)


def curvature(theta: np.ndarray) -> np.ndarray:
    """Label law shared by every subject (degrees)."""
    return 12.0 + 24.0 * theta + 6.0 * np.sin(2.0 * theta)


def make_motion_dataset(spec: MotionSpec = None) -> MotionDataset:
    spec = spec or MotionSpec()
    rng = np.random.default_rng(spec.seed)
    m = rng.normal(0.0, 1.0, N_MARKERS)
    n = rng.normal(0.0, 0.5, N_MARKERS)
    base = rng.uniform(-1.0, 1.0, N_MARKERS)

    t = np.arange(spec.frames, dtype=np.float64)
    inputs, labels, groups, times, angles = [], [], [], [], []
    for s in range(spec.n_subjects):
        amplitude = rng.uniform(0.5, 1.1)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        cycles = rng.uniform(1.0, 2.0)
        bmi = rng.uniform(19.0, 31.0)
        offset = rng.normal(0.0, 0.05, N_MARKERS) * (bmi / 25.0)
        c7_rest = rng.uniform(9.0, 12.0) * (bmi / 25.0) ** 0.5

        theta = 0.5 * amplitude * (1.0 - np.cos(2.0 * np.pi * cycles * t / spec.frames + phase))
        markers = (
            base + offset
            + np.outer(theta, m) + np.outer(theta ** 2, n)
            + rng.normal(0.0, spec.noise, (spec.frames, N_MARKERS))
        )
        neck = 0.6 * theta + rng.normal(0.0, spec.noise, spec.frames)
        head = 0.4 * theta + 0.1 * theta ** 2 + rng.normal(0.0, spec.noise, spec.frames)
        c7 = c7_rest * np.cos(0.5 * theta) + rng.normal(0.0, spec.noise, spec.frames)
        block = np.column_stack([markers, neck, head, c7, np.full(spec.frames, bmi)])

        inputs.append(block)
        labels.append(curvature(theta))
        groups.append(np.full(spec.frames, s))
        times.append(t.copy())
        angles.append(theta)

    return MotionDataset(
        np.vstack(inputs),
        np.concatenate(labels),
        np.concatenate(groups),
        np.concatenate(times),
        np.concatenate(angles),
        list(CHANNELS),
    )
