# pipeline/bundle.py

"""
CSV benchmark bundles.

A bundle directory holds
  source.csv       [group,] [t,] x_..., y
  target.csv       id, [t,] x_...
  calibration.csv  [t,] x_..., y          (optional, one row)
  truth.csv        id, y                  (sealed target labels)
  meta.json        generator name and parameters, column list

Feature columns are the ones prefixed `x_`, in header order. Files are
UTF-8 with a header row, RFC-4180 quoting and '.' decimals. Writing is
deterministic: floats are written with repr, no timestamps.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.errors import ConfigError, InvalidInputError, OutputError
from datagen.motion import MotionDataset
from domain.data import Dataset, LabeledSample, ScoredPair

logger = logging.getLogger(__name__)

FEATURE_PREFIX = "x_"
BUNDLE_FILES = ("source.csv", "target.csv", "calibration.csv", "truth.csv", "meta.json")


@dataclass(frozen=True)
class Bundle:
    columns: List[str]
    source: Dataset
    target_inputs: np.ndarray
    target_ids: np.ndarray
    calibration: Optional[LabeledSample] = None
    truth: Optional[np.ndarray] = None
    source_groups: Optional[np.ndarray] = None
    source_times: Optional[np.ndarray] = None
    target_times: Optional[np.ndarray] = None
    calibration_time: Optional[float] = None
    meta: Dict = field(default_factory=dict)

    @property
    def is_time_series(self) -> bool:
        return self.source_times is not None and self.target_times is not None


# ============================================================
# Building bundles
# ============================================================

def bundle_from_scored(scored: ScoredPair, meta: Dict) -> Bundle:
    pair = scored.pair
    columns = [f"{FEATURE_PREFIX}{i + 1}" for i in range(pair.dim)]
    return Bundle(
        columns=columns,
        source=pair.source,
        target_inputs=pair.target_inputs,
        target_ids=scored.target_ids,
        calibration=pair.calibration,
        truth=scored.truth_for_scoring(),
        meta=meta,
    )


def bundle_from_motion(data: MotionDataset, target_subject: int = -1, meta: Dict = None) -> Bundle:
    """
    One subject becomes the target domain; its first frame (labeled) is the
    calibration sample and the remaining frames are the targets.
    """
    subjects = sorted(set(data.groups.tolist()))
    target = subjects[target_subject]
    src = np.flatnonzero(data.groups != target)
    rows = data.rows_of(target)
    rows = rows[np.argsort(data.times[rows], kind="stable")]
    cal, tgt = rows[0], rows[1:]
    if tgt.size == 0:
        raise InvalidInputError("target subject needs at least two frames")
    return Bundle(
        columns=list(data.columns),
        source=Dataset(data.inputs[src], data.labels[src]),
        target_inputs=data.inputs[tgt],
        target_ids=np.arange(tgt.size),
        calibration=LabeledSample(data.inputs[cal], data.labels[cal]),
        truth=data.labels[tgt],
        source_groups=data.groups[src],
        source_times=data.times[src],
        target_times=data.times[tgt],
        calibration_time=float(data.times[cal]),
        meta=dict(meta or {}, target_subject=int(target)),
    )


# ============================================================
# Writing
# ============================================================

def _num(v) -> str:
    return repr(float(v))


def _write_rows(path: Path, header: List[str], rows) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\r\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise OutputError(path, e) from e


def write_bundle(bundle: Bundle, out_dir) -> Dict[str, str]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(out, e) from e
    cols = list(bundle.columns)
    paths = {}

    lead = (["group"] if bundle.source_groups is not None else []) + \
           (["t"] if bundle.source_times is not None else [])
    src_rows = []
    for i in range(bundle.source.size):
        row = []
        if bundle.source_groups is not None:
            row.append(str(int(bundle.source_groups[i])))
        if bundle.source_times is not None:
            row.append(_num(bundle.source_times[i]))
        row += [_num(v) for v in bundle.source.inputs[i]] + [_num(bundle.source.labels[i])]
        src_rows.append(row)
    paths["source.csv"] = out / "source.csv"
    _write_rows(paths["source.csv"], lead + cols + ["y"], src_rows)

    has_t = bundle.target_times is not None
    tgt_rows = [
        [str(int(bundle.target_ids[i]))]
        + ([_num(bundle.target_times[i])] if has_t else [])
        + [_num(v) for v in bundle.target_inputs[i]]
        for i in range(bundle.target_inputs.shape[0])
    ]
    paths["target.csv"] = out / "target.csv"
    _write_rows(paths["target.csv"], ["id"] + (["t"] if has_t else []) + cols, tgt_rows)

    if bundle.calibration is not None:
        cal_t = bundle.calibration_time is not None
        paths["calibration.csv"] = out / "calibration.csv"
        _write_rows(
            paths["calibration.csv"],
            (["t"] if cal_t else []) + cols + ["y"],
            [([_num(bundle.calibration_time)] if cal_t else [])
             + [_num(v) for v in bundle.calibration.x] + [_num(bundle.calibration.y)]],
        )

    if bundle.truth is not None:
        paths["truth.csv"] = out / "truth.csv"
        _write_rows(
            paths["truth.csv"], ["id", "y"],
            [[str(int(i)), _num(y)] for i, y in zip(bundle.target_ids, bundle.truth)],
        )

    meta = dict(bundle.meta, columns=cols, schema_version=1)
    paths["meta.json"] = out / "meta.json"
    try:
        paths["meta.json"].write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(paths["meta.json"], e) from e

    logger.info("[Bundle] wrote %d files to %s", len(paths), out)
    return {k: str(v) for k, v in paths.items()}


# ============================================================
# Reading
# ============================================================

def _read_table(path: Path):
    if not path.exists():
        raise ConfigError(f"missing data file: {path}")
    try:
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    if not rows:
        raise ConfigError(f"{path}: empty file (a header row is required)")
    header, body = rows[0], [r for r in rows[1:] if r]
    for n, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise ConfigError(f"{path}:{n}: expected {len(header)} fields, got {len(r)}")
    return header, body


def _column(path, header, body, name, required=True) -> Optional[np.ndarray]:
    if name not in header:
        if required:
            raise ConfigError(f"{path}: missing column {name!r}")
        return None
    j = header.index(name)
    try:
        return np.array([float(r[j]) for r in body])
    except ValueError as e:
        raise ConfigError(f"{path}: non-numeric value in column {name!r}: {e}") from e


def _features(path, header, body) -> Tuple[List[str], np.ndarray]:
    cols = [h for h in header if h.startswith(FEATURE_PREFIX)]
    if not cols:
        raise ConfigError(f"{path}: no feature columns (prefix {FEATURE_PREFIX!r})")
    x = np.column_stack([_column(path, header, body, c) for c in cols]) if body else np.zeros((0, len(cols)))
    if not np.all(np.isfinite(x)):
        raise ConfigError(f"{path}: non-finite feature values")
    return cols, x


def read_csv_files(
    source_path,
    target_path,
    calibration_path=None,
    truth_path=None,
    meta: Dict = None,
) -> Bundle:
    source_path, target_path = Path(source_path), Path(target_path)
    header, body = _read_table(source_path)
    cols, xs = _features(source_path, header, body)
    ys = _column(source_path, header, body, "y")
    groups = _column(source_path, header, body, "group", required=False)
    s_times = _column(source_path, header, body, "t", required=False)
    if not body:
        raise ConfigError(f"{source_path}: no rows")

    t_header, t_body = _read_table(target_path)
    t_cols, xt = _features(target_path, t_header, t_body)
    if t_cols != cols:
        raise ConfigError(f"{target_path}: feature columns differ from {source_path}")
    if "y" in t_header:
        raise ConfigError(f"{target_path}: target file must not carry labels (put them in truth.csv)")
    if not t_body:
        raise ConfigError(f"{target_path}: no rows")
    ids = _column(target_path, t_header, t_body, "id", required=False)
    ids = np.arange(len(t_body)) if ids is None else ids.astype(int)
    t_times = _column(target_path, t_header, t_body, "t", required=False)

    calibration, cal_time = None, None
    if calibration_path is not None and Path(calibration_path).exists():
        c_header, c_body = _read_table(Path(calibration_path))
        c_cols, xc = _features(calibration_path, c_header, c_body)
        if c_cols != cols or len(c_body) != 1:
            raise ConfigError(f"{calibration_path}: need exactly one row with the source feature columns")
        yc = _column(calibration_path, c_header, c_body, "y")
        try:
            calibration = LabeledSample(xc[0], yc[0])
        except InvalidInputError as e:
            raise ConfigError(f"{calibration_path}: {e}") from e
        ct = _column(calibration_path, c_header, c_body, "t", required=False)
        cal_time = None if ct is None else float(ct[0])

    truth = None
    if truth_path is not None and Path(truth_path).exists():
        r_header, r_body = _read_table(Path(truth_path))
        r_ids = _column(truth_path, r_header, r_body, "id").astype(int)
        r_y = _column(truth_path, r_header, r_body, "y")
        lookup = dict(zip(r_ids.tolist(), r_y.tolist()))
        missing = [i for i in ids.tolist() if i not in lookup]
        if missing:
            raise ConfigError(f"{truth_path}: no label for target ids {missing[:5]}")
        truth = np.array([lookup[i] for i in ids.tolist()])

    try:
        source = Dataset(xs, ys)
    except InvalidInputError as e:
        raise ConfigError(f"{source_path}: {e}") from e
    return Bundle(
        columns=cols,
        source=source,
        target_inputs=xt,
        target_ids=ids,
        calibration=calibration,
        truth=truth,
        source_groups=None if groups is None else groups.astype(int),
        source_times=s_times,
        target_times=t_times,
        calibration_time=cal_time,
        meta=meta or {},
    )


def read_bundle(directory) -> Bundle:
    d = Path(directory)
    if not d.is_dir():
        raise ConfigError(f"bundle directory not found: {d}")
    meta = {}
    if (d / "meta.json").exists():
        try:
            meta = json.loads((d / "meta.json").read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"{d / 'meta.json'}: {e}") from e
    return read_csv_files(
        d / "source.csv", d / "target.csv", d / "calibration.csv", d / "truth.csv", meta
    )
