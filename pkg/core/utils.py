# core/utils.py

"""
Shared utility functions used across the packages.
Timing, logging setup, data fingerprints and CLI list parsing.
"""

import hashlib
import logging
import os
import sys
import time
from typing import Iterable

import numpy as np

from core.config import config

logger = logging.getLogger(__name__)


# ============================================================
# Timing
# ============================================================

def timed(name: str, start: float) -> float:
    """Log elapsed time for a task and return it."""
    elapsed = time.time() - start
    logger.info("[%s] done in %.1fs", name, elapsed)
    return elapsed


# ============================================================
# Logging
# ============================================================

_LEVEL_COLOURS = {
    "DEBUG": "\033[36m",
    "INFO": "\033[32m",
    "WARNING": "\033[33m",
    "ERROR": "\033[31m",
    "CRITICAL": "\033[1;31m",
}


def colour_enabled(stream=None) -> bool:
    """ANSI colour only on a TTY and only when NO_COLOR is unset."""
    stream = stream or sys.stderr
    if "NO_COLOR" in os.environ:
        return False
    return hasattr(stream, "isatty") and stream.isatty()


class _LevelColourFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        colour = _LEVEL_COLOURS.get(record.levelname)
        if colour and text.startswith(record.levelname):
            text = f"{colour}{record.levelname}\033[0m{text[len(record.levelname):]}"
        return text


def setup_logging(level: str = None) -> None:
    """Configure the root logger once, on stderr, one line per record."""
    level = (level or config.log.level).upper()
    handler = logging.StreamHandler(sys.stderr)
    fmt_cls = _LevelColourFormatter if colour_enabled(sys.stderr) else logging.Formatter
    handler.setFormatter(fmt_cls(config.log.fmt))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


# ============================================================
# Fingerprints and parsing
# ============================================================

def fingerprint(arrays: Iterable[np.ndarray]) -> str:
    """SHA-256 over the float64 bytes and shapes of the given arrays."""
    digest = hashlib.sha256()
    for arr in arrays:
        a = np.ascontiguousarray(arr, dtype=np.float64)
        digest.update(str(a.shape).encode("utf-8"))
        digest.update(a.tobytes())
    return digest.hexdigest()[:16]


def parse_int_list(text: str) -> list:
    """'2,3,5' -> [2, 3, 5]."""
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return [int(t) for t in items]
