# evaluation/svg_plots.py

"""
Plain SVG charts for the report bundle.
Predictions vs truth, an absolute-error box plot per method and line charts
of traces. Output is a deterministic string: fixed coordinate precision,
series drawn in sorted name order.
"""

from typing import Dict, List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

# ============================================================
# Colour Theme Constants
# ============================================================

THEME = {
    "truth": "#333333",
    "series": ["#1ba1e2", "#d80073", "#f09609", "#60a917", "#6a00ff", "#00aba9", "#a20025"],
    "box_fill": "#8abbe7",
    "box_fill_light": "#d5e8f7",
    "axis": "#888888",
    "grid": "#e6e6e6",
    "text": "#333333",
    "background": "white",
    "font_name": "Segoe UI, Helvetica, Arial, sans-serif",
    "font_size": "11",
}

PANEL_WIDTH = 720
PANEL_HEIGHT = 260
MARGIN = (60, 20, 30, 40)   # left, right, top, bottom

SVG_GRADIENT_DEFS = f"""
  <linearGradient id="gradBox" x1="0%" y1="0%" x2="0%" y2="100%">
    <stop offset="0%" style="stop-color:{THEME['box_fill_light']};stop-opacity:1" />
    <stop offset="100%" style="stop-color:{THEME['box_fill']};stop-opacity:1" />
  </linearGradient>
"""


def _f(v: float) -> str:
    return f"{v:.2f}"


def _colour(i: int) -> str:
    return THEME["series"][i % len(THEME["series"])]


def _text(x, y, s, anchor="middle", size=None, weight="normal") -> str:
    return (
        f'<text x="{_f(x)}" y="{_f(y)}" text-anchor="{anchor}" font-weight="{weight}" '
        f'font-size="{size or THEME["font_size"]}" fill="{THEME["text"]}">{escape(str(s))}</text>'
    )


class _Panel:
    """Maps data coordinates into one panel's plotting box."""

    def __init__(self, top: float, title: str, x_range: Tuple[float, float], y_range: Tuple[float, float]):
        left, right, pad_top, bottom = MARGIN
        self.x0, self.x1 = left, PANEL_WIDTH - right
        self.y0, self.y1 = top + pad_top, top + PANEL_HEIGHT - bottom
        self.top = top
        self.title = title
        lo, hi = y_range
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        self.ylo, self.yhi = lo - pad, hi + pad
        self.xlo, self.xhi = x_range if x_range[1] > x_range[0] else (x_range[0] - 0.5, x_range[0] + 0.5)

    def sx(self, x: float) -> float:
        return self.x0 + (x - self.xlo) / (self.xhi - self.xlo) * (self.x1 - self.x0)

    def sy(self, y: float) -> float:
        return self.y1 - (y - self.ylo) / (self.yhi - self.ylo) * (self.y1 - self.y0)

    def frame(self) -> List[str]:
        parts = [_text((self.x0 + self.x1) / 2, self.top + 18, self.title, size="13", weight="bold")]
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            y = self.ylo + frac * (self.yhi - self.ylo)
            py = self.sy(y)
            parts.append(
                f'<line x1="{_f(self.x0)}" y1="{_f(py)}" x2="{_f(self.x1)}" y2="{_f(py)}" '
                f'stroke="{THEME["grid"]}" stroke-width="1" />'
            )
            parts.append(_text(self.x0 - 6, py + 4, f"{y:.3g}", anchor="end", size="10"))
        parts.append(
            f'<rect x="{_f(self.x0)}" y="{_f(self.y0)}" width="{_f(self.x1 - self.x0)}" '
            f'height="{_f(self.y1 - self.y0)}" fill="none" stroke="{THEME["axis"]}" stroke-width="1" />'
        )
        return parts

    def polyline(self, xs: Sequence[float], ys: Sequence[float], colour: str, width: float = 1.5) -> str:
        pts = " ".join(f"{_f(self.sx(x))},{_f(self.sy(y))}" for x, y in zip(xs, ys))
        return f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="{width}" />'

    def legend(self, names: Sequence[str], colours: Sequence[str]) -> List[str]:
        parts = []
        for i, (name, colour) in enumerate(zip(names, colours)):
            x = self.x0 + 8 + 110 * i
            y = self.y0 + 12
            parts.append(
                f'<line x1="{_f(x)}" y1="{_f(y)}" x2="{_f(x + 16)}" y2="{_f(y)}" '
                f'stroke="{colour}" stroke-width="2.5" />'
            )
            parts.append(_text(x + 20, y + 4, name, anchor="start", size="10"))
        return parts


def _empty_panel(top: float, title: str) -> List[str]:
    panel = _Panel(top, title, (0.0, 1.0), (0.0, 1.0))
    return panel.frame() + [_text((panel.x0 + panel.x1) / 2, (panel.y0 + panel.y1) / 2, "no data")]


def _lines_panel(top: float, title: str, series: Dict[str, Sequence[float]], truth=None) -> List[str]:
    series = {k: list(v) for k, v in sorted(series.items()) if len(v)}
    values = [v for s in series.values() for v in s] + list(truth if truth is not None else [])
    if not values:
        return _empty_panel(top, title)
    longest = max([len(s) for s in series.values()] + [len(truth) if truth is not None else 0])
    panel = _Panel(top, title, (0.0, float(max(longest - 1, 1))), (min(values), max(values)))
    parts = panel.frame()
    names, colours = [], []
    if truth is not None and len(truth):
        parts.append(panel.polyline(range(len(truth)), truth, THEME["truth"], width=2.5))
        names.append("truth")
        colours.append(THEME["truth"])
    for i, (name, ys) in enumerate(series.items()):
        parts.append(panel.polyline(range(len(ys)), ys, _colour(i)))
        names.append(name)
        colours.append(_colour(i))
    return parts + panel.legend(names, colours)


def _box_panel(top: float, title: str, errors: Dict[str, Sequence[float]]) -> List[str]:
    errors = {k: np.asarray(v, dtype=np.float64) for k, v in sorted(errors.items()) if len(v)}
    if not errors:
        return _empty_panel(top, title)
    hi = max(float(v.max()) for v in errors.values())
    panel = _Panel(top, title, (-0.5, len(errors) - 0.5), (0.0, hi))
    parts = panel.frame()
    half = 0.25
    for i, (name, v) in enumerate(errors.items()):
        q1, med, q3 = np.percentile(v, [25, 50, 75])
        cx = panel.sx(i)
        w = panel.sx(i + half) - cx
        parts.append(
            f'<line x1="{_f(cx)}" y1="{_f(panel.sy(v.min()))}" x2="{_f(cx)}" y2="{_f(panel.sy(v.max()))}" '
            f'stroke="{THEME["axis"]}" stroke-width="1" />'
        )
        parts.append(
            f'<rect x="{_f(cx - w)}" y="{_f(panel.sy(q3))}" width="{_f(2 * w)}" '
            f'height="{_f(panel.sy(q1) - panel.sy(q3))}" fill="url(#gradBox)" stroke="none" />'
        )
        parts.append(
            f'<line x1="{_f(cx - w)}" y1="{_f(panel.sy(med))}" x2="{_f(cx + w)}" y2="{_f(panel.sy(med))}" '
            f'stroke="{_colour(i)}" stroke-width="2.5" />'
        )
        parts.append(_text(cx, panel.y1 + 16, name, size="10"))
    return parts


def _document(panels: List[List[str]]) -> str:
    height = PANEL_HEIGHT * max(len(panels), 1)
    body = "\n".join(line for panel in panels for line in panel)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_WIDTH}" height="{height}" '
        f'viewBox="0 0 {PANEL_WIDTH} {height}" font-family="{THEME["font_name"]}">\n'
        f"<defs>{SVG_GRADIENT_DEFS}</defs>\n"
        f'<rect width="100%" height="100%" fill="{THEME["background"]}" />\n'
        f"{body}\n</svg>\n"
    )


def render_report_svg(
    truth: Sequence[float],
    predictions: Dict[str, Sequence[float]],
    errors: Dict[str, Sequence[float]],
    traces: Dict[str, Sequence[float]],
) -> str:
    """Three stacked panels: predictions vs truth, error boxes, traces."""
    return _document([
        _lines_panel(0, "Predictions vs truth (representative seed)", predictions, truth),
        _box_panel(PANEL_HEIGHT, "Absolute error per target", errors),
        _lines_panel(2 * PANEL_HEIGHT, "Calibration loss per iteration", traces),
    ])


def render_sweep_svg(traces: Dict[str, Sequence[float]]) -> str:
    return _document([_lines_panel(0, "Labeled-target RMSE per iteration", traces)])
