"""Minimal deterministic SVG line charts.

Hand-rolled on purpose: the output contains no timestamps, random ids, or
library version strings, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

WIDTH = 720
HEIGHT = 440
MARGIN_LEFT = 62
MARGIN_RIGHT = 62
MARGIN_TOP = 40
MARGIN_BOTTOM = 52

PALETTE = ("#c23b21", "#2458a6", "#1f8a3b", "#8b35a8", "#c98a00", "#555555")


@dataclass(frozen=True)
class ChartSeries:
    label: str
    points: Sequence[tuple[float, float]]
    axis: str = "left"  # left or right


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _tick_label(value: float) -> str:
    return f"{value:.3g}"


class _Canvas:
    def __init__(self, x_range: tuple[float, float], y_range: tuple[float, float]):
        self.x_lo, self.x_hi = x_range
        self.y_lo, self.y_hi = y_range
        if self.x_hi <= self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if self.y_hi <= self.y_lo:
            self.y_hi = self.y_lo + 1.0

    def x(self, value: float) -> float:
        span = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        return MARGIN_LEFT + (value - self.x_lo) / (self.x_hi - self.x_lo) * span

    def y(self, value: float) -> float:
        span = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        return HEIGHT - MARGIN_BOTTOM - (value - self.y_lo) / (self.y_hi - self.y_lo) * span


def _polyline(canvas: _Canvas, points, color: str, dashed: bool = False) -> str:
    coords = " ".join(f"{_fmt(canvas.x(x))},{_fmt(canvas.y(y))}" for x, y in points)
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.8"{dash} points="{coords}"/>'


def _markers(canvas: _Canvas, points, color: str) -> str:
    return "".join(
        f'<circle cx="{_fmt(canvas.x(x))}" cy="{_fmt(canvas.y(y))}" r="2.4" fill="{color}"/>'
        for x, y in points
    )


def _text(x: float, y: float, content: str, size: int = 12, anchor: str = "middle",
          color: str = "#222222", rotate: float | None = None) -> str:
    transform = f' transform="rotate({rotate} {_fmt(x)} {_fmt(y)})"' if rotate is not None else ""
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" text-anchor="{anchor}" '
        f'fill="{color}" font-family="Helvetica, Arial, sans-serif"{transform}>{content}</text>'
    )


def _axes(canvas: _Canvas, x_label: str, y_label: str, y2: tuple[str, float, float] | None) -> list[str]:
    parts = []
    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    parts.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="#999999"/>')
    for tick in _ticks(canvas.x_lo, canvas.x_hi):
        px = canvas.x(tick)
        parts.append(f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" y2="{y0 + 4}" stroke="#999999"/>')
        parts.append(_text(px, y0 + 18, _tick_label(tick), size=11))
    for tick in _ticks(canvas.y_lo, canvas.y_hi):
        py = canvas.y(tick)
        parts.append(f'<line x1="{x0 - 4}" y1="{_fmt(py)}" x2="{x0}" y2="{_fmt(py)}" stroke="#999999"/>')
        parts.append(_text(x0 - 8, py + 4, _tick_label(tick), size=11, anchor="end"))
    parts.append(_text((x0 + x1) / 2, HEIGHT - 14, x_label, size=13))
    parts.append(_text(18, (y0 + y1) / 2, y_label, size=13, rotate=-90.0))
    if y2 is not None:
        label, lo, hi = y2
        for tick in _ticks(lo, hi):
            frac = (tick - lo) / (hi - lo) if hi > lo else 0.0
            py = y0 - frac * (y0 - y1)
            parts.append(f'<line x1="{x1}" y1="{_fmt(py)}" x2="{x1 + 4}" y2="{_fmt(py)}" stroke="#999999"/>')
            parts.append(_text(x1 + 8, py + 4, _tick_label(tick), size=11, anchor="start"))
        parts.append(_text(WIDTH - 16, (y0 + y1) / 2, label, size=13, rotate=90.0))
    return parts


def line_chart(
    series: Sequence[ChartSeries],
    title: str,
    x_label: str,
    y_label: str,
    y2_label: str | None = None,
    vlines: Sequence[tuple[float, str]] = (),
    y_range: tuple[float, float] | None = None,
) -> str:
    """Render series as an SVG line chart.

    Series with axis="right" are drawn against a secondary axis scaled to
    their own extent (label y2_label); vlines are dotted vertical markers."""
    if not any(s.points for s in series):
        raise ValueError("no points to chart")
    xs = [x for s in series for x, _ in s.points]
    left = [s for s in series if s.axis == "left"]
    right = [s for s in series if s.axis == "right"]
    left_ys = [y for s in left for _, y in s.points] or [0.0, 1.0]
    if y_range is None:
        pad = (max(left_ys) - min(left_ys)) * 0.05 or 0.05
        y_range = (min(left_ys) - pad, max(left_ys) + pad)
    canvas = _Canvas((min(xs), max(xs)), y_range)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        _text(WIDTH / 2, 22, title, size=15),
    ]
    y2_meta = None
    right_lo = right_hi = 0.0
    if right:
        right_ys = [y for s in right for _, y in s.points]
        right_lo, right_hi = min(right_ys), max(right_ys)
        if right_hi <= right_lo:
            right_hi = right_lo + 1.0
        y2_meta = (y2_label or "", right_lo, right_hi)
    parts.extend(_axes(canvas, x_label, y_label, y2_meta))
    for x, label in vlines:
        px = canvas.x(x)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{HEIGHT - MARGIN_BOTTOM}" x2="{_fmt(px)}" '
            f'y2="{MARGIN_TOP}" stroke="#1f8a3b" stroke-dasharray="2,4"/>'
        )
        parts.append(_text(px, MARGIN_TOP - 6, label, size=11, color="#1f8a3b"))
    legend_y = MARGIN_TOP + 14
    color_index = 0
    for s in series:
        color = PALETTE[color_index % len(PALETTE)]
        color_index += 1
        if s.axis == "right":
            span = right_hi - right_lo
            scaled = [
                (x, canvas.y_lo + (y - right_lo) / span * (canvas.y_hi - canvas.y_lo))
                for x, y in s.points
            ]
        else:
            scaled = list(s.points)
        parts.append(_polyline(canvas, scaled, color, dashed=(s.axis == "right")))
        parts.append(_markers(canvas, scaled, color))
        parts.append(
            f'<line x1="{MARGIN_LEFT + 10}" y1="{legend_y}" x2="{MARGIN_LEFT + 34}" '
            f'y2="{legend_y}" stroke="{color}" stroke-width="1.8"/>'
        )
        parts.append(_text(MARGIN_LEFT + 40, legend_y + 4, s.label, size=11, anchor="start"))
        legend_y += 16
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def series_chart(series_list, title: str, x_label: str, y_label: str) -> str:
    """Chart one or more MetricSeries against a shared left axis."""
    chart_series = [
        ChartSeries(label=s.label, points=[(x, y) for x, y, _ in s.points]) for s in series_list
    ]
    return line_chart(chart_series, title, x_label, y_label)
