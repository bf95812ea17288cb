"""CSV and SVG emission."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .finite_pricer import Fig1Data, format_number
from .market import OptionKind

__all__ = ["write_csv", "fmt", "fig1_svg"]


def fmt(value) -> str:
    """CSV number format; non-finite values are spelled out."""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format_number(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


_PANEL_W, _PANEL_H = 360, 280
_MARGIN = dict(left=60, right=15, top=40, bottom=45)
_COLORS = {3.0: "#1f77b4", 4.0: "#d62728", 5.0: "#222222"}


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 10))
        v += step
    return ticks


def _marker(shape: str, x: float, y: float, color: str) -> str:
    if shape == "square":
        return (f'<rect x="{x - 3:.2f}" y="{y - 3:.2f}" width="6" height="6" '
                f'fill="none" stroke="{color}"/>')
    if shape == "rhombus":
        pts = f"{x:.2f},{y - 4:.2f} {x + 4:.2f},{y:.2f} {x:.2f},{y + 4:.2f} {x - 4:.2f},{y:.2f}"
        return f'<polygon points="{pts}" fill="none" stroke="{color}"/>'
    return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>'


def _panel(data: Fig1Data, kind: OptionKind, x0: float) -> list[str]:
    m = data.market.grid.indices
    curves = data.curves[kind]
    ys = [v for c in curves for v in c.values]
    y_lo, y_hi = min(0.0, min(ys)), max(ys)
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    x_lo, x_hi = float(m[0]), float(m[-1])
    left, top = x0 + _MARGIN["left"], _MARGIN["top"]
    width = _PANEL_W - _MARGIN["left"] - _MARGIN["right"]
    height = _PANEL_H - _MARGIN["top"] - _MARGIN["bottom"]

    def px(v):
        return left + (v - x_lo) / (x_hi - x_lo) * width

    def py(v):
        return top + height - (v - y_lo) / (y_hi - y_lo) * height

    out = [
        f'<g class="panel-{kind.value}">',
        f'<text x="{left + width / 2:.2f}" y="{top - 15}" text-anchor="middle">'
        f'{"V_C" if kind is OptionKind.CALL else "V_P"}</text>',
        f'<rect x="{left:.2f}" y="{top:.2f}" width="{width:.2f}" height="{height:.2f}" '
        'fill="none" stroke="black"/>',
    ]
    for tick in _nice_ticks(x_lo, x_hi):
        out.append(f'<line x1="{px(tick):.2f}" y1="{top + height:.2f}" x2="{px(tick):.2f}" '
                   f'y2="{top + height + 4:.2f}" stroke="black"/>')
        out.append(f'<text x="{px(tick):.2f}" y="{top + height + 16:.2f}" '
                   f'text-anchor="middle">{tick:g}</text>')
    for tick in _nice_ticks(y_lo, y_hi):
        out.append(f'<line x1="{left - 4:.2f}" y1="{py(tick):.2f}" x2="{left:.2f}" '
                   f'y2="{py(tick):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6:.2f}" y="{py(tick) + 4:.2f}" '
                   f'text-anchor="end">{tick:g}</text>')
    out.append(f'<text x="{left + width / 2:.2f}" y="{top + height + 34:.2f}" '
               'text-anchor="middle">m  (S = exp(m sqrt(kappa)))</text>')
    shapes = ("square", "rhombus", "bullet")
    for shape, curve in zip(shapes, curves):
        color = _COLORS.get(curve.t, "#555555")
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(m, curve.values))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   'stroke-width="0.8"/>')
        out.extend(_marker(shape, px(x), py(y), color) for x, y in zip(m, curve.values))
    out.append("</g>")
    return out


def fig1_svg(data: Fig1Data, path=None) -> str:
    """Two-panel chart (call, put) of the price curves at each evaluation time."""
    width, height = 2 * _PANEL_W, _PANEL_H + 30
    K = data.market.strike
    title = (f"d={data.market.grid.d}, sigma={data.market.params.sigma:g}, "
             f"r={data.market.params.r:g}, K=exp({data.market.strike_index} sqrt(kappa))="
             f"{K:.6g}, T={data.market.maturity:g}")
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" '
        'font-size="11">',
        f'<text x="{width / 2}" y="14" text-anchor="middle">{escape(title)}</text>',
    ]
    parts += _panel(data, OptionKind.CALL, 0)
    parts += _panel(data, OptionKind.PUT, _PANEL_W)
    legend_y = _PANEL_H + 15
    for i, (shape, t) in enumerate(zip(("square", "rhombus", "bullet"), data.times)):
        x = 80 + i * 120
        color = _COLORS.get(t, "#555555")
        parts.append(_marker(shape, x, legend_y - 4, color))
        parts.append(f'<text x="{x + 8}" y="{legend_y}">t = {t:g}</text>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(svg)
    return svg
