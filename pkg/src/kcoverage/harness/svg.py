"""Minimal SVG line charts rendered from trace CSV files."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .traces import read_trace_csv

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]

PANEL_W, PANEL_H = 420, 300
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 55, 15, 30, 40


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if raw <= m * mag)
    first = math.ceil(lo / step - 1e-9)
    return [round(i * step, 9) for i in range(first, math.floor(hi / step + 1e-9) + 1)]


def _panel(x0, y0, title, series, y_max):
    """series: list of (label, [(x, y), ...])."""
    w = PANEL_W - MARGIN_L - MARGIN_R
    h = PANEL_H - MARGIN_T - MARGIN_B
    xs = [x for _, pts in series for x, _ in pts]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0, 1)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    ox, oy = x0 + MARGIN_L, y0 + MARGIN_T

    def px(x):
        return ox + (x - x_lo) / (x_hi - x_lo) * w

    def py(y):
        return oy + h - y / y_max * h

    out = [f'<g class="panel">',
           f'<text x="{ox + w / 2:.1f}" y="{y0 + 18}" text-anchor="middle" font-size="13">{escape(title)}</text>',
           f'<rect x="{ox}" y="{oy}" width="{w}" height="{h}" fill="none" stroke="#000"/>']
    for t in _nice_ticks(x_lo, x_hi):
        out.append(f'<line x1="{px(t):.2f}" y1="{oy + h}" x2="{px(t):.2f}" y2="{oy + h + 4}" stroke="#000"/>')
        out.append(f'<text x="{px(t):.2f}" y="{oy + h + 16}" text-anchor="middle" font-size="10">{t:g}</text>')
    for t in _nice_ticks(0, y_max):
        out.append(f'<line x1="{ox - 4}" y1="{py(t):.2f}" x2="{ox}" y2="{py(t):.2f}" stroke="#000"/>')
        out.append(f'<text x="{ox - 6}" y="{py(t) + 3:.2f}" text-anchor="end" font-size="10">{t:g}</text>')
    out.append(f'<text x="{ox + w / 2:.1f}" y="{oy + h + 32}" text-anchor="middle" font-size="11">period</text>')
    for i, (label, pts) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        if pts:
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = oy + 12 + 14 * i
        out.append(f'<line x1="{ox + w - 110}" y1="{ly}" x2="{ox + w - 92}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ox + w - 88}" y="{ly + 4}" font-size="10" class="legend">{escape(label)}</text>')
    out.append("</g>")
    return out


def render_svg(panels) -> str:
    """panels: list of (title, series) where series is [(label, [(x, y), ...])]."""
    all_y = [y for _, series in panels for _, pts in series for _, y in pts]
    top = max(all_y, default=1.0)
    y_max = 1.0 if top <= 1.0 else float(top) * 1.05
    width = PANEL_W * max(1, len(panels))
    parts = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{PANEL_H}" '
             f'viewBox="0 0 {width} {PANEL_H}">',
             f'<rect width="{width}" height="{PANEL_H}" fill="#fff"/>']
    for i, (title, series) in enumerate(panels):
        parts.extend(_panel(i * PANEL_W, 0, title, series, y_max))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_traces(csv_paths, columns, output, layout="overlay", titles=None) -> Path:
    """Draw ``columns`` (e.g. theta_p1, awake) of each CSV against period.

    ``overlay`` puts every (file, column) series in one chart; ``panels``
    draws one chart per file.
    """
    traces = [(Path(p), read_trace_csv(p)) for p in csv_paths]
    titles = list(titles) if titles else [p.stem for p, _ in traces]

    def series_for(trace, prefix=""):
        periods = trace.column("period")
        return [(prefix + col, list(zip(periods, trace.column(col)))) for col in columns]

    if layout == "panels":
        panels = [(t, series_for(tr)) for t, (_, tr) in zip(titles, traces)]
    elif layout == "overlay":
        series = []
        for t, (_, tr) in zip(titles, traces):
            series.extend(series_for(tr, f"{t}:" if len(traces) > 1 else ""))
        panels = [(", ".join(columns), series)]
    else:
        raise ValueError(f"unknown layout {layout!r}")
    output = Path(output)
    output.write_text(render_svg(panels), encoding="utf-8")
    return output
