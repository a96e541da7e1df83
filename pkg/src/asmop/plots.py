"""Dependency-free SVG line and scatter plots for traces and fronts."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .errors import InputError

KINDS = ("omega-vs-cost", "samplesize-vs-cost", "front")
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]
DASHES = ["", "6,3", "2,2", "8,3,2,3"]
WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 160, 20, 50
OMEGA_FLOOR = 1e-16


class _Axes:
    def __init__(self, xs, ys, log_y=False):
        self.log_y = log_y
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if log_y:
            ys = np.log10(np.maximum(ys, OMEGA_FLOOR))
        self.x0, self.x1 = _span(xs)
        self.y0, self.y1 = _span(ys)

    def px(self, x):
        return LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)

    def py(self, y):
        if self.log_y:
            y = math.log10(max(y, OMEGA_FLOOR))
        return HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)


def _span(v):
    lo, hi = float(np.min(v)), float(np.max(v))
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def _frame(ax, xlabel, ylabel):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{WIDTH - LEFT - RIGHT}" height="{HEIGHT - TOP - BOTTOM}" '
        'fill="none" stroke="black"/>',
    ]
    for t in np.linspace(ax.x0, ax.x1, 5):
        x = ax.px(t)
        parts.append(f'<line x1="{x:.2f}" y1="{HEIGHT - BOTTOM}" x2="{x:.2f}" y2="{HEIGHT - BOTTOM + 4}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{HEIGHT - BOTTOM + 16}" text-anchor="middle">{t:.3g}</text>')
    for t in np.linspace(ax.y0, ax.y1, 5):
        y = HEIGHT - BOTTOM - (t - ax.y0) / (ax.y1 - ax.y0) * (HEIGHT - TOP - BOTTOM)
        text = f"1e{t:.1f}" if ax.log_y else f"{t:.3g}"
        parts.append(f'<line x1="{LEFT - 4}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{LEFT - 6}" y="{y + 4:.2f}" text-anchor="end">{text}</text>')
    cx = LEFT + (WIDTH - LEFT - RIGHT) / 2
    parts.append(f'<text x="{cx:.2f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    cy = TOP + (HEIGHT - TOP - BOTTOM) / 2
    parts.append(f'<text x="16" y="{cy:.2f}" text-anchor="middle" transform="rotate(-90 16 {cy:.2f})">'
                 f'{escape(ylabel)}</text>')
    return parts


def _legend(parts, entries):
    x = WIDTH - RIGHT + 10
    for k, (label, color, dash) in enumerate(entries):
        y = TOP + 14 + 16 * k
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(f'<line x1="{x}" y1="{y}" x2="{x + 22}" y2="{y}" stroke="{color}" stroke-width="2"{dash_attr}/>')
        parts.append(f'<text x="{x + 28}" y="{y + 4}" class="legend">{escape(label)}</text>')


def _polyline(ax, xs, ys, color, dash):
    pts = " ".join(f"{ax.px(x):.2f},{ax.py(y):.2f}" for x, y in zip(xs, ys))
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{pts}"/>'


def _omega(r):
    return r.omega_true if r.omega_true is not None else r.omega_sub


def emit_plot(traces, kind, path, labels=None):
    """Write an SVG: omega (log scale) or per-component sample sizes against cost,
    or the objective-space scatter of a front (``traces`` is then a list of
    objective vectors or a ``FrontArchive``)."""
    if kind not in KINDS:
        raise InputError(f"unknown plot kind {kind!r}; expected one of {KINDS}")
    if kind == "front":
        svg = _front_svg(traces)
    else:
        traces = list(traces)
        if not traces or not any(len(t.records) for t in traces):
            raise InputError("nothing to plot: empty trace set")
        labels = list(labels) if labels is not None else [f"run {j + 1}" for j in range(len(traces))]
        if len(labels) != len(traces):
            raise InputError("need one label per trace")
        svg = _trace_svg(traces, kind, labels)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return path


def _trace_svg(traces, kind, labels):
    series = []
    for j, (tr, label) in enumerate(zip(traces, labels)):
        xs = [r.cost for r in tr.records]
        color = PALETTE[j % len(PALETTE)]
        if kind == "omega-vs-cost":
            series.append((label, color, "", xs, [_omega(r) for r in tr.records]))
        else:
            for i in range(tr.q):
                name = f"{label} N{i + 1}" if tr.q > 1 else label
                series.append((name, color, DASHES[i % len(DASHES)], xs, [r.sizes[i] for r in tr.records]))
    all_x = np.concatenate([np.asarray(s[3], dtype=float) for s in series if s[3]])
    all_y = np.concatenate([np.asarray(s[4], dtype=float) for s in series if s[4]])
    log_y = kind == "omega-vs-cost"
    ax = _Axes(all_x, all_y, log_y=log_y)
    parts = _frame(ax, "scalar products", "omega" if log_y else "sample size")
    for label, color, dash, xs, ys in series:
        if xs:
            parts.append(_polyline(ax, xs, ys, color, dash))
    _legend(parts, [(s[0], s[1], s[2]) for s in series])
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _front_svg(front):
    F = front.objectives() if hasattr(front, "objectives") else np.asarray(front, dtype=float)
    if F.ndim != 2 or len(F) == 0:
        raise InputError("nothing to plot: empty front")
    if F.shape[1] != 2:
        raise InputError("front plots need exactly two objectives")
    ax = _Axes(F[:, 0], F[:, 1])
    parts = _frame(ax, "f1", "f2")
    for f1, f2 in F:
        parts.append(f'<circle cx="{ax.px(f1):.2f}" cy="{ax.py(f2):.2f}" r="2.5" fill="{PALETTE[0]}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
