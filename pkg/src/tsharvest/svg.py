"""Minimal SVG rendering: line/scatter charts and colour-mapped heatmaps.

Output is deterministic text; an optional timestamp goes into a <metadata>
element so it can be suppressed for byte-identical reruns.
"""

import math
from html import escape

import numpy as np

WIDTH, HEIGHT = 720, 480
MARGIN = dict(left=80, right=160, top=50, bottom=60)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b")

# viridis anchors, interpolated linearly
_VIRIDIS = np.array([
    [68, 1, 84], [72, 40, 120], [62, 74, 137], [49, 104, 142], [38, 130, 142],
    [31, 158, 137], [53, 183, 121], [109, 205, 89], [180, 222, 44], [253, 231, 37],
], dtype=float)



def nice_ticks(lo, hi, n=6):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0]
    if hi == lo:
        return [lo]
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _tick_label(v):
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.6g}"


def colormap(t):
    t = min(max(float(t), 0.0), 1.0) * (len(_VIRIDIS) - 1)
    i = min(int(t), len(_VIRIDIS) - 2)
    c = _VIRIDIS[i] + (t - i) * (_VIRIDIS[i + 1] - _VIRIDIS[i])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


class _Frame:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1.0
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def _header(title, timestamp):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
    ]
    if timestamp:
        parts.append(f"<metadata>generated {escape(timestamp)}</metadata>")
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    parts.append(f'<text x="{WIDTH / 2 - MARGIN["right"] / 2:.1f}" y="28" text-anchor="middle" '
                 f'font-size="15">{escape(title)}</text>')
    return parts


def _axes(frame, xlabel, ylabel):
    out = [f'<rect x="{frame.left}" y="{frame.top}" width="{frame.right - frame.left}" '
           f'height="{frame.bottom - frame.top}" fill="none" stroke="black"/>']
    for t in nice_ticks(frame.x0, frame.x1):
        x = frame.px(t)
        out.append(f'<line x1="{x:.2f}" y1="{frame.bottom}" x2="{x:.2f}" y2="{frame.bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{frame.bottom + 18}" text-anchor="middle">{_tick_label(t)}</text>')
    for t in nice_ticks(frame.y0, frame.y1):
        y = frame.py(t)
        out.append(f'<line x1="{frame.left - 5}" y1="{y:.2f}" x2="{frame.left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{frame.left - 8}" y="{y + 4:.2f}" text-anchor="end">{_tick_label(t)}</text>')
    cx = (frame.left + frame.right) / 2
    cy = (frame.top + frame.bottom) / 2
    out.append(f'<text x="{cx:.1f}" y="{HEIGHT - 18}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="20" y="{cy:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {cy:.1f})">{escape(ylabel)}</text>')
    return out


def _limits(values, pad=0.05):
    values = np.asarray([v for v in values if v is not None and math.isfinite(v)])
    if values.size == 0:
        return 0.0, 1.0
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo or (abs(hi) or 1.0)
    return lo - pad * span, hi + pad * span


def line_chart(series, title, xlabel, ylabel, timestamp=None, xlim=None, ylim=None, max_points=4000):
    """``series``: dicts with keys x, y, label and optional kind ('line'/'scatter'), color."""
    xs = [v for s in series for v in np.asarray(s["x"], dtype=float)]
    ys = [v for s in series for v in np.asarray(s["y"], dtype=float)]
    frame = _Frame(xlim or _limits(xs, 0.0), ylim or _limits(ys))
    out = _header(title, timestamp)
    out += _axes(frame, xlabel, ylabel)
    legend_y = frame.top + 10
    for k, s in enumerate(series):
        color = s.get("color", PALETTE[k % len(PALETTE)])
        x = np.asarray(s["x"], dtype=float)
        y = np.asarray(s["y"], dtype=float)
        if s.get("kind", "line") == "line":
            step = max(1, len(x) // max_points)
            pts = " ".join(f"{frame.px(a):.2f},{frame.py(b):.2f}"
                           for a, b in zip(x[::step], y[::step]) if math.isfinite(b))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>')
        else:
            for a, b in zip(x, y):
                if math.isfinite(b):
                    out.append(f'<circle cx="{frame.px(a):.2f}" cy="{frame.py(b):.2f}" r="4" '
                               f'fill="{color}" stroke="black" stroke-width="0.5"/>')
        lx = frame.right + 12
        out.append(f'<rect x="{lx}" y="{legend_y - 8}" width="14" height="8" fill="{color}"/>')
        out.append(f'<text x="{lx + 20}" y="{legend_y}">{escape(str(s.get("label", "")))}</text>')
        legend_y += 18
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap(matrix, x_values, y_values, title, xlabel, ylabel, bar_label="", timestamp=None,
            xlim=None, ylim=None):
    """``matrix[i, j]`` is drawn at (x_values[j], y_values[i]); NaN cells are grey.

    Cells are clipped to ``xlim``/``ylim`` when given (default: the cell extent).
    """
    matrix = np.asarray(matrix, dtype=float)
    x_values = np.asarray(x_values, dtype=float)
    y_values = np.asarray(y_values, dtype=float)

    def edges(v):
        if len(v) == 1:
            return np.array([v[0] - 0.5, v[0] + 0.5])
        mid = 0.5 * (v[1:] + v[:-1])
        return np.concatenate([[2 * v[0] - mid[0]], mid, [2 * v[-1] - mid[-1]]])

    ex, ey = edges(x_values), edges(y_values)
    xlim = xlim or (ex[0], ex[-1])
    ylim = ylim or (ey[0], ey[-1])
    ex, ey = np.clip(ex, *xlim), np.clip(ey, *ylim)
    frame = _Frame(xlim, ylim)
    finite = matrix[np.isfinite(matrix)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = hi - lo or 1.0
    out = _header(title, timestamp)
    for i in range(matrix.shape[0]):
        for j in range(matrix.shape[1]):
            v = matrix[i, j]
            fill = colormap((v - lo) / span) if math.isfinite(v) else "#bbbbbb"
            x, x2 = frame.px(ex[j]), frame.px(ex[j + 1])
            y, y2 = frame.py(ey[i + 1]), frame.py(ey[i])
            out.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{x2 - x + 0.3:.2f}" '
                       f'height="{y2 - y + 0.3:.2f}" fill="{fill}"/>')
    out += _axes(frame, xlabel, ylabel)
    bx = frame.right + 30
    n = 50
    h = (frame.bottom - frame.top) / n
    for k in range(n):
        out.append(f'<rect x="{bx}" y="{frame.bottom - (k + 1) * h:.2f}" width="18" '
                   f'height="{h + 0.3:.2f}" fill="{colormap((k + 0.5) / n)}"/>')
    for t in nice_ticks(lo, hi, 5):
        y = frame.bottom - (t - lo) / span * (frame.bottom - frame.top)
        out.append(f'<text x="{bx + 24}" y="{y + 4:.2f}">{_tick_label(t)}</text>')
    out.append(f'<text x="{bx}" y="{frame.top - 10}">{escape(bar_label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
