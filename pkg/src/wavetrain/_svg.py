"""Minimal deterministic SVG line plots.

No external plotting dependency: output is a plain polyline chart with
nice-number axis ticks. Rendering the same data twice gives
byte-identical files, which keeps plots diffable and testable.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")

_W, _H = 720, 440
_ML, _MR, _MT, _MB = 64, 16, 34, 46


def _nice_ticks(lo: float, hi: float, target: int = 6):
    """Round tick positions covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        lo, hi = 0.0, 1.0
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if span / step <= target:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e5 or abs(v) < 1e-3:
        return "%.2e" % v
    s = "%.6g" % v
    return s


def line_plot(x, series, labels, title: str, xlabel: str, ylabel: str,
              log_y: bool = False) -> str:
    """Render one or more curves sharing an x axis into an SVG string.

    series is a list of y arrays; labels names them in the legend.
    log_y plots log10 of clipped positive values (for spectra).
    """
    x = np.asarray(x, float)
    curves = []
    for y in series:
        y = np.asarray(y, float)
        if log_y:
            y = np.log10(np.maximum(y, 1e-300))
        curves.append(y)
    finite = [c[np.isfinite(c)] for c in curves]
    ys = np.concatenate([f for f in finite if len(f)]) if any(
        len(f) for f in finite) else np.array([0.0, 1.0])
    x_lo, x_hi = float(np.min(x)), float(np.max(x))
    y_lo, y_hi = float(np.min(ys)), float(np.max(ys))
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0

    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def sx(v):
        return _ML + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return _MT + (y_hi - v) / (y_hi - y_lo) * ph

    out = []
    out.append('<svg xmlns="http://www.w3.org/2000/svg" width="%d" '
               'height="%d" viewBox="0 0 %d %d">' % (_W, _H, _W, _H))
    out.append('<rect width="%d" height="%d" fill="white"/>' % (_W, _H))
    out.append('<text x="%d" y="22" font-family="sans-serif" font-size="15" '
               'text-anchor="middle">%s</text>' % (_W // 2, escape(title)))
    for t in _nice_ticks(x_lo, x_hi):
        px = sx(t)
        out.append('<line x1="%.2f" y1="%d" x2="%.2f" y2="%d" '
                   'stroke="#dddddd"/>' % (px, _MT, px, _MT + ph))
        out.append('<text x="%.2f" y="%d" font-family="sans-serif" '
                   'font-size="11" text-anchor="middle">%s</text>'
                   % (px, _MT + ph + 16, escape(_fmt(t))))
    for t in _nice_ticks(y_lo, y_hi):
        py = sy(t)
        out.append('<line x1="%d" y1="%.2f" x2="%d" y2="%.2f" '
                   'stroke="#dddddd"/>' % (_ML, py, _ML + pw, py))
        out.append('<text x="%d" y="%.2f" font-family="sans-serif" '
                   'font-size="11" text-anchor="end">%s</text>'
                   % (_ML - 6, py + 4, escape(_fmt(t))))
    out.append('<rect x="%d" y="%d" width="%d" height="%d" fill="none" '
               'stroke="#333333"/>' % (_ML, _MT, pw, ph))
    for i, y in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        mask = np.isfinite(y)
        pts = " ".join("%.2f,%.2f" % (sx(xv), sy(yv))
                       for xv, yv in zip(x[mask], y[mask]))
        out.append('<polyline points="%s" fill="none" stroke="%s" '
                   'stroke-width="1.2"/>' % (pts, color))
    if len(curves) > 1 or (labels and labels[0]):
        for i, lab in enumerate(labels):
            lx = _ML + pw - 90
            ly = _MT + 14 + 16 * i
            out.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" '
                       'stroke-width="2"/>' % (lx, ly - 4, lx + 18, ly - 4,
                                               PALETTE[i % len(PALETTE)]))
            out.append('<text x="%d" y="%d" font-family="sans-serif" '
                       'font-size="11">%s</text>' % (lx + 22, ly,
                                                     escape(lab)))
    ylab = escape(ylabel) + (" (log10)" if log_y else "")
    out.append('<text x="%d" y="%d" font-family="sans-serif" font-size="12" '
               'text-anchor="middle">%s</text>'
               % (_W // 2, _H - 10, escape(xlabel)))
    out.append('<text x="16" y="%d" font-family="sans-serif" font-size="12" '
               'text-anchor="middle" transform="rotate(-90 16 %d)">%s</text>'
               % (_MT + ph // 2, _MT + ph // 2, ylab))
    out.append('</svg>')
    return "\n".join(out) + "\n"
