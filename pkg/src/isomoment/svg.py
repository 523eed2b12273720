"""Minimal SVG writer for scatter plots and polylines."""

import math

__all__ = ["scatter_svg"]


def _fmt(v):
    return f"{v:.2f}"


def _ticks(lo, hi, count=5):
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def scatter_svg(x, y, title="", xlabel="", ylabel="", line=None, width=480, height=360, highlight=None):
    """Return an SVG document with circles at ``(x, y)``.

    ``line`` is an optional list of ``(x, y)`` pairs drawn as a polyline and
    ``highlight`` a set of point indices drawn in red.  Non-finite points are
    skipped.  Output depends only on the inputs.
    """
    hl = set(highlight or ())
    keep = [(float(a), float(b), i in hl) for i, (a, b) in enumerate(zip(x, y))]
    keep = [p for p in keep if math.isfinite(p[0]) and math.isfinite(p[1])]
    pts = [p[:2] for p in keep]
    extra = [(float(a), float(b)) for a, b in (line or [])]
    allp = pts + extra
    if allp:
        x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
        y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    ml, mr, mt, mb = 70, 20, 30, 45
    pw, ph = width - ml - mr, height - mt - mb

    def sx(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return mt + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<text x="{_fmt(sx(t))}" y="{height - mb + 15}" font-size="10" '
                   f'text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{ml - 5}" y="{_fmt(sy(t) + 3)}" font-size="10" '
                   f'text-anchor="end">{t:.3g}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{ml}" y1="{_fmt(sy(0))}" x2="{ml + pw}" y2="{_fmt(sy(0))}" '
                   'stroke="gray" stroke-dasharray="4 3"/>')
    if extra:
        path = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in extra)
        out.append(f'<polyline points="{path}" fill="none" stroke="steelblue"/>')
    for a, b, hot in keep:
        color = "crimson" if hot else "black"
        out.append(f'<circle cx="{_fmt(sx(a))}" cy="{_fmt(sy(b))}" r="2" fill="{color}"/>')
    if title:
        out.append(f'<text x="{width / 2}" y="18" font-size="13" text-anchor="middle">{_escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{ml + pw / 2}" y="{height - 8}" font-size="11" '
                   f'text-anchor="middle">{_escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{mt + ph / 2}" font-size="11" text-anchor="middle" '
                   f'transform="rotate(-90 14 {mt + ph / 2})">{_escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
