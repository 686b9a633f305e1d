"""Deterministic SVG rendering of curves, caustics, shift paths and zeros.

The output is plain SVG 1.1 text assembled with fixed float formatting, so
two runs over the same data produce byte-identical files.  Critical curves
are solid polylines, caustics and shift paths dashed ones; zeros are drawn
as up triangles (sense-preserving), down triangles (sense-reversing) and
crosses (singular), poles as squares.  Every marker carries a class
attribute naming its record type so a census can be checked against the
figure by counting substrings.
"""

from __future__ import annotations

import numpy as np

__all__ = ["render_svg"]

_CURVE_COLOR = "#1a5fb4"
_CAUSTIC_COLOR = "#c01c28"
_PATH_COLOR = "#5e5c64"
_PRESERVING_COLOR = "#26a269"
_REVERSING_COLOR = "#e66100"
_SINGULAR_COLOR = "#813d9c"
_POLE_COLOR = "#241f31"

_MARK = 6.0          # marker half size in pixels
_WIDTH = 720.0       # canvas width in pixels


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _extent(chunks) -> tuple[float, float, float, float]:
    xs_lo = ys_lo = np.inf
    xs_hi = ys_hi = -np.inf
    for pts in chunks:
        if len(pts) == 0:
            continue
        pts = np.asarray(pts, dtype=complex)
        xs_lo = min(xs_lo, float(pts.real.min()))
        xs_hi = max(xs_hi, float(pts.real.max()))
        ys_lo = min(ys_lo, float(pts.imag.min()))
        ys_hi = max(ys_hi, float(pts.imag.max()))
    if not np.isfinite([xs_lo, xs_hi, ys_lo, ys_hi]).all():
        return -1.0, 1.0, -1.0, 1.0
    if xs_hi - xs_lo < 1e-12:
        xs_lo, xs_hi = xs_lo - 0.5, xs_hi + 0.5
    if ys_hi - ys_lo < 1e-12:
        ys_lo, ys_hi = ys_lo - 0.5, ys_hi + 0.5
    return xs_lo, xs_hi, ys_lo, ys_hi


class _Canvas:
    """Data-to-pixel transform with the y axis flipped for SVG."""

    def __init__(self, x0, x1, y0, y1):
        mx = 0.10 * (x1 - x0)
        my = 0.10 * (y1 - y0)
        self.x0, self.x1 = x0 - mx, x1 + mx
        self.y0, self.y1 = y0 - my, y1 + my
        self.w = _WIDTH
        self.h = _WIDTH * (self.y1 - self.y0) / (self.x1 - self.x0)

    def px(self, z: complex) -> tuple[float, float]:
        x = (z.real - self.x0) / (self.x1 - self.x0) * self.w
        y = (self.y1 - z.imag) / (self.y1 - self.y0) * self.h
        return x, y

    def points_attr(self, pts) -> str:
        out = []
        for z in np.asarray(pts, dtype=complex):
            x, y = self.px(complex(z))
            out.append(f"{_fmt(x)},{_fmt(y)}")
        return " ".join(out)


def _polyline(canvas, pts, color, cls, dashed=False, width=1.5) -> str:
    dash = ' stroke-dasharray="6 4"' if dashed else ""
    return (f'<polyline class="{cls}" points="{canvas.points_attr(pts)}" '
            f'fill="none" stroke="{color}" stroke-width="{_fmt(width)}"{dash}/>')


def _triangle(canvas, z, color, cls, up: bool) -> str:
    x, y = canvas.px(complex(z))
    s = _MARK
    if up:
        pts = [(x, y - s), (x - s, y + s), (x + s, y + s)]
    else:
        pts = [(x, y + s), (x - s, y - s), (x + s, y - s)]
    body = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts)
    return f'<polygon class="{cls}" points="{body}" fill="{color}"/>'


def _square(canvas, z, color, cls) -> str:
    x, y = canvas.px(complex(z))
    s = _MARK * 0.9
    return (f'<rect class="{cls}" x="{_fmt(x - s)}" y="{_fmt(y - s)}" '
            f'width="{_fmt(2 * s)}" height="{_fmt(2 * s)}" fill="{color}"/>')


def _cross(canvas, z, color, cls) -> str:
    x, y = canvas.px(complex(z))
    s = _MARK
    return (f'<path class="{cls}" d="M {_fmt(x - s)} {_fmt(y - s)} L {_fmt(x + s)} '
            f'{_fmt(y + s)} M {_fmt(x - s)} {_fmt(y + s)} L {_fmt(x + s)} '
            f'{_fmt(y - s)}" stroke="{color}" stroke-width="2.5" fill="none"/>')


def render_svg(curves=(), caustics=(), paths=(), zeros=(), poles=(),
               extra_points=()) -> str:
    """Assemble one SVG figure from geometry and census pieces.

    curves: iterables with a .z polyline (or bare arrays); caustics: same
    with .w; paths: bare complex polylines; zeros: records with .z and
    .orientation; poles: records with .z or bare complex values.  The
    viewBox covers the union of everything plus a 10 percent margin.
    """
    curve_pts = [np.asarray(getattr(c, "z", c), dtype=complex) for c in curves]
    caustic_pts = [np.asarray(getattr(c, "w", c), dtype=complex) for c in caustics]
    path_pts = [np.asarray(p, dtype=complex) for p in paths]
    zero_pts = [complex(getattr(rec, "z")) for rec in zeros]
    pole_pts = [complex(getattr(p, "z", p)) for p in poles]
    other = [complex(z) for z in extra_points]

    canvas = _Canvas(*_extent(
        curve_pts + caustic_pts + path_pts
        + [np.asarray(zero_pts + pole_pts + other, dtype=complex)]
    ))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {_fmt(canvas.w)} {_fmt(canvas.h)}" '
        f'width="{_fmt(canvas.w)}" height="{_fmt(canvas.h)}">',
        f'<rect width="{_fmt(canvas.w)}" height="{_fmt(canvas.h)}" fill="#ffffff"/>',
    ]
    for pts in curve_pts:
        parts.append(_polyline(canvas, pts, _CURVE_COLOR, "critical-curve"))
    for pts in caustic_pts:
        parts.append(_polyline(canvas, pts, _CAUSTIC_COLOR, "caustic", dashed=True))
    for pts in path_pts:
        parts.append(_polyline(canvas, pts, _PATH_COLOR, "shift-path", dashed=True, width=1.2))
    for z in pole_pts:
        parts.append(_square(canvas, z, _POLE_COLOR, "pole"))
    for rec in zeros:
        z = complex(rec.z)
        if rec.orientation == "preserving":
            parts.append(_triangle(canvas, z, _PRESERVING_COLOR, "zero-preserving", up=True))
        elif rec.orientation == "reversing":
            parts.append(_triangle(canvas, z, _REVERSING_COLOR, "zero-reversing", up=False))
        else:
            parts.append(_cross(canvas, z, _SINGULAR_COLOR, "zero-singular"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
