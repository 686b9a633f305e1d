"""Planar polyline primitives shared by the curve, caustic and census code.

Polylines are numpy arrays of complex vertices.  Closed polylines store the
first vertex again at the end, so segment k runs from pts[k] to pts[k+1].
"""

from __future__ import annotations

import numpy as np


def as_closed(pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=complex)
    if pts.size < 2:
        raise ValueError("polyline needs at least two vertices")
    if pts[0] != pts[-1]:
        pts = np.concatenate([pts, pts[:1]])
    return pts


def bbox(pts: np.ndarray) -> tuple[float, float, float, float]:
    """(xmin, xmax, ymin, ymax) of a vertex array."""
    x, y = pts.real, pts.imag
    return float(x.min()), float(x.max()), float(y.min()), float(y.max())


def polyline_lengths(pts: np.ndarray) -> np.ndarray:
    """Per-segment lengths."""
    return np.abs(np.diff(pts))


def arclengths(pts: np.ndarray) -> np.ndarray:
    """Cumulative arclength at each vertex, starting at 0."""
    out = np.empty(len(pts))
    out[0] = 0.0
    np.cumsum(np.abs(np.diff(pts)), out=out[1:])
    return out


def point_in_polygon(z, pts: np.ndarray) -> np.ndarray:
    """Even-odd inclusion of query points against a closed polyline.

    Ray-crossing parity with the horizontal ray to +infinity; points on the
    boundary are not meaningful here and must be screened with a distance
    band by the caller.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    x, y = z.real[:, None], z.imag[:, None]
    ax, ay = pts.real[None, :-1], pts.imag[None, :-1]
    bx, by = pts.real[None, 1:], pts.imag[None, 1:]
    straddles = (ay > y) != (by > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = ax + (y - ay) * (bx - ax) / (by - ay)
    hits = straddles & (xs > x)
    return (hits.sum(axis=1) % 2).astype(bool)


def point_segment_distance(z, pts: np.ndarray) -> np.ndarray:
    """Min distance from each query point to a polyline's segments."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a = pts[:-1][None, :]
    d = np.diff(pts)[None, :]
    dd = (d * d.conj()).real
    dd = np.where(dd == 0.0, 1.0, dd)
    t = ((z[:, None] - a) * d.conj()).real / dd
    t = np.clip(t, 0.0, 1.0)
    proj = a + t * d
    return np.abs(z[:, None] - proj).min(axis=1)


def segment_intersection(a0: complex, a1: complex, b0: complex, b1: complex):
    """Proper intersection of segments [a0,a1] and [b0,b1].

    Returns (t, u, point) with t,u in [0,1) half-open in u to avoid double
    counting at shared polyline vertices, or None.  Parallel segments report
    None; grazing contacts are the caller's concern.
    """
    da = a1 - a0
    db = b1 - b0
    denom = (da * db.conj()).imag  # cross(da, db) with sign flipped
    if denom == 0.0:
        return None
    w = b0 - a0
    t = (w * db.conj()).imag / denom
    u = (w * da.conj()).imag / denom
    if 0.0 <= t <= 1.0 and 0.0 <= u < 1.0:
        return t, u, a0 + t * da
    return None


def segments_intersect_any(pts: np.ndarray, skip_adjacent: bool = True) -> bool:
    """Whether any two non-adjacent segments of one closed polyline cross.

    Bucketed sweep: segments are binned on a uniform grid sized by the
    longest segment so only nearby pairs are tested.
    """
    n = len(pts) - 1
    if n < 4:
        return False
    a = pts[:-1]
    b = pts[1:]
    seglen = np.abs(b - a)
    cell = max(seglen.max(), 1e-300) * 1.01
    mx = np.minimum(a.real, b.real)
    my = np.minimum(a.imag, b.imag)
    ix = np.floor(mx / cell).astype(np.int64)
    iy = np.floor(my / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for k in range(n):
        buckets.setdefault((ix[k], iy[k]), []).append(k)
    eps = 1e-12 * max(cell, 1.0)
    for k in range(n):
        cands: list[int] = []
        for dx_ in (-1, 0, 1):
            for dy_ in (-1, 0, 1):
                cands.extend(buckets.get((ix[k] + dx_, iy[k] + dy_), ()))
        for m in cands:
            if m <= k:
                continue
            if skip_adjacent and (m == k + 1 or (k == 0 and m == n - 1)):
                continue
            hit = segment_intersection(a[k], b[k], a[m], b[m])
            if hit is None:
                continue
            t, u, _ = hit
            # endpoint touches within roundoff of a shared vertex are not crossings
            if min(t, 1 - t) * seglen[k] < eps and min(u, 1 - u) * seglen[m] < eps:
                continue
            return True
    return False


def circle(center: complex, radius: float, n: int = 512) -> np.ndarray:
    """Closed polyline approximating a circle, counterclockwise."""
    ang = np.linspace(0.0, 2.0 * np.pi, n + 1)
    return center + radius * np.exp(1j * ang)


def min_polyline_gap(pts_a: np.ndarray, pts_b: np.ndarray) -> float:
    """Min distance between two polylines (vertex-to-segment, both ways)."""
    chunk = 2048
    best = np.inf
    for pts, other in ((pts_a, pts_b), (pts_b, pts_a)):
        for k in range(0, len(pts), chunk):
            d = point_segment_distance(pts[k:k + chunk], other)
            best = min(best, float(d.min()))
    return best
