"""Caustics (critical values), local fold/cusp models and path crossings.

The caustic of f(z) = r(z) - conj(z) is the image f(C) of the critical set.
Near a critical point z0 with r'(z0) = e^(i phi), the substitutions
z = z0 + e^(-i phi/2) u and G = e^(-i phi/2) (f - f(z0)) normalize f to

    G(u) = u - conj(u) + d u^2 + O(u^3),    d = r''(z0) / (2 r'(z0)^(3/2)),

so the quadratic model T(u) = d u^2 + u - conj(u) controls how zeros react
to shifts across the caustic.  Re(d) != 0 marks a fold, Re(d) = 0 a cusp;
d is defined up to the sign of the square root branch, but the image-plane
direction e^(-i phi) r''(z0) / 2 of "two more zeros" is branch-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _geom
from .algebra import RationalFn
from .config import DEFAULT_TOL, TAU, Tolerances
from .critical import CriticalCurve, RegionPartition, _branch_refine
from .errors import CrossingError, DegenerateCriticalError

__all__ = [
    "CuspPoint",
    "Caustic",
    "LocalModel",
    "CrossingEvent",
    "map_caustic",
    "map_caustics",
    "classify_point",
    "local_model",
    "tmodel_zeros",
    "path_crossings",
    "caustics_to_csv",
]


@dataclass(frozen=True)
class LocalModel:
    """Normalized quadratic data of f at a critical point."""

    z0: complex
    phi: float                # r'(z0) = e^(i phi), phi in [0, 2 pi)
    d: complex                # r''(z0) / (2 r'(z0)^(3/2)) on the chosen branch
    kind: str                 # "fold" or "cusp"
    # eta-plane direction r''(z0) / (2 r'(z0)) toward the side of the caustic
    # with two more zeros per preimage; unlike d it does not depend on the
    # square root branch.
    image_shift_direction: complex = 0j
    frame: str = field(default="z = z0 + exp(-i*phi/2)*u; G = exp(-i*phi/2)*(f - f(z0))")

    @property
    def sign_im_dinv(self) -> int:
        v = (1.0 / self.d).imag
        return (v > 0) - (v < 0)


@dataclass(frozen=True)
class CuspPoint:
    curve_id: int
    index: int           # vertex index into the source curve / caustic polyline
    z: complex
    w: complex
    theta: float
    model: LocalModel


@dataclass
class Caustic:
    caustic_id: int      # equals the source curve_id
    source: CriticalCurve
    w: np.ndarray        # image polyline, same indexing as source.z
    cusp_points: list[CuspPoint]
    arclen: np.ndarray   # cumulative arclength at each vertex

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return _geom.bbox(self.w)

    def __len__(self) -> int:
        return len(self.w)


def local_model(r: RationalFn, z0: complex, theta: float | None = None,
                tol: Tolerances = DEFAULT_TOL) -> LocalModel:
    """Quadratic model at a critical point; theta fixes the sqrt branch."""
    d1 = r.deriv1(z0)
    d2 = r.deriv2(z0)
    if d2 == 0:
        raise DegenerateCriticalError(f"r'' = 0 at {z0}")
    if theta is None:
        theta = float(np.angle(d1)) % TAU
    d = complex(d2 * np.exp(-1.5j * theta) / 2.0)
    cusp = abs(d.real) * 2.0 <= tol.cusp * (1.0 + abs(d2))
    shift_dir = complex(d2 * np.exp(-1j * theta) / 2.0)
    if cusp:
        # at a cusp the quadratic term alone does not decide which side of
        # the caustic gains zeros: the horn opens along the caustic tangent
        # 3i(Re c3 + (Im d)^2)/Im d at the tip, so the cubic term can flip
        # the gaining side to the opposite of the quadratic direction
        c3 = complex(r.deriv3(z0) * np.exp(-2j * theta) / 6.0)
        if c3.real + d.imag * d.imag < 0:
            shift_dir = -shift_dir
    return LocalModel(z0=complex(z0), phi=float(theta % TAU), d=d,
                      kind="cusp" if cusp else "fold",
                      image_shift_direction=shift_dir)


def map_caustic(r: RationalFn, curve: CriticalCurve,
                tol: Tolerances = DEFAULT_TOL) -> Caustic:
    """Image of one critical curve under f(z) = r(z) - conj(z)."""
    w = r.eval_many(curve.z) - np.conj(curve.z)
    cusps = [
        CuspPoint(
            curve_id=curve.curve_id,
            index=int(i),
            z=complex(curve.z[i]),
            w=complex(w[i]),
            theta=float(curve.theta[i]),
            model=local_model(r, complex(curve.z[i]), float(curve.theta[i]), tol),
        )
        for i in curve.cusp_indices
    ]
    return Caustic(curve.curve_id, curve, w, cusps, _geom.arclengths(w))


def map_caustics(r: RationalFn, curves: list[CriticalCurve],
                 tol: Tolerances = DEFAULT_TOL) -> list[Caustic]:
    return [map_caustic(r, c, tol) for c in curves]


def _preimage_refine(r: RationalFn, theta: float, z: complex, w_target: complex,
                     steps: int = 4) -> tuple[complex, float]:
    """Slide along the critical curve (parametrized by theta) to minimize
    |f(z(theta)) - w_target|; stalls harmlessly at cusps where dF/dtheta -> 0."""
    th, zz = float(theta), complex(z)
    for _ in range(steps):
        d1 = r.deriv1(zz)
        d2 = r.deriv2(zz)
        if d2 == 0:
            break
        zdot = 1j * np.exp(1j * th) / d2
        F = r.eval(zz) - np.conj(zz) - w_target
        Fdot = d1 * zdot - np.conj(zdot)
        denom = (Fdot * np.conj(Fdot)).real
        if denom < 1e-30:
            break
        dth = -((np.conj(F) * Fdot).real) / denom
        if not math.isfinite(dth):
            break
        th += float(np.clip(dth, -0.05, 0.05))
        zz = complex(_branch_refine(r, np.array([zz]), np.array([np.exp(1j * th)]), steps=6)[0])
    return zz, th


def find_preimages(r: RationalFn, caustics: list[Caustic], w_star: complex,
                   tol: Tolerances = DEFAULT_TOL) -> list[LocalModel]:
    """All critical points mapping to w_star, one per local caustic arc.

    Multiple entries indicate a multiple fold point (a caustic
    self-intersection in the generic case), where a crossing changes the
    zero count by 2 per entry.
    """
    out: list[LocalModel] = []
    for ca in caustics:
        d = np.abs(ca.w - w_star)
        seg = np.abs(np.diff(ca.w))
        loc = np.maximum(np.concatenate([seg[:1], seg]), np.concatenate([seg, seg[-1:]]))
        near = d <= np.maximum(6.0 * loc, 1e-9 * (1.0 + abs(w_star)))
        if not near.any():
            continue
        idx = np.nonzero(near)[0]
        runs = np.split(idx, np.nonzero(np.diff(idx) > 1)[0] + 1)
        # the polyline is closed: merge a run ending at the last vertex with
        # one starting at the first
        if len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == len(ca.w) - 1:
            runs[0] = np.concatenate([runs[-1], runs[0]])
            runs.pop()
        for run in runs:
            k = run[np.argmin(d[run])]
            z, th = _preimage_refine(r, float(ca.source.theta[k]), complex(ca.source.z[k]), w_star)
            # an arc that merely passes close (the far side of a cusp, a
            # near self-intersection) refines to its closest approach, not
            # to w_star; a genuine preimage lands at rounding level
            if abs(r.eval(z) - np.conj(z) - w_star) > 1e-6 * (1.0 + abs(w_star)):
                continue
            out.append(local_model(r, z, th, tol))
    return out


def classify_point(r: RationalFn, z0: complex, theta: float | None = None,
                   caustics: list[Caustic] | None = None,
                   tol: Tolerances = DEFAULT_TOL):
    """Local model at z0 plus every other critical preimage of f(z0).

    Returns (model, preimages); preimages includes z0's own model and is a
    singleton unless f(z0) is a multiple fold point.  Requires caustics for
    the multiplicity search; without them only the local model is reported.
    """
    model = local_model(r, z0, theta, tol)
    if caustics is None:
        return model, [model]
    w_star = r.eval(z0) - np.conj(z0)
    pre = find_preimages(r, caustics, complex(w_star), tol)
    if not any(abs(m.z0 - model.z0) < 1e-6 * (1 + abs(model.z0)) for m in pre):
        pre.append(model)
    return model, pre


def tmodel_zeros(d: complex, delta: float) -> tuple[list[complex], list[complex]]:
    """Exact zeros of T(z) = d z^2 + z - conj(z) - delta*d for real delta.

    Returns (real_zeros, nonreal_zeros).  Writing z = x + i y and
    1/d = alpha + i beta, the system splits into y (y + 2 beta) = x^2 - delta
    with x = -alpha on the non-real branch, giving y = -beta +- sqrt(beta^2
    + alpha^2 - delta); candidates with y = 0 merge into the real zeros
    (the boundary case alpha^2 = delta).  Every non-real zero keeps
    |z| >= |alpha|, so for folds the non-real zeros stay away from 0.
    """
    d = complex(d)
    delta = float(delta)
    if d == 0:
        raise DegenerateCriticalError("tmodel requires d != 0")
    real: list[complex] = []
    if delta == 0.0:
        real = [0j]
    elif delta > 0.0:
        s = math.sqrt(delta)
        real = [complex(s, 0.0), complex(-s, 0.0)]
    dinv = 1.0 / d
    alpha, beta = dinv.real, dinv.imag
    disc = beta * beta + alpha * alpha - delta
    nonreal: list[complex] = []
    if disc >= 0.0:
        s = math.sqrt(disc)
        yscale = abs(beta) + s + 1e-300
        for y in (-beta + s, -beta - s):
            if abs(y) > 1e-13 * yscale:
                nonreal.append(complex(-alpha, y))
    return real, nonreal


@dataclass(frozen=True)
class PredictedDelta:
    dn: int
    dn_plus: int
    dn_minus: int
    per_face: dict
    sign_im_dinv: int | None = None


@dataclass
class CrossingEvent:
    path_seg: int
    t: float                 # fraction along the path segment
    w: complex
    caustic_id: int
    caustic_seg: int
    kind: str                # "fold" or "cusp"
    direction: int           # +1 toward the two-more-zeros side of the local model
    reliable: bool
    preimages: list[LocalModel]
    predicted: PredictedDelta
    observed: dict | None = None
    verdict: str | None = None

    @property
    def order_key(self):
        return (self.path_seg, self.t)


def _adjacent_faces(partition: RegionPartition, model: LocalModel):
    """(plus_face, minus_face) next to the critical point, by orientation."""
    curve = None
    for c in partition.curves:
        if float(_geom.point_segment_distance(np.array([model.z0]), c.z)[0]) < 1e-5 * (1 + abs(model.z0)):
            curve = c
            break
    if curve is None:
        return None, None
    k = int(np.argmin(np.abs(curve.z - model.z0)))
    k = min(k, len(curve.z) - 2)
    t = curve.z[k + 1] - curve.z[k]
    if t == 0:
        return None, None
    nrm = 1j * t / abs(t)
    diam = max(1e-3, float(np.abs(np.diff(curve.z)).max()) * 3)
    for eps in (0.05 * diam, 0.2 * diam, diam):
        fa = partition.face_of(model.z0 + eps * nrm)
        fb = partition.face_of(model.z0 - eps * nrm)
        if fa is not None and fb is not None and fa.orientation != fb.orientation:
            return (fa, fb) if fa.orientation > 0 else (fb, fa)
    return None, None


def path_crossings(caustics: list[Caustic], path, r: RationalFn | None = None,
                   partition: RegionPartition | None = None,
                   tol: Tolerances = DEFAULT_TOL) -> list[CrossingEvent]:
    """Transversal intersections of a shift path with the caustics.

    The path is an open polyline of eta values.  Events come back ordered
    along the path with local models, direction signs and predicted census
    deltas; near-tangential hits are flagged unreliable and near-cusp hits
    are classified as cusp crossings.  Endpoints on a caustic are an error.
    """
    if r is None:
        raise ValueError("path_crossings needs the rational function for local models")
    path = np.asarray(path, dtype=complex)
    if path.ndim != 1 or len(path) < 2:
        raise CrossingError("path must have at least two vertices")
    if np.any(path[1:] == path[:-1]):
        raise CrossingError("path has a zero-length segment")
    for name, pt in (("start", path[0]), ("end", path[-1])):
        for ca in caustics:
            dist = float(_geom.point_segment_distance(np.array([pt]), ca.w)[0])
            if dist < tol.boundary * (1.0 + abs(pt)):
                raise CrossingError(f"path {name} point lies on caustic {ca.caustic_id}")

    events: list[CrossingEvent] = []
    for ps in range(len(path) - 1):
        a0, a1 = path[ps], path[ps + 1]
        da = a1 - a0
        for ca in caustics:
            b0 = ca.w[:-1]
            db = np.diff(ca.w)
            denom = (da * np.conj(db)).imag
            w0 = b0 - a0
            # which side of the path line each caustic vertex falls on,
            # with on-line vertices counted as the plus side; a segment
            # crosses the line iff its endpoints straddle, which charges
            # a crossing through a shared vertex to exactly one segment
            # (the parameter-window test can drop it from both when u
            # rounds to 1.0 on one side and to -eps on the other)
            lever = ((ca.w - a0) * np.conj(da)).imag
            side = np.where(lever >= 0, 1, -1)
            straddle = side[:-1] != side[1:]
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (w0 * np.conj(db)).imag / denom
                u = (w0 * np.conj(da)).imag / denom
            u = np.clip(u, 0.0, 1.0)
            hits = np.nonzero(straddle & (t >= 0) & (t <= 1))[0]
            for k in hits:
                w_star = complex(a0 + t[k] * da)
                sin_angle = abs(denom[k]) / (abs(da) * abs(db[k]) + 1e-300)
                reliable = sin_angle > tol.angular
                arc = ca.arclen[k] + float(u[k]) * abs(db[k])
                kind = "fold"
                near_cusp = None
                for cp in ca.cusp_points:
                    gap = abs(arc - ca.arclen[cp.index])
                    gap = min(gap, ca.arclen[-1] - gap)
                    if gap < tol.near_cusp_arc:
                        kind = "cusp"
                        near_cusp = cp
                        break
                if kind == "cusp":
                    models = [near_cusp.model]
                else:
                    models = find_preimages(r, caustics, w_star, tol)
                    if not models:
                        th = float(ca.source.theta[k])
                        zz, th = _preimage_refine(r, th, complex(ca.source.z[k]), w_star)
                        models = [local_model(r, zz, th, tol)]
                seg_dir = da / abs(da)
                # side test against the caustic tangent: the gaining side
                # is the half-plane (relative to the tangent line) that the
                # shift direction points into, and the sign of the crossing
                # is whether the path exits into that half-plane; projecting
                # the path onto the shift direction alone gives the wrong
                # sign when the shift direction runs close to the tangent
                nu = 1j * db[k] / abs(db[k])
                path_side = (np.conj(nu) * seg_dir).real
                dn = dnp = dnm = 0
                per_face: dict = {}
                signs = []
                for m in models:
                    wd = m.image_shift_direction
                    if kind == "cusp":
                        # at the tip both horn arcs are tangent to the horn
                        # axis, so the tangent test degenerates there; the
                        # shift direction itself separates the sides
                        s = 1 if (np.conj(wd) * seg_dir).real > 0 else -1
                    else:
                        s = 1 if path_side * (np.conj(nu) * wd).real > 0 else -1
                    signs.append(s)
                    dn += 2 * s
                    dnp += s
                    dnm += s
                    if partition is not None:
                        fp, fm = _adjacent_faces(partition, m)
                        if fp is not None:
                            per_face[fp.face_id] = per_face.get(fp.face_id, 0) + s
                            per_face[fm.face_id] = per_face.get(fm.face_id, 0) + s
                direction = signs[0] if signs else 0
                events.append(CrossingEvent(
                    path_seg=ps,
                    t=float(t[k]),
                    w=w_star,
                    caustic_id=ca.caustic_id,
                    caustic_seg=int(k),
                    kind=kind,
                    direction=direction,
                    reliable=bool(reliable),
                    preimages=models,
                    predicted=PredictedDelta(
                        dn=dn, dn_plus=dnp, dn_minus=dnm, per_face=per_face,
                        sign_im_dinv=models[0].sign_im_dinv if kind == "cusp" else None,
                    ),
                ))
    events.sort(key=lambda e: e.order_key)
    # a crossing exactly through a polyline vertex can register on both
    # adjacent segments; collapse such pairs (same caustic, same point on
    # the path, adjacent caustic segments) into one event
    arc = _geom.arclengths(path)
    merged: list[CrossingEvent] = []
    for e in events:
        dup = False
        if merged:
            p = merged[-1]
            pos_p = arc[p.path_seg] + p.t * (arc[p.path_seg + 1] - arc[p.path_seg])
            pos_e = arc[e.path_seg] + e.t * (arc[e.path_seg + 1] - arc[e.path_seg])
            nseg = len(caustics[e.caustic_id].w) - 1 if e.caustic_id < len(caustics) else 0
            for ca in caustics:
                if ca.caustic_id == e.caustic_id:
                    nseg = len(ca.w) - 1
            kgap = abs(p.caustic_seg - e.caustic_seg)
            kgap = min(kgap, nseg - kgap) if nseg else kgap
            dup = (p.caustic_id == e.caustic_id
                   and abs(p.w - e.w) <= 1e-9 * (1.0 + abs(e.w))
                   and abs(pos_p - pos_e) <= 1e-9 * (1.0 + arc[-1])
                   and kgap <= 3)
        if not dup:
            merged.append(e)
    return merged


def caustics_to_csv(caustics: list[Caustic]) -> str:
    """CSV dump: caustic_id,idx,re,im,is_cusp (LF endings)."""
    lines = ["caustic_id,idx,re,im,is_cusp"]
    for ca in caustics:
        cusp_idx = set(cp.index for cp in ca.cusp_points)
        for i, w in enumerate(ca.w):
            lines.append(f"{ca.caustic_id},{i},{float(w.real)!r},"
                         f"{float(w.imag)!r},{int(i in cusp_idx)}")
    return "\n".join(lines) + "\n"
