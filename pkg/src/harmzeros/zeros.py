"""Zero censuses, winding numbers and the argument principle for f_eta.

find_zeros locates every zero of f_eta(z) = r(z) - conj(z) - eta through
the holomorphic elimination polynomial, refines candidates with Newton
steps on the underlying two-real-variable system, and classifies each
accepted zero by the sign of J_f = |r'|^2 - 1.  Zeros sitting on the
critical set (|J_f| below tolerance) get a dedicated refinement that keeps
them pinned to the curve.  Counts are checked against the sharp bound
5 deg(r) - 5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import _geom
from .algebra import ShiftedFunction, elimination_poly, max_zero_count
from .config import DEFAULT_TOL, TAU, Tolerances
from .critical import RegionPartition, _branch_refine
from .errors import CountBoundError, IsolationError, WindingError
from .roots import all_roots, newton_polish

__all__ = [
    "ZeroRecord",
    "ZeroCensus",
    "WindingResult",
    "ArgPrincipleReport",
    "find_zeros",
    "winding",
    "poincare_index",
    "verify_argument_principle",
]

PRESERVING = "preserving"
REVERSING = "reversing"
SINGULAR = "singular"


@dataclass(frozen=True)
class ZeroRecord:
    z: complex
    orientation: str          # "preserving" | "reversing" | "singular"
    jacobian: float
    residual: float
    index: int | None         # +1 / -1 for regular zeros, None on the critical set
    face_id: int | None = None

    def to_dict(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "orientation": self.orientation,
            "jacobian": self.jacobian,
            "residual": self.residual,
            "index": self.index,
            "face": self.face_id,
        }


@dataclass
class ZeroCensus:
    eta: complex
    records: list[ZeroRecord]
    ambiguous: list[tuple[complex, float]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def n_plus(self) -> int:
        return sum(1 for rec in self.records if rec.orientation == PRESERVING)

    @property
    def n_minus(self) -> int:
        return sum(1 for rec in self.records if rec.orientation == REVERSING)

    @property
    def n_singular(self) -> int:
        return sum(1 for rec in self.records if rec.orientation == SINGULAR)

    def per_face(self) -> dict:
        """face_id -> (N, N_plus, N_minus) over regular zeros with a face."""
        out: dict = {}
        for rec in self.records:
            if rec.face_id is None:
                continue
            n, npl, nmi = out.get(rec.face_id, (0, 0, 0))
            out[rec.face_id] = (
                n + 1,
                npl + (rec.orientation == PRESERVING),
                nmi + (rec.orientation == REVERSING),
            )
        return out

    def to_dict(self) -> dict:
        return {
            "eta": [self.eta.real, self.eta.imag],
            "zeros": [rec.to_dict() for rec in self.records],
            "counts": {
                "N": self.n,
                "N_plus": self.n_plus,
                "N_minus": self.n_minus,
                "N_s": self.n_singular,
            },
            "ambiguous": [
                {"z": [z.real, z.imag], "residual": res} for z, res in self.ambiguous
            ],
            "notes": list(self.notes),
        }


def _poles_of(f: ShiftedFunction) -> np.ndarray:
    return np.array([p.z for p in f.r.poles], dtype=complex)


def _batch_polish(f: ShiftedFunction, z: np.ndarray, tol: Tolerances,
                  max_iter: int = 48):
    """Vectorized Newton on all candidates at once.

    Returns (z, residual, near_critical); stalls near the critical set are
    flagged instead of iterated further.
    """
    z = z.astype(complex).copy()
    best = z.copy()
    fv = f.eval(z)
    best_res = np.abs(fv)
    near = np.zeros(len(z), dtype=bool)
    active = np.isfinite(best_res)
    near[~active] = False
    for _ in range(max_iter):
        if not active.any():
            break
        za = z[active]
        a = f.r.deriv1_many(za)
        fva = f.eval(za)
        det = (a * np.conj(a)).real - 1.0
        sing = np.abs(det) <= tol.singular
        dz = np.zeros_like(za)
        ok = ~sing
        dz[ok] = (np.conj(a[ok]) * (-fva[ok]) - np.conj(fva[ok])) / det[ok]
        bad = ~np.isfinite(dz)
        dz[bad] = 0.0
        cap = 10.0 * (1.0 + np.abs(za))
        over = np.abs(dz) > cap
        dz[over] *= (cap[over] / np.abs(dz[over]))
        zn = za + dz
        fn = f.eval(zn)
        rn = np.abs(fn)
        idx = np.nonzero(active)[0]
        improved = rn < best_res[idx]
        best[idx[improved]] = zn[improved]
        best_res[idx[improved]] = rn[improved]
        z[idx] = zn
        # freeze: converged to machine noise, flagged singular, or stalled
        scale = 1.0 + np.abs(zn) + abs(f.eta)
        done = (rn <= 1e-15 * scale) | sing | ~np.isfinite(rn) | (np.abs(dz) <= 1e-16 * (1 + np.abs(zn)))
        near[idx[sing]] = True
        active[idx[done]] = False
    return best, best_res, near


def _gauss_newton_singular(f: ShiftedFunction, z0: complex, tol: Tolerances,
                           max_iter: int = 60) -> tuple[complex, float]:
    """Refine a zero constrained to the critical set.

    Solves the overdetermined system (Re f, Im f, J_f) = 0 by least squares;
    the 3x2 system has full rank at fold points of the caustic, so singular
    zeros created by a fold contact converge quadratically.
    """
    z = complex(z0)
    best, best_score, best_res = z, math.inf, math.inf
    for _ in range(max_iter):
        try:
            fv = f.eval(z)
            a = f.r.deriv1(z)
            d2 = f.r.deriv2(z)
        except Exception:
            break
        jac = (a * np.conj(a)).real - 1.0
        score = math.hypot(abs(fv), abs(jac))
        if score < best_score:
            best, best_score, best_res = z, score, abs(fv)
        g = 2.0 * d2 * np.conj(a)          # gradient of J_f as a complex number
        A = np.array([
            [a.real - 1.0, -a.imag],
            [a.imag, a.real + 1.0],
            [g.real, -g.imag],
        ])
        b = -np.array([fv.real, fv.imag, jac])
        step, *_ = np.linalg.lstsq(A, b, rcond=None)
        dz = complex(step[0], step[1])
        if not np.isfinite(dz):
            break
        cap = 0.5 * (1.0 + abs(z))
        if abs(dz) > cap:
            dz *= cap / abs(dz)
        z = z + dz
        if abs(dz) <= 1e-16 * (1.0 + abs(z)):
            break
    return best, best_res


def _project_curve_zero(f: ShiftedFunction, z0: complex,
                        partition: RegionPartition, tol: Tolerances):
    """Refine a singular zero by sliding along the traced critical curve.

    Minimizes |f(z(theta))| in the curve parameter; this stays accurate at
    cusp points where the unconstrained refinement loses rank.  Returns
    None when z0 is not near any traced curve.
    """
    r = f.r
    best = None
    for curve in partition.curves:
        dist = np.abs(curve.z - z0)
        k = int(np.argmin(dist))
        if dist[k] > 0.05 * (1.0 + abs(z0)):
            continue
        lo = max(k - 2, 0)
        hi = min(k + 2, len(curve.z) - 1)
        th_a, th_b = float(curve.theta[lo]), float(curve.theta[hi])
        if th_b <= th_a:
            continue
        theta_grid = curve.theta

        def at(th: float) -> complex:
            j = int(np.clip(np.searchsorted(theta_grid, th), 1, len(theta_grid) - 1))
            j = j - 1 if abs(theta_grid[j - 1] - th) < abs(theta_grid[j] - th) else j
            return complex(_branch_refine(
                r, np.array([curve.z[j]]), np.array([np.exp(1j * th)]), steps=8)[0])

        res = minimize_scalar(
            lambda th: abs(f.eval(at(th))),
            bounds=(th_a, th_b), method="bounded",
            options={"xatol": 1e-14, "maxfun": 300},
        )
        z_star = at(float(res.x))
        val = abs(f.eval(z_star))
        if best is None or val < best[1]:
            best = (z_star, val)
    return best


def find_zeros(f: ShiftedFunction, partition: RegionPartition | None = None,
               tol: Tolerances | None = None) -> ZeroCensus:
    """Census of all zeros of f_eta with orientations and residuals.

    Candidates come from the elimination polynomial, so no zero is missed;
    extraneous candidates are rejected by the residual gate.  Candidates in
    the ambiguous residual band are reported but never counted.  Passing the
    region partition adds face assignment and enables the on-curve fallback
    for singular zeros.
    """
    tol = tol or f.tol
    elim = elimination_poly(f)
    cands = all_roots(elim, tol.root).roots
    if cands.size == 0:
        return ZeroCensus(f.eta, [])

    # discard candidates swallowed by a pole of r
    if f.r.q.degree >= 1:
        qv = np.abs(f.r.q.eval(cands))
        qs = f.r.q.magnitude_at(cands) + 1.0
        cands = cands[qv > 1e-11 * qs]

    z, res, near = _batch_polish(f, cands, tol)

    # the slow path: anything flagged near the critical set, or unconverged
    scale = 1.0 + np.abs(z) + abs(f.eta)
    retry = np.nonzero(near | (res > tol.res * scale))[0]
    for i in retry:
        zi, ri = _gauss_newton_singular(f, z[i], tol)
        if ri < res[i]:
            z[i], res[i] = zi, ri
        si = 1.0 + abs(z[i]) + abs(f.eta)
        if partition is not None and res[i] > tol.res * si:
            proj = _project_curve_zero(f, z[i], partition, tol)
            if proj is not None and proj[1] < res[i]:
                z[i], res[i] = proj[0], proj[1]

    # dedupe clusters, best residual wins
    order = np.lexsort((z.imag, z.real))
    kept: list[int] = []
    for i in order:
        dup = None
        for j in kept:
            if abs(z[i] - z[j]) <= tol.dedupe * (1.0 + abs(z[i])):
                dup = j
                break
        if dup is None:
            kept.append(int(i))
        elif res[i] < res[dup]:
            kept[kept.index(dup)] = int(i)

    scale = 1.0 + np.abs(z) + abs(f.eta)
    accepted = [i for i in kept if res[i] <= tol.res * scale[i]]
    ambiguous = [
        (complex(z[i]), float(res[i]))
        for i in kept
        if tol.res * scale[i] < res[i] <= tol.ambiguous_factor * tol.res * scale[i]
    ]

    faces: list = [None] * len(accepted)
    if partition is not None and accepted:
        faces = partition.face_of_many(z[accepted])

    records: list[ZeroRecord] = []
    notes: list[str] = []
    for pos, i in enumerate(accepted):
        zi = complex(z[i])
        jac = float(f.jacobian(zi))
        if abs(jac) <= tol.singular:
            orient, index = SINGULAR, None
        elif jac > 0:
            orient, index = PRESERVING, 1
        else:
            orient, index = REVERSING, -1
        if tol.singular < abs(jac) <= 10.0 * tol.singular:
            notes.append(f"jacobian {jac:.3e} at {zi:.12g} is just outside the singular band")
        face = faces[pos]
        records.append(ZeroRecord(
            z=zi, orientation=orient, jacobian=jac, residual=float(res[i]),
            index=index, face_id=None if face is None else face.face_id,
        ))
    records.sort(key=lambda rec: (rec.z.real, rec.z.imag))

    # singular zeros sit where f is locally flat (quadratic at a fold,
    # cubic at a cusp), so two polish paths can stop well outside the
    # dedupe radius with residuals at rounding level; below the flatness
    # resolution sqrt(tol.res) such twins are one zero
    merged: list[ZeroRecord] = []
    for rec in records:
        twin = None
        if rec.orientation == SINGULAR:
            for k, other in enumerate(merged):
                if (other.orientation == SINGULAR
                        and abs(rec.z - other.z) <= 3e-6 * (1.0 + abs(rec.z))):
                    twin = k
                    break
        if twin is None:
            merged.append(rec)
        elif (rec.residual, abs(rec.jacobian)) < (merged[twin].residual,
                                                  abs(merged[twin].jacobian)):
            merged[twin] = rec
    if len(merged) < len(records):
        notes.append(f"merged {len(records) - len(merged)} singular twin(s)")
    records = merged

    if any(rec.orientation == SINGULAR for rec in records):
        # a singular zero exists exactly when eta is a caustic point
        if partition is not None:
            dmin = math.inf
            for curve in partition.curves:
                w = f.r.eval_many(curve.z) - np.conj(curve.z)
                dmin = min(dmin, float(_geom.point_segment_distance(
                    np.array([f.eta]), w)[0]))
            notes.append(f"singular records present; |eta - caustic| = {dmin:.3e}")
        else:
            notes.append("singular records present; no partition for the caustic cross-check")

    bound = max_zero_count(f.r)
    if len(records) > bound:
        raise CountBoundError(
            f"{len(records)} zeros found at eta = {f.eta}, above the sharp bound {bound}"
        )
    return ZeroCensus(f.eta, records, ambiguous, notes)


@dataclass(frozen=True)
class WindingResult:
    value: float               # total argument change / 2 pi
    rounded: int
    evaluations: int
    max_step: float            # largest accepted argument increment


def _eval_fn(g):
    if hasattr(g, "eval"):
        return lambda z: np.asarray(g.eval(z), dtype=complex)
    return lambda z: np.asarray(g(z), dtype=complex)


def winding(g, points, budget: int = 2 ** 20,
            tol: Tolerances = DEFAULT_TOL) -> WindingResult:
    """Winding number of g along a closed polyline.

    Argument increments are accumulated stepwise; any step of pi/2 or more
    triggers bisection of that segment until every accepted step is smaller,
    so the count cannot slip by a full turn.  Raises WindingError when the
    curve runs through a zero of g or the evaluation budget is exhausted.
    """
    pts = _geom.as_closed(np.asarray(points, dtype=complex))
    if len(pts) < 4:
        raise WindingError("need at least 3 distinct vertices")
    ev = _eval_fn(g)
    vals = ev(pts)
    if not np.all(np.isfinite(vals)):
        raise WindingError("g is not finite on the contour")
    vmax = float(np.abs(vals).max())
    if vmax == 0.0 or float(np.abs(vals).min()) < 1e-13 * vmax:
        raise WindingError("contour passes through a zero of g")
    used = len(pts)
    total = 0.0
    max_step = 0.0
    stack = [(pts[i], pts[i + 1], vals[i], vals[i + 1]) for i in range(len(pts) - 1)]
    while stack:
        za, zb, va, vb = stack.pop()
        step = float(np.angle(vb / va))
        if abs(step) < 0.5 * math.pi:
            total += step
            if abs(step) > max_step:
                max_step = abs(step)
            continue
        if used >= budget:
            raise WindingError(f"winding budget {budget} exhausted")
        zm = 0.5 * (za + zb)
        vm = complex(ev(np.asarray(zm)))
        used += 1
        if not np.isfinite(vm):
            raise WindingError("g is not finite on the contour")
        if abs(vm) < 1e-13 * vmax:
            raise WindingError("contour passes through a zero of g")
        stack.append((za, zm, va, vm))
        stack.append((zm, zb, vm, vb))
    value = total / TAU
    return WindingResult(value, int(round(value)), used, max_step)


def poincare_index(f, z0: complex, exclude=(), radius: float | None = None,
                   tol: Tolerances = DEFAULT_TOL, samples: int = 128) -> int:
    """Index of an isolated zero: the winding of f on a small circle.

    exclude lists other zeros and poles; the circle radius stays below a
    quarter of the distance to the nearest of them.  Regular zeros give
    sign(J_f); zeros on the critical set give the index of the merged
    cluster (0 at a generic fold contact, +-1 at a cusp contact).
    """
    z0 = complex(z0)
    scale = 1.0 + abs(z0)
    if radius is None:
        gaps = [abs(z0 - complex(o)) for o in exclude]
        radius = 0.25 * min(gaps) if gaps else 1e-3 * scale
    floor = 1e-9 * scale
    radius = max(float(radius), floor)
    last_err: Exception | None = None
    for _ in range(8):
        try:
            res = winding(f, _geom.circle(z0, radius, samples), tol=tol)
        except WindingError as exc:
            last_err = exc
            radius *= 0.5
            if radius < floor:
                break
            continue
        if abs(res.value - res.rounded) <= tol.winding_int:
            return res.rounded
        radius *= 0.5
        if radius < floor:
            break
    raise IsolationError(f"no isolating circle found around {z0}: {last_err}")


@dataclass(frozen=True)
class ArgPrincipleReport:
    winding_value: float
    winding_rounded: int
    n_plus: int
    n_minus: int
    pole_count: int
    consistent: bool
    census: ZeroCensus


def verify_argument_principle(f: ShiftedFunction, points,
                              census: ZeroCensus | None = None,
                              tol: Tolerances | None = None) -> ArgPrincipleReport:
    """Check winding(f, curve) = N_plus - N_minus - P inside the curve.

    P counts poles of r with multiplicity.  The contour must stay clear of
    all zeros and poles, and no singular zero may lie inside; both are
    checked before any winding is computed.
    """
    tol = tol or f.tol
    pts = _geom.as_closed(np.asarray(points, dtype=complex))
    cen = census if census is not None else find_zeros(f, tol=tol)

    zlist = np.array([rec.z for rec in cen.records], dtype=complex)
    plist = np.array([p.z for p in f.r.poles], dtype=complex)
    pmult = np.array([p.multiplicity for p in f.r.poles], dtype=int)
    for arr, what in ((zlist, "zero"), (plist, "pole")):
        if arr.size:
            d = _geom.point_segment_distance(arr, pts)
            bad = d < 1e-8 * (1.0 + np.abs(arr))
            if bad.any():
                raise IsolationError(f"contour passes within 1e-8 of a {what}")

    inside_z = _geom.point_in_polygon(zlist, pts) if zlist.size else np.zeros(0, bool)
    inside_p = _geom.point_in_polygon(plist, pts) if plist.size else np.zeros(0, bool)
    npl = nmi = 0
    for rec, isin in zip(cen.records, inside_z):
        if not isin:
            continue
        if rec.orientation == SINGULAR:
            raise WindingError(
                f"singular zero at {rec.z:.12g} inside the contour; the count "
                "formula needs J_f != 0 at every enclosed zero"
            )
        if rec.orientation == PRESERVING:
            npl += 1
        else:
            nmi += 1
    pcount = int(pmult[inside_p].sum()) if plist.size else 0

    res = winding(f, pts, tol=tol)
    consistent = (abs(res.value - res.rounded) <= tol.winding_int
                  and res.rounded == npl - nmi - pcount)
    return ArgPrincipleReport(res.value, res.rounded, npl, nmi, pcount, consistent, cen)
