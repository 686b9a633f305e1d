"""Theorem-level experiments on shifted rational harmonic functions.

Everything here combines the lower layers: large-shift asymptotics, safe
shift radii, path invariance of per-face zero counts, observational fold
and cusp crossing ledgers, regularity and extremality checks, and count
maps over a rectangle of shifts.  Verdicts are three-valued (pass, fail,
inconclusive); an inconclusive experiment never counts as a pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _geom
from .algebra import RationalFn, ShiftedFunction
from .caustics import (
    Caustic,
    CrossingEvent,
    CuspPoint,
    _adjacent_faces,
    find_preimages,
    local_model,
    map_caustics,
    path_crossings,
)
from .config import DEFAULT_SEED, DEFAULT_TOL, TAU, Tolerances
from .critical import RegionPartition, build_partition, trace_critical_curves
from .errors import CrossingError, IsolationError
from .zeros import SINGULAR, ZeroCensus, find_zeros, poincare_index

__all__ = [
    "Geometry",
    "compute_geometry",
    "AsymptoticReport",
    "SafeShiftReport",
    "GapRecord",
    "CrossingLedger",
    "CountMap",
    "asymptotic_count",
    "large_shift_verify",
    "safe_shift_radius",
    "path_invariance_check",
    "crossing_ledger",
    "fold_crossing_experiment",
    "cusp_crossing_experiment",
    "regularity_check",
    "extremal_check",
    "count_map",
    "sample_fold_points",
    "representative_shifts",
]


@dataclass
class Geometry:
    """Critical curves, caustics and the face partition of one function."""

    r: RationalFn
    curves: list
    caustics: list[Caustic]
    partition: RegionPartition
    tol: Tolerances
    _census_cache: dict = field(default_factory=dict, repr=False)

    def shifted(self, eta: complex) -> ShiftedFunction:
        return ShiftedFunction(self.r, eta, self.tol)

    def census(self, eta: complex) -> ZeroCensus:
        key = complex(eta)
        hit = self._census_cache.get(key)
        if hit is None:
            hit = find_zeros(self.shifted(key), partition=self.partition, tol=self.tol)
            if len(self._census_cache) > 4096:
                self._census_cache.clear()
            self._census_cache[key] = hit
        return hit

    def caustic_distance(self, eta) -> np.ndarray:
        """Distance from each shift to the nearest caustic point."""
        etas = np.atleast_1d(np.asarray(eta, dtype=complex))
        out = np.full(len(etas), np.inf)
        for ca in self.caustics:
            for k in range(0, len(etas), 256):
                sl = slice(k, k + 256)
                out[sl] = np.minimum(out[sl], _geom.point_segment_distance(etas[sl], ca.w))
        return out


def compute_geometry(r: RationalFn, theta_steps: int = 720,
                     tol: Tolerances = DEFAULT_TOL) -> Geometry:
    curves = trace_critical_curves(r, theta_steps=theta_steps, tol=tol)
    caustics = map_caustics(r, curves, tol)
    partition = build_partition(r, curves, tol)
    return Geometry(r, curves, caustics, partition, tol)


def _as_geometry(obj, tol: Tolerances | None = None) -> Geometry:
    if isinstance(obj, Geometry):
        return obj
    if isinstance(obj, ShiftedFunction):
        return compute_geometry(obj.r, tol=tol or obj.tol)
    return compute_geometry(obj, tol=tol or DEFAULT_TOL)


# ---------------------------------------------------------------------------
# large shifts


@dataclass
class AsymptoticReport:
    k: int
    c: complex | None            # leading coefficient of the polynomial part
    expected: int
    observed: int
    eta: complex
    epsilon: float               # pole-cluster radius magnitude**(-1/2)
    pole_table: list[dict]
    far_zeros: list[complex]
    far_in_unbounded: bool
    verdict: str
    notes: list[str] = field(default_factory=list)


def asymptotic_count(r: RationalFn) -> tuple[int, int]:
    """(k, expected zero count) for large shifts: k = max(deg p - deg q, 1)."""
    k = max(r.p.degree - r.q.degree, 1)
    return k, r.q.degree + k


def large_shift_verify(geom, magnitude: float, direction: float,
                       tol: Tolerances | None = None) -> AsymptoticReport:
    """Count and place the zeros of f_eta for one large shift.

    Checks that every pole of multiplicity mu attracts exactly mu
    sense-preserving zeros within epsilon = magnitude**(-1/2), and that the
    remaining k zeros live in the unbounded face.
    """
    geom = _as_geometry(geom, tol)
    r = geom.r
    k, expected = asymptotic_count(r)
    c = None
    if r.p.degree > r.q.degree:
        c = complex(r.p.coeffs[-1] / r.q.coeffs[-1])
    eta = complex(magnitude * np.exp(1j * direction))
    census = geom.census(eta)
    eps = float(magnitude) ** -0.5
    notes: list[str] = [f"pole cluster radius eps = magnitude**-0.5 = {eps:.3e}"]

    zs = np.array([rec.z for rec in census.records], dtype=complex)
    claimed = np.zeros(len(zs), dtype=bool)
    pole_table = []
    ok = census.n == expected and census.n_singular == 0
    for pole in r.poles:
        near = np.abs(zs - pole.z) < eps
        rows = [census.records[i] for i in np.nonzero(near)[0]]
        all_pres = all(rec.orientation == "preserving" for rec in rows)
        claimed |= near
        pole_table.append({
            "pole": complex(pole.z),
            "multiplicity": pole.multiplicity,
            "zeros_within_eps": int(near.sum()),
            "all_preserving": bool(all_pres),
        })
        ok = ok and near.sum() == pole.multiplicity and all_pres

    far = [complex(zs[i]) for i in np.nonzero(~claimed)[0]]
    unbounded = geom.partition.unbounded_face
    far_faces = [geom.partition.face_of(z) for z in far]
    far_ok = (len(far) == k
              and all(fc is not None and fc.face_id == unbounded.face_id for fc in far_faces))
    ok = ok and far_ok
    if census.ambiguous:
        ok = False
        notes.append(f"{len(census.ambiguous)} ambiguous candidates")
    return AsymptoticReport(
        k=k, c=c, expected=expected, observed=census.n, eta=eta, epsilon=eps,
        pole_table=pole_table, far_zeros=far, far_in_unbounded=far_ok,
        verdict="pass" if ok else "fail", notes=notes,
    )


# ---------------------------------------------------------------------------
# safe shift radius


@dataclass
class SafeShiftReport:
    epsilon: float               # zero-disk radius
    delta: float                 # shift magnitudes below this preserve the census
    selftest_pass: bool
    zeros: list[complex]
    grid_spacing: float
    notes: list[str] = field(default_factory=list)

    def in_contract(self, eta: complex) -> bool:
        return abs(eta) < self.delta


def safe_shift_radius(geom, selftest: int = 20, seed: int = DEFAULT_SEED,
                      grid_n: int = 241, tol: Tolerances | None = None) -> SafeShiftReport:
    """Radius delta with census stability for every |eta| < delta.

    epsilon is half the least distance separating zeros of f from each
    other and from the critical set; delta is the sampled minimum of |f|
    off the epsilon-disks.  For |eta| < delta no zero can leave its disk
    and no new zero can appear, so counts and orientations per disk are
    unchanged; shifts at or above delta carry no guarantee.
    """
    geom = _as_geometry(geom, tol)
    f0 = geom.shifted(0.0)
    census = geom.census(0.0)
    if census.n_singular or census.ambiguous:
        raise IsolationError("safe radius needs a regular census at eta = 0")
    zs = np.array([rec.z for rec in census.records], dtype=complex)
    gaps = [abs(a - b) for i, a in enumerate(zs) for b in zs[i + 1:]]
    curve_gap = min(
        float(_geom.point_segment_distance(zs, c.z).min()) for c in geom.curves
    )
    eps = 0.5 * min(min(gaps) if gaps else math.inf, curve_gap)

    pts = np.concatenate([zs] + [c.z for c in geom.curves])
    lo_re, hi_re = float(pts.real.min()), float(pts.real.max())
    lo_im, hi_im = float(pts.imag.min()), float(pts.imag.max())
    span = max(hi_re - lo_re, hi_im - lo_im, 1.0)
    pad = 0.35 * span + 1.0
    xs = np.linspace(lo_re - pad, hi_re + pad, grid_n)
    ys = np.linspace(lo_im - pad, hi_im + pad, grid_n)
    grid = (xs[None, :] + 1j * ys[:, None]).ravel()
    keep = np.ones(len(grid), dtype=bool)
    for z in zs:
        keep &= np.abs(grid - z) > eps
    with np.errstate(all="ignore"):
        vals = np.abs(f0.eval(grid[keep]))
    vals = vals[np.isfinite(vals)]
    ring_r = 1.5 * (0.5 * span + pad) + abs(pts).max() + 1.0
    with np.errstate(all="ignore"):
        ring = np.abs(f0.eval(_geom.circle(0.0, ring_r, 1024)))
    delta = float(min(vals.min(), ring[np.isfinite(ring)].min()))

    rng = np.random.default_rng(seed)
    passed = True
    for _ in range(selftest):
        ang = rng.uniform(0.0, TAU)
        mag = delta * math.sqrt(rng.uniform(0.0, 0.98))
        cen = geom.census(complex(mag * np.exp(1j * ang)))
        if cen.n != census.n or cen.n_singular:
            passed = False
            break
        taken = np.zeros(len(zs), dtype=int)
        okrun = True
        for rec in cen.records:
            j = int(np.argmin(np.abs(zs - rec.z)))
            if abs(zs[j] - rec.z) > eps or rec.orientation != census.records[j].orientation:
                okrun = False
                break
            taken[j] += 1
        if not okrun or not np.all(taken == 1):
            passed = False
            break
    return SafeShiftReport(
        epsilon=float(eps), delta=delta, selftest_pass=passed,
        zeros=[complex(z) for z in zs],
        grid_spacing=float(xs[1] - xs[0]),
        notes=["delta is a sampled minimum; the self-test is the contract check"],
    )


# ---------------------------------------------------------------------------
# crossing ledgers


def _face_table(census: ZeroCensus) -> dict:
    return census.per_face()


def _counts(census: ZeroCensus) -> tuple[int, int, int]:
    return census.n, census.n_plus, census.n_minus


@dataclass
class GapRecord:
    lo: float                    # fractions of total path length
    hi: float
    etas: list[complex]
    counts: tuple[int, int, int] | None
    per_face: dict | None
    constant: bool
    clean: bool


@dataclass
class CrossingLedger:
    path: np.ndarray
    events: list[CrossingEvent]
    gaps: list[GapRecord]
    verdict: str                 # pass | fail | inconclusive
    notes: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "path": [[p.real, p.imag] for p in self.path],
            "events": [
                {
                    "w": [e.w.real, e.w.imag],
                    "kind": e.kind,
                    "caustic": e.caustic_id,
                    "direction": e.direction,
                    "reliable": e.reliable,
                    "predicted": {
                        "dn": e.predicted.dn,
                        "dn_plus": e.predicted.dn_plus,
                        "dn_minus": e.predicted.dn_minus,
                        "per_face": {str(k): v for k, v in e.predicted.per_face.items()},
                        "sign_im_dinv": e.predicted.sign_im_dinv,
                    },
                    "observed": e.observed,
                    "verdict": e.verdict,
                }
                for e in self.events
            ],
            "gaps": [
                {
                    "range": [g.lo, g.hi],
                    "counts": g.counts,
                    "per_face": {str(k): v for k, v in (g.per_face or {}).items()},
                    "constant": g.constant,
                    "clean": g.clean,
                }
                for g in self.gaps
            ],
            "verdict": self.verdict,
            "notes": list(self.notes),
            "extra": {k: repr(v) for k, v in self.extra.items()},
        }


def _path_arc(path: np.ndarray):
    seg = np.abs(np.diff(path))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    return cum, float(cum[-1])


def _point_at(path: np.ndarray, cum: np.ndarray, total: float, frac: float) -> complex:
    s = frac * total
    j = int(np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(path) - 2))
    seg = cum[j + 1] - cum[j]
    t = 0.0 if seg == 0 else (s - cum[j]) / seg
    return complex(path[j] + t * (path[j + 1] - path[j]))


def crossing_ledger(geom, path, samples_per_gap: int = 8,
                    tol: Tolerances | None = None) -> CrossingLedger:
    """Censuses along a shift path, cut at its caustic crossings.

    Per-face counts must be constant inside each gap between consecutive
    events; each event's observed count jump is compared against the local
    model's prediction.  Any unreliable (near-tangential) event that fails
    its comparison is marked inconclusive rather than failed.
    """
    geom = _as_geometry(geom, tol)
    tol = tol or geom.tol
    path = np.asarray(path, dtype=complex)
    events = path_crossings(geom.caustics, path, r=geom.r,
                            partition=geom.partition, tol=tol)
    cum, total = _path_arc(path)
    positions = [0.0]
    for e in events:
        positions.append(float((cum[e.path_seg] + e.t * (cum[e.path_seg + 1] - cum[e.path_seg])) / total))
    positions.append(1.0)

    notes: list[str] = []
    gaps: list[GapRecord] = []
    for g in range(len(positions) - 1):
        lo, hi = positions[g], positions[g + 1]
        margin = 0.04 * (hi - lo)
        fr = np.linspace(lo + margin, hi - margin, samples_per_gap) if hi - lo > 1e-9 else []
        etas = [_point_at(path, cum, total, float(x)) for x in fr]
        tables = []
        clean = True
        for eta in etas:
            cen = geom.census(eta)
            if cen.n_singular or cen.ambiguous:
                clean = False
            tables.append((_counts(cen), _face_table(cen)))
        constant = bool(tables) and all(t == tables[0] for t in tables)
        gaps.append(GapRecord(
            lo=lo, hi=hi, etas=etas,
            counts=tables[0][0] if tables else None,
            per_face=tables[0][1] if tables else None,
            constant=constant, clean=clean,
        ))

    verdict = "pass"
    for i, e in enumerate(events):
        before, after = gaps[i], gaps[i + 1]
        if before.counts is None or after.counts is None or not (before.constant and after.constant):
            e.verdict = "inconclusive"
            verdict = "inconclusive" if verdict == "pass" else verdict
            notes.append(f"event {i}: gap censuses unusable")
            continue
        dn = after.counts[0] - before.counts[0]
        dnp = after.counts[1] - before.counts[1]
        dnm = after.counts[2] - before.counts[2]
        pf = {}
        for fid in set(before.per_face) | set(after.per_face):
            nb = before.per_face.get(fid, (0, 0, 0))[0]
            na = after.per_face.get(fid, (0, 0, 0))[0]
            if na != nb:
                pf[fid] = na - nb
        e.observed = {"dn": dn, "dn_plus": dnp, "dn_minus": dnm, "per_face": pf}
        match = (dn == e.predicted.dn and dnp == e.predicted.dn_plus
                 and dnm == e.predicted.dn_minus)
        if e.predicted.per_face:
            match = match and pf == {k: v for k, v in e.predicted.per_face.items() if v != 0}
        if match:
            e.verdict = "pass"
        elif not e.reliable:
            e.verdict = "inconclusive"
            verdict = "inconclusive" if verdict == "pass" else verdict
            notes.append(f"event {i}: near-tangential crossing, observation ambiguous")
        else:
            e.verdict = "fail"
            verdict = "fail"
            notes.append(f"event {i}: observed {e.observed} != predicted")
    if not events:
        ok = all(g.constant for g in gaps if g.counts is not None)
        first = gaps[0]
        last = gaps[-1]
        if not ok or (first.counts, first.per_face) != (last.counts, last.per_face):
            verdict = "fail"
            notes.append("counts changed without any crossing event")
    return CrossingLedger(path, events, gaps, verdict, notes)


def path_invariance_check(geom, eta1: complex, eta2: complex, path=None,
                          tol: Tolerances | None = None) -> CrossingLedger:
    """Same-face shifts give identical per-face censuses.

    The path (default: the straight segment) must not cross any caustic;
    crossings raise CrossingError listing the offending events.
    """
    geom = _as_geometry(geom, tol)
    if path is None:
        path = [complex(eta1), complex(eta2)]
    path = np.asarray(path, dtype=complex)
    events = path_crossings(geom.caustics, path, r=geom.r,
                            partition=geom.partition, tol=tol or geom.tol)
    if events:
        wlist = ", ".join(f"{e.w:.6g} ({e.kind})" for e in events)
        raise CrossingError(f"path from {eta1:.6g} to {eta2:.6g} crosses caustics at: {wlist}")
    ledger = crossing_ledger(geom, path, tol=tol)
    ca, cb = geom.census(complex(eta1)), geom.census(complex(eta2))
    same = (_counts(ca) == _counts(cb) and _face_table(ca) == _face_table(cb))
    if not same:
        ledger.verdict = "fail"
        ledger.notes.append("endpoint censuses differ")
    ledger.extra["endpoints"] = (_counts(ca), _counts(cb))
    return ledger


# ---------------------------------------------------------------------------
# fold and cusp experiments


def _refine_to_curve(r: RationalFn, z0: complex, steps: int = 10) -> complex:
    """Newton steps for J(z) = 0 along the gradient of J."""
    z = complex(z0)
    for _ in range(steps):
        a = r.deriv1(z)
        jac = (a * np.conj(a)).real - 1.0
        g = 2.0 * r.deriv2(z) * np.conj(a)
        norm = (g * np.conj(g)).real
        if norm < 1e-30:
            break
        z = z - jac * g / norm
        if abs(jac) < 1e-16:
            break
    return z


def _branch_theta(geom: Geometry, z: complex) -> tuple[float, int]:
    """Continuous curve parameter at a point on a critical curve."""
    best = None
    for curve in geom.curves:
        k = int(np.argmin(np.abs(curve.z - z)))
        d = abs(curve.z[k] - z)
        if best is None or d < best[0]:
            best = (d, curve, k)
    _, curve, k = best
    th0 = float(curve.theta[k])
    w = geom.r.deriv1(z)
    return th0 + float(np.angle(w * np.exp(-1j * th0))), curve.curve_id


def _feature_scale(geom: Geometry, eta_c: complex) -> float:
    """Distance from eta_c to the nearest caustic feature besides the
    contact arc itself."""
    dmin = math.inf
    touch = 1e-7 * (1.0 + abs(eta_c))
    for ca in geom.caustics:
        d = np.abs(ca.w - eta_c)
        if float(d.min()) < touch:
            # this caustic carries the contact: mask out its local arc
            k = int(np.argmin(d))
            arc = np.abs(ca.arclen - ca.arclen[k])
            arc = np.minimum(arc, ca.arclen[-1] - arc)
            local = arc < 0.03 * ca.arclen[-1]
            if (~local).any():
                dmin = min(dmin, float(d[~local].min()))
            for cp in ca.cusp_points:
                if abs(cp.w - eta_c) > touch:
                    dmin = min(dmin, abs(cp.w - eta_c))
        else:
            dmin = min(dmin, float(d.min()))
    if not math.isfinite(dmin) or dmin <= 0.0:
        dmin = 1.0 + abs(eta_c)
    return dmin


def _stable_magnitude(geom: Geometry, eta_c: complex, axis: complex,
                      s0: float, halvings: int = 12):
    """Shrink the crossing magnitude until both side censuses stabilize."""
    def table(eta):
        cen = geom.census(eta)
        clean = not (cen.n_singular or cen.ambiguous)
        return (_counts(cen), _face_table(cen)), clean

    s = s0
    prev = None
    for _ in range(halvings):
        tp, cp = table(eta_c + s * axis)
        tm, cm = table(eta_c - s * axis)
        cur = (tp, tm)
        if cp and cm and prev is not None and cur == prev:
            return s, cur
        prev = cur if (cp and cm) else None
        s *= 0.5
    return None, None


def _experiment_ledger(geom: Geometry, model, eta_c: complex, kind: str,
                       tol: Tolerances) -> CrossingLedger:
    axis = model.image_shift_direction
    axis = axis / abs(axis)
    s0 = 1e-2 * _feature_scale(geom, eta_c)
    s, sides = _stable_magnitude(geom, eta_c, axis, s0)
    notes: list[str] = []
    if s is None:
        return CrossingLedger(np.array([eta_c]), [], [], "inconclusive",
                              ["no stable crossing magnitude found"],
                              {"model": model, "eta_c": eta_c})
    path = np.array([eta_c - s * axis, eta_c + s * axis])
    ledger = crossing_ledger(geom, path, tol=tol)
    ledger.extra.update({"model": model, "eta_c": complex(eta_c), "magnitude": s})
    if len(ledger.events) != 1 or ledger.events[0].kind != kind:
        ledger.verdict = "inconclusive"
        ledger.notes.append(
            f"expected exactly one {kind} event on the axis path, got "
            f"{[(e.kind, e.w) for e in ledger.events]}"
        )
        return ledger

    # the on-caustic census: singular records and their indices
    cen0 = geom.census(complex(eta_c))
    sing = [rec for rec in cen0.records
            if rec.orientation == SINGULAR
            and abs(rec.z - model.z0) < 1e-4 * (1.0 + abs(model.z0))]
    ledger.extra["caustic_census"] = _counts(cen0)
    ledger.extra["singular_near_z0"] = [rec.z for rec in sing]
    all_sing = [rec for rec in cen0.records if rec.orientation == SINGULAR]
    if len(sing) != 1 or len(all_sing) != len(find_preimages(geom.r, geom.caustics, eta_c, tol)):
        ledger.verdict = "fail"
        ledger.notes.append(f"expected one singular record per preimage, got {len(all_sing)}")
        return ledger
    exclude = [rec.z for rec in cen0.records if abs(rec.z - sing[0].z) > 0] + \
              [p.z for p in geom.r.poles]
    try:
        idx = poincare_index(geom.shifted(complex(eta_c)), sing[0].z, exclude=exclude, tol=tol)
    except IsolationError as exc:
        ledger.verdict = "inconclusive"
        ledger.notes.append(f"singular index not measurable: {exc}")
        return ledger
    ledger.extra["singular_index"] = idx
    want = (0,) if kind == "fold" else (-1, 1)
    if idx not in want:
        ledger.verdict = "fail"
        ledger.notes.append(f"singular index {idx} not in {want}")
    return ledger


def fold_crossing_experiment(geom, z0: complex,
                             tol: Tolerances | None = None) -> CrossingLedger:
    """Cross the caustic at the fold image of z0 and compare censuses.

    The ledger records the stabilized magnitude, the single crossing event
    with observed deltas (total +2 toward the open side, one new zero in
    each adjacent face), the on-caustic census with exactly one singular
    record near z0, and that record's index 0.
    """
    geom = _as_geometry(geom, tol)
    tol = tol or geom.tol
    z0 = _refine_to_curve(geom.r, complex(z0))
    theta, _ = _branch_theta(geom, z0)
    model = local_model(geom.r, z0, theta, tol)
    if model.kind != "fold":
        return CrossingLedger(np.zeros(0, complex), [], [], "inconclusive",
                              [f"point {z0:.8g} classifies as {model.kind}, not fold"],
                              {"model": model})
    eta_c = complex(geom.r.eval(z0) - np.conj(z0))
    ledger = _experiment_ledger(geom, model, eta_c, "fold", tol)
    if ledger.verdict != "pass" or not ledger.events:
        return ledger
    ev = ledger.events[0]
    # the new pair must split across the two adjacent faces with opposite
    # orientations: per-face totals +1 each, dn_plus = dn_minus = direction
    fp, fm = _adjacent_faces(geom.partition, model)
    ok = (abs(ev.observed["dn"]) == 2
          and ev.observed["dn"] == 2 * ev.direction
          and ev.observed["dn_plus"] == ev.observed["dn_minus"] == ev.direction)
    if fp is not None and fm is not None:
        ledger.extra["faces"] = (fp.face_id, fm.face_id)
        pf = ev.observed["per_face"]
        ok = ok and pf.get(fp.face_id, 0) == ev.direction and pf.get(fm.face_id, 0) == ev.direction
    if not ok:
        ledger.verdict = "fail"
        ledger.notes.append(f"fold deltas off: {ev.observed}")
    return ledger


def cusp_crossing_experiment(geom, z0: complex | CuspPoint,
                             tol: Tolerances | None = None) -> CrossingLedger:
    """Cross the caustic along the cusp axis at the cusp image of z0.

    Verifies N(A+) and N(A-) each grow by exactly 1 toward the three-zero
    side, b_plus + b_minus = 1 at the caustic value, and the singular
    record's index is +1 or -1.  The attribution (b_plus, b_minus) is
    observational; sign(Im 1/d) is recorded alongside it.
    """
    geom = _as_geometry(geom, tol)
    tol = tol or geom.tol
    if isinstance(z0, CuspPoint):
        z0 = z0.z
    z0 = _refine_to_curve(geom.r, complex(z0))
    theta, _ = _branch_theta(geom, z0)
    model = local_model(geom.r, z0, theta, tol)
    if model.kind != "cusp":
        return CrossingLedger(np.zeros(0, complex), [], [], "inconclusive",
                              [f"point {z0:.8g} classifies as {model.kind}, not cusp"],
                              {"model": model})
    eta_c = complex(geom.r.eval(z0) - np.conj(z0))
    ledger = _experiment_ledger(geom, model, eta_c, "cusp", tol)
    ledger.extra["sign_im_dinv"] = model.sign_im_dinv
    if ledger.verdict != "pass" or not ledger.events:
        return ledger
    ev = ledger.events[0]
    fp, fm = _adjacent_faces(geom.partition, model)
    if fp is None or fm is None:
        ledger.verdict = "inconclusive"
        ledger.notes.append("adjacent faces not resolved at the cusp")
        return ledger
    ledger.extra["faces"] = (fp.face_id, fm.face_id)
    before, after = ledger.gaps[0], ledger.gaps[1]
    lo_tab, hi_tab = (before, after) if ev.direction > 0 else (after, before)
    ok = True
    bs = {}
    cen0 = geom.census(eta_c)
    mid_faces = _face_table(cen0)
    # b marks the adjacent face whose zero merges into the singular point
    # when the shift reaches the caustic from the one-zero side
    for fid, label in ((fp.face_id, "b_plus"), (fm.face_id, "b_minus")):
        n_lo = (lo_tab.per_face or {}).get(fid, (0, 0, 0))[0]
        n_hi = (hi_tab.per_face or {}).get(fid, (0, 0, 0))[0]
        n_mid = mid_faces.get(fid, (0, 0, 0))[0]
        ok = ok and (n_hi == n_lo + 1)
        bs[label] = n_lo - n_mid
    ledger.extra["b_plus"] = bs["b_plus"]
    ledger.extra["b_minus"] = bs["b_minus"]
    ok = ok and sorted(bs.values()) == [0, 1]
    if not ok:
        ledger.verdict = "fail"
        ledger.notes.append(
            f"cusp face counts off: observed {ev.observed}, b = {bs}"
        )
    return ledger


# ---------------------------------------------------------------------------
# regularity, extremality, count maps


def regularity_check(geom, tol: Tolerances | None = None):
    """True when the unshifted function has no singular zeros."""
    geom = _as_geometry(geom, tol)
    census = geom.census(0.0)
    return census.n_singular == 0 and not census.ambiguous, census


def extremal_check(geom, tol: Tolerances | None = None):
    """True when the unshifted count attains the sharp bound 5 deg(r) - 5."""
    geom = _as_geometry(geom, tol)
    census = geom.census(0.0)
    bound = 5 * geom.r.degree - 5
    return census.n == bound, census, bound


@dataclass
class CountRow:
    eta: complex
    n: int
    n_plus: int
    n_minus: int
    flags: str                   # J jittered, S singular record, A ambiguous
    caustic_dist: float


@dataclass
class CountMap:
    rows: list[CountRow]
    n_re: int
    n_im: int

    @property
    def levels(self) -> list[int]:
        return sorted({row.n for row in self.rows if "S" not in row.flags})

    def level_representatives(self) -> dict:
        """Per level, the sampled shift farthest from every caustic."""
        best: dict[int, CountRow] = {}
        for row in self.rows:
            if "S" in row.flags or "A" in row.flags:
                continue
            cur = best.get(row.n)
            if cur is None or row.caustic_dist > cur.caustic_dist:
                best[row.n] = row
        return {n: row.eta for n, row in best.items()}

    def to_csv(self) -> str:
        lines = ["re,im,N,N_plus,N_minus,flags"]
        for row in self.rows:
            lines.append(
                f"{row.eta.real!r},{row.eta.imag!r},{row.n},{row.n_plus},"
                f"{row.n_minus},{row.flags}"
            )
        return "\n".join(lines) + "\n"


def count_map(geom, re_lo: float, re_hi: float, im_lo: float, im_hi: float,
              n_re: int, n_im: int, tol: Tolerances | None = None) -> CountMap:
    """Zero counts on a shift grid; the map is constant on caustic faces.

    Grid points landing on a caustic are jittered once by 1e-6 of the cell
    size and flagged J; censuses with singular records or ambiguous
    candidates keep flags S and A.
    """
    geom = _as_geometry(geom, tol)
    xs = np.linspace(re_lo, re_hi, n_re)
    ys = np.linspace(im_lo, im_hi, n_im)
    cell = max((re_hi - re_lo) / max(n_re - 1, 1), (im_hi - im_lo) / max(n_im - 1, 1))
    etas = np.array([complex(x, y) for y in ys for x in xs])
    dist = geom.caustic_distance(etas)
    rows: list[CountRow] = []
    for eta, d in zip(etas, dist):
        flags = ""
        if d < 1e-9 * (1.0 + abs(eta)):
            eta = eta + 1e-6 * cell * (1.0 + 1.0j)
            d = float(geom.caustic_distance(eta)[0])
            flags += "J"
        cen = geom.census(complex(eta))
        if cen.n_singular:
            flags += "S"
        if cen.ambiguous:
            flags += "A"
        rows.append(CountRow(complex(eta), cen.n, cen.n_plus, cen.n_minus,
                             flags, float(d)))
    return CountMap(rows, n_re, n_im)


def representative_shifts(cmap: CountMap) -> dict:
    return cmap.level_representatives()


def sample_fold_points(geom, count: int, margin: float = 0.03,
                       tol: Tolerances | None = None) -> list[tuple[int, complex]]:
    """Deterministic fold sample: vertices away from every cusp.

    Returns (curve_id, z) pairs, round-robin over curves, evenly spaced in
    arclength among vertices whose cusp functional is comfortably nonzero.
    """
    geom = _as_geometry(geom, tol)
    pools = []
    for curve in geom.curves:
        arc = _geom.arclengths(curve.z)
        total = arc[-1]
        ok = np.abs(curve.cusp_value) > 0.25 * np.abs(curve.cusp_value).max()
        for ci in curve.cusp_indices:
            gap = np.abs(arc - arc[ci])
            ok &= np.minimum(gap, total - gap) > margin * total
        idx = np.nonzero(ok)[0]
        if idx.size:
            pools.append((curve.curve_id, curve, idx))
    picks: list[tuple[int, complex]] = []
    quota = [count // len(pools) + (1 if i < count % len(pools) else 0)
             for i in range(len(pools))]
    for (cid, curve, idx), q in zip(pools, quota):
        # even index strides with a half-stride offset; linspace endpoints
        # would land on the first and last eligible vertex, which sit next
        # to each other across the seam of a closed curve
        sel = idx[(np.arange(q) * len(idx) + len(idx) // 2) // max(q, 1) % len(idx)] if q else []
        picks.extend((cid, complex(curve.z[i])) for i in sel)
    return picks[:count]
