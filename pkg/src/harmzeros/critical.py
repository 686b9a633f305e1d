"""Critical curves of f(z) = r(z) - conj(z) and the face partition they cut.

The critical set is {z : |r'(z)| = 1}.  For non-degenerate functions
(r'' nonzero there) it is a finite union of disjoint smooth closed curves,
each traced here as the preimage of the unit circle under r': for a grid of
angles theta we solve r'(z) = e^(i theta) and link the solution branches by
nearest-neighbour assignment, halving the angle step adaptively whenever
the linking is ambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npp
from scipy.optimize import linear_sum_assignment

from . import _geom
from .algebra import RationalFn
from .config import DEFAULT_TOL, TAU, Tolerances
from .errors import DegenerateCriticalError, TracingError
from .roots import all_roots

__all__ = [
    "CriticalSample",
    "CriticalCurve",
    "Face",
    "RegionPartition",
    "trace_critical_curves",
    "check_nondegenerate",
    "tangent_direction",
    "cusp_functional",
    "build_partition",
    "curves_to_csv",
]

THETA_STEPS = 720
MIN_THETA_STEP = TAU / 2 ** 16


@dataclass(frozen=True)
class CriticalSample:
    z: complex
    theta: float          # in [0, 2*pi), r'(z) = e^(i theta)
    h: complex            # unit tangent of the critical curve at z
    cusp_value: float     # Re(r''(z) / r'(z)^(3/2)), branch-continuous
    is_cusp: bool


@dataclass
class CriticalCurve:
    """One closed critical curve as a struct-of-arrays polyline.

    z[0] == z[-1] within the curve tolerance; theta is the branch-continuous
    (unwrapped) angle with r'(z_k) = e^(i theta_k), strictly monotone along
    the stored order.  Orientation convention: the sense-preserving region
    (J_f > 0) lies on the left of the direction of traversal.
    """

    curve_id: int
    z: np.ndarray
    theta: np.ndarray
    tangent: np.ndarray
    cusp_value: np.ndarray
    cusp_indices: np.ndarray
    winding: int

    def __len__(self) -> int:
        return len(self.z)

    @property
    def theta_mod(self) -> np.ndarray:
        return np.mod(self.theta, TAU)

    def sample(self, i: int) -> CriticalSample:
        return CriticalSample(
            z=complex(self.z[i]),
            theta=float(np.mod(self.theta[i], TAU)),
            h=complex(self.tangent[i]),
            cusp_value=float(self.cusp_value[i]),
            is_cusp=bool(i in self.cusp_indices),
        )

    @property
    def points(self) -> list[CriticalSample]:
        return [self.sample(i) for i in range(len(self.z))]


def _derivative_coeff_pair(r: RationalFn) -> tuple[np.ndarray, np.ndarray]:
    return r.d1_num.coeffs, (r.q * r.q).coeffs


def _branch_refine(r: RationalFn, z: np.ndarray, w: np.ndarray, steps: int = 3) -> np.ndarray:
    """Newton steps for r'(z) = w along an analytic branch."""
    z = np.asarray(z, dtype=complex)
    for _ in range(steps):
        d1 = r.deriv1_many(z)
        d2 = r.deriv2_many(z)
        d2 = np.where(d2 == 0, 1e-300, d2)
        z = z - (d1 - w) / d2
    return z


def _preimages(r: RationalFn, theta: float, tol: Tolerances) -> np.ndarray:
    """All solutions of r'(z) = e^(i theta), pole artifacts removed."""
    num, den = _derivative_coeff_pair(r)
    w = np.exp(1j * theta)
    m = max(len(num), len(den))
    c = np.zeros(m, dtype=complex)
    c[: len(num)] += num
    c[: len(den)] -= w * den
    z = all_roots(c, tol=tol.root).roots
    if r.q.degree >= 1:
        qmag = np.abs(npp.polyval(z, r.q.coeffs))
        qscale = r.q.magnitude_at(z)
        z = z[qmag > 1e-8 * (qscale + 1e-300)]
    z = _branch_refine(r, z, w)
    order = np.lexsort((z.imag.round(10), z.real.round(10)))
    return z[order]


def _match(prev: np.ndarray, cur: np.ndarray):
    """Optimal pairing of two same-size root sets; returns (perm, dmax)."""
    cost = np.abs(prev[:, None] - cur[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(prev), dtype=int)
    perm[rows] = cols
    return perm, float(cost[rows, cols].max())


def _min_separation(z: np.ndarray) -> float:
    if len(z) < 2:
        return np.inf
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def trace_critical_curves(r: RationalFn, theta_steps: int = THETA_STEPS,
                          tol: Tolerances = DEFAULT_TOL) -> list[CriticalCurve]:
    """Trace every critical curve of r(z) - conj(z).

    Raises TracingError when branch linking stays ambiguous below the
    minimal angle step and DegenerateCriticalError when |r''| vanishes on
    the traced set.  Every returned polyline is closed, simple, and
    satisfies | |r'(z)| - 1 | < tol.curve at each vertex.
    """
    base = _preimages(r, 0.0, tol)
    nb = len(base)
    if nb == 0:
        raise TracingError("r'(z) = 1 has no solutions; no critical set found")
    thetas: list[float] = [0.0]
    rows: list[np.ndarray] = [base]

    def advance(theta_a: float, za: np.ndarray, theta_b: float, depth: int = 0) -> np.ndarray:
        zb = _preimages(r, theta_b, tol)
        if len(zb) == len(za):
            perm, dmax = _match(za, zb)
            if dmax <= max(0.45 * _min_separation(za), 100.0 * tol.curve):
                zb = zb[perm]
                thetas.append(theta_b)
                rows.append(zb)
                return zb
        if theta_b - theta_a <= MIN_THETA_STEP:
            raise TracingError(
                f"branch linking ambiguous near theta = {theta_b:.8f} "
                f"({len(za)} vs {len(zb)} branches)"
            )
        zm = advance(theta_a, za, 0.5 * (theta_a + theta_b), depth + 1)
        return advance(0.5 * (theta_a + theta_b), zm, theta_b, depth + 1)

    za = base
    for k in range(1, theta_steps + 1):
        za = advance(thetas[-1], za, TAU * k / theta_steps)

    sigma, dmax = _match(rows[-1], rows[0])
    if dmax > max(0.45 * _min_separation(rows[-1]), 100.0 * tol.curve):
        raise TracingError("sweep did not close onto the initial branch set")

    grid = np.array(thetas)
    table = np.vstack(rows)          # rows: theta index, cols: branch
    nt = len(grid)

    curves: list[CriticalCurve] = []
    seen: set[int] = set()
    for start in range(nb):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        nxt = int(sigma[start])
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = int(sigma[nxt])
        zs: list[np.ndarray] = []
        ts: list[np.ndarray] = []
        for lap, branch in enumerate(cycle):
            zs.append(table[: nt - 1, branch])
            ts.append(grid[: nt - 1] + TAU * lap)
        zs.append(table[nt - 1 :, cycle[-1]])           # closing vertex from the sweep end
        ts.append(grid[nt - 1 :] + TAU * (len(cycle) - 1))
        z = np.concatenate(zs)
        theta = np.concatenate(ts)
        curves.append(_finish_curve(r, len(curves), z, theta, tol))

    _validate_family(r, curves, tol)
    return curves


def _finish_curve(r: RationalFn, curve_id: int, z: np.ndarray, theta: np.ndarray,
                  tol: Tolerances) -> CriticalCurve:
    # final on-curve polish and the tolerance gate
    z = _branch_refine(r, z, np.exp(1j * theta), steps=2)
    z[-1] = z[0]        # bitwise closure so the seam vertex is never split
    resid = np.abs(np.abs(r.deriv1_many(z)) - 1.0)
    if resid.max() > tol.curve:
        raise TracingError(f"curve {curve_id}: sample off |r'| = 1 by {resid.max():.3e}")

    # orientation: put the sense-preserving side on the left of travel
    k = int(np.argmax(np.abs(np.diff(z))))
    t_dir = (z[k + 1] - z[k]) / abs(z[k + 1] - z[k])
    probe = 1e-5 * max(1.0, abs(z[k]))
    left = z[k] + probe * 1j * t_dir
    d1 = r.deriv1_many(np.array([left]))[0]
    if (d1 * np.conj(d1)).real - 1.0 < 0:
        z = z[::-1].copy()
        theta = theta[::-1].copy()

    d1 = r.deriv1_many(z)
    d2 = r.deriv2_many(z)
    if np.abs(d2).min() <= tol.degenerate:
        raise DegenerateCriticalError(
            f"curve {curve_id}: |r''| = {np.abs(d2).min():.3e} on the critical set"
        )
    prod = d1 * np.conj(d2)
    tangent = 1j * prod / np.abs(prod)
    cusp_value = (d2 * np.exp(-1.5j * theta)).real

    z, theta, tangent, cusp_value, cusp_idx = _insert_cusps(
        r, z, theta, tangent, cusp_value, tol
    )
    winding = int(round((theta[-1] - theta[0]) / TAU))
    curve = CriticalCurve(
        curve_id=curve_id,
        z=z,
        theta=theta,
        tangent=tangent,
        cusp_value=cusp_value,
        cusp_indices=cusp_idx,
        winding=winding,
    )
    _validate_curve(curve, tol)
    return curve


def cusp_functional(r: RationalFn, z0: complex, theta: float | None = None) -> float:
    """Re(r''(z0) / r'(z0)^(3/2)).

    The square root branch is fixed by theta with r'(z0) = e^(i theta);
    when omitted the principal angle is used.  Zeros of this functional on
    the critical set are exactly the cusp preimages; the global sign is a
    branch choice and only sign changes carry meaning.
    """
    d1 = r.deriv1(z0)
    if theta is None:
        theta = float(np.angle(d1)) % TAU
    return float((r.deriv2(z0) * np.exp(-1.5j * theta)).real)


def _insert_cusps(r, z, theta, tangent, cusp_value, tol):
    n = len(z)
    direction = 1.0 if theta[-1] >= theta[0] else -1.0
    cusps: list[tuple[int, float, complex]] = []    # (segment index, theta*, z*)
    atol = tol.cusp * (1.0 + np.abs(r.deriv2_many(z)))

    exact = np.abs(cusp_value) <= atol
    for i in range(n - 1):
        if exact[i]:
            continue
        if exact[i + 1] or cusp_value[i] * cusp_value[i + 1] >= 0:
            continue
        tl, th = float(theta[i]), float(theta[i + 1])
        zl, zh = complex(z[i]), complex(z[i + 1])
        vl = float(cusp_value[i])
        zm, tm = zl, tl
        while abs(zh - zl) > tol.cusp_arc and abs(th - tl) > 1e-15:
            tm = 0.5 * (tl + th)
            zm = complex(_branch_refine(r, np.array([0.5 * (zl + zh)]),
                                        np.array([np.exp(1j * tm)]), steps=12)[0])
            vm = float((r.deriv2(zm) * np.exp(-1.5j * tm)).real)
            if vm == 0.0:
                break
            if (vm > 0) == (vl > 0):
                tl, zl, vl = tm, zm, vm
            else:
                th, zh = tm, zm
        cusps.append((i, tm, zm))
    # grid samples that are themselves numerically on a cusp
    for i in np.nonzero(exact[: n - 1])[0]:
        cusps.append((int(i) - 1 if i > 0 else 0, float(theta[i]), complex(z[i])))

    if not cusps:
        return z, theta, tangent, cusp_value, np.zeros(0, dtype=int)

    cusps.sort(key=lambda c: direction * c[1])
    z_list, t_list = list(z), list(theta)
    idx_out: list[int] = []
    offset = 0
    for seg, tm, zm in cusps:
        # place by theta order inside the (possibly grown) arrays
        pos = seg + 1 + offset
        if any(abs(zm - z_list[j]) < 10 * tol.cusp_arc for j in
               (pos - 1, min(pos, len(z_list) - 1))):
            # the cusp coincides with an existing vertex: mark in place
            j = pos - 1 if abs(zm - z_list[pos - 1]) <= abs(zm - z_list[min(pos, len(z_list) - 1)]) else min(pos, len(z_list) - 1)
            if j not in idx_out:
                idx_out.append(j)
            continue
        z_list.insert(pos, zm)
        t_list.insert(pos, tm)
        idx_out.append(pos)
        offset += 1

    z = np.asarray(z_list, dtype=complex)
    theta = np.asarray(t_list)
    d1 = r.deriv1_many(z)
    d2 = r.deriv2_many(z)
    prod = d1 * np.conj(d2)
    tangent = 1j * prod / np.abs(prod)
    cusp_value = (d2 * np.exp(-1.5j * theta)).real
    return z, theta, tangent, cusp_value, np.asarray(sorted(idx_out), dtype=int)


def _validate_curve(curve: CriticalCurve, tol: Tolerances) -> None:
    z = curve.z
    scale = float(np.abs(z).max())
    if abs(z[0] - z[-1]) > max(tol.curve, 1e-12 * scale) * 10:
        raise TracingError(f"curve {curve.curve_id} does not close: gap {abs(z[0]-z[-1]):.3e}")
    if _geom.segments_intersect_any(z):
        raise TracingError(f"curve {curve.curve_id} self-intersects")
    # the stored cusp_value is branch-continuous in theta, so the endpoint
    # signs already carry the monodromy (-1)^winding of the square root:
    # sign changes, and hence cusps, must match both parities
    v0, v1 = curve.cusp_value[0], curve.cusp_value[-1]
    if abs(v0) > 0 and abs(v1) > 0:
        seam = 0 if (v0 > 0) == (v1 > 0) else 1
        if (len(curve.cusp_indices) - seam) % 2 != 0 or seam != abs(curve.winding) % 2:
            raise TracingError(
                f"curve {curve.curve_id}: cusp parity broken "
                f"({len(curve.cusp_indices)} cusps, seam {seam}, "
                f"winding {curve.winding})"
            )


def _validate_family(r: RationalFn, curves: list[CriticalCurve], tol: Tolerances) -> None:
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            gap = _geom.min_polyline_gap(curves[i].z, curves[j].z)
            if gap < 10 * tol.curve:
                raise TracingError(f"curves {i} and {j} not disjoint (gap {gap:.3e})")


def check_nondegenerate(r: RationalFn, curves: list[CriticalCurve],
                        tol: Tolerances = DEFAULT_TOL) -> tuple[bool, float]:
    """Minimum of |r''| over all curve samples against the degeneracy floor."""
    m = min(float(np.abs(r.deriv2_many(c.z)).min()) for c in curves)
    return m > tol.degenerate, m


def tangent_direction(r: RationalFn, z0: complex) -> complex:
    """Unit tangent h = i r'(z0) conj(r''(z0)) / |...| of the critical curve.

    J_f grows quadratically along z0 + s h and linearly along the normal.
    """
    prod = r.deriv1(z0) * np.conj(r.deriv2(z0))
    if prod == 0:
        raise DegenerateCriticalError(f"tangent undefined at {z0}: r' r'' = 0")
    return complex(1j * prod / abs(prod))


@dataclass(frozen=True)
class Face:
    face_id: int
    signature: frozenset
    orientation: int
    representative: complex
    unbounded: bool


class RegionPartition:
    """Faces cut out of the plane by the critical curves.

    Disjoint closed curves nest; every bounded face is "inside curve c,
    outside c's children" for exactly one c, identified by the signature of
    curves containing it.  Membership queries use even-odd inclusion with a
    decimated fast path and an on-boundary distance band.
    """

    def __init__(self, curves: list[CriticalCurve], faces: list[Face],
                 tol: Tolerances, contains: np.ndarray, depth: np.ndarray):
        self.curves = curves
        self.faces = faces
        self.tol = tol
        self._contains = contains
        self._depth = depth
        self._face_by_curve = {}
        for f in faces:
            if not f.unbounded:
                self._face_by_curve[max(f.signature, key=lambda c: depth[c])] = f
        self._poly = [c.z for c in curves]
        self._dec = []
        self._dec_err = []
        for z in self._poly:
            step = max(1, len(z) // 600)
            dec = np.concatenate([z[:-1:step], z[-1:]])
            err = 0.0
            for k in range(0, len(z), 4096):
                err = max(err, float(_geom.point_segment_distance(z[k:k + 4096], dec).max()))
            self._dec.append(dec)
            self._dec_err.append(err)

    @property
    def unbounded_face(self) -> Face:
        return next(f for f in self.faces if f.unbounded)

    def face_of(self, z: complex):
        """Face containing z, or None when z lies in the on-boundary band."""
        return self.face_of_many(np.array([z]))[0]

    def face_of_many(self, zs) -> list:
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        n = len(zs)
        inside = np.zeros((len(self.curves), n), dtype=bool)
        boundary = np.zeros(n, dtype=bool)
        for ci, dec in enumerate(self._dec):
            d = _geom.point_segment_distance(zs, dec)
            margin = self._dec_err[ci] + self.tol.boundary
            near = d <= margin
            inside[ci] = _geom.point_in_polygon(zs, dec)
            if np.any(near):
                idx = np.nonzero(near)[0]
                dfull = _geom.point_segment_distance(zs[idx], self._poly[ci])
                boundary[idx] |= dfull < self.tol.boundary
                inside[ci, idx] = _geom.point_in_polygon(zs[idx], self._poly[ci])
        out: list = []
        for k in range(n):
            if boundary[k]:
                out.append(None)
                continue
            containing = np.nonzero(inside[:, k])[0]
            if containing.size == 0:
                out.append(self.unbounded_face)
            else:
                innermost = containing[np.argmax(self._depth[containing])]
                out.append(self._face_by_curve[int(innermost)])
        return out


def _interior_representative(curve: CriticalCurve, children: list[CriticalCurve],
                             all_curves: list[CriticalCurve], tol: Tolerances) -> complex:
    z = curve.z
    diam = max(z.real.max() - z.real.min(), z.imag.max() - z.imag.min())
    n = len(z) - 1
    poly = z
    for frac in (0.03, 0.008, 0.002, 0.0005):
        eps = max(frac * diam, 4 * tol.boundary)
        for i in range(0, n, max(1, n // 24)):
            t = z[i + 1] - z[i]
            if t == 0:
                continue
            nrm = 1j * t / abs(t)
            for side in (1.0, -1.0):
                cand = z[i] + side * eps * nrm
                if not _geom.point_in_polygon(np.array([cand]), poly)[0]:
                    continue
                if any(_geom.point_in_polygon(np.array([cand]), ch.z)[0] for ch in children):
                    continue
                if any(float(_geom.point_segment_distance(np.array([cand]), c.z)[0]) < 3 * tol.boundary
                       for c in all_curves):
                    continue
                return complex(cand)
    raise TracingError(f"no interior representative for curve {curve.curve_id}")


def build_partition(r: RationalFn, curves: list[CriticalCurve],
                    tol: Tolerances = DEFAULT_TOL) -> RegionPartition:
    """Partition the plane into faces bounded by the critical curves."""
    nc = len(curves)
    contains = np.zeros((nc, nc), dtype=bool)   # contains[i, j]: curve i strictly inside curve j
    for i in range(nc):
        for j in range(nc):
            if i != j:
                contains[i, j] = bool(_geom.point_in_polygon(
                    np.array([curves[i].z[0]]), curves[j].z)[0])
    depth = contains.sum(axis=1)

    faces: list[Face] = []
    # unbounded face: far outside every curve
    span = max(float(np.abs(c.z).max()) for c in curves) if curves else 1.0
    far = complex(3.0 * span + 7.0, 1.0 + 2.0 * span)
    d1 = r.deriv1_many(np.array([far]))[0]
    orient_far = 1 if (d1 * np.conj(d1)).real - 1.0 > 0 else -1
    faces.append(Face(0, frozenset(), orient_far, far, True))

    order = sorted(range(nc), key=lambda c: (int(depth[c]), c))
    for fid, c in enumerate(order, start=1):
        children = [curves[i] for i in range(nc)
                    if contains[i, c] and depth[i] == depth[c] + 1]
        rep = _interior_representative(curves[c], children, curves, tol)
        d1 = r.deriv1_many(np.array([rep]))[0]
        orient = 1 if (d1 * np.conj(d1)).real - 1.0 > 0 else -1
        sig = frozenset({c} | {j for j in range(nc) if contains[c, j]})
        faces.append(Face(fid, sig, orient, rep, False))

    return RegionPartition(curves, faces, tol, contains, depth)


def curves_to_csv(curves: list[CriticalCurve]) -> str:
    """CSV dump: curve_id,idx,theta,re,im,is_cusp,cusp_value (LF endings)."""
    lines = ["curve_id,idx,theta,re,im,is_cusp,cusp_value"]
    for c in curves:
        cusps = set(int(i) for i in c.cusp_indices)
        tm = c.theta_mod
        for i in range(len(c.z)):
            lines.append(
                f"{c.curve_id},{i},{float(tm[i])!r},{float(c.z[i].real)!r},"
                f"{float(c.z[i].imag)!r},{int(i in cusps)},{float(c.cusp_value[i])!r}"
            )
    return "\n".join(lines) + "\n"
