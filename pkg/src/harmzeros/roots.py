"""Simultaneous polynomial root solving and local Newton refinement.

all_roots runs the Aberth-Ehrlich iteration from a Newton-polygon initial
configuration; companion-matrix eigenvalue solving is deliberately not used.
newton_polish refines zeros of the full harmonic map f_eta as a system of
two real equations in (Re z, Im z).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npp

from .config import DEFAULT_TOL, Tolerances

__all__ = ["RootSet", "PolishResult", "all_roots", "newton_polish"]

MAX_SIMULTANEOUS_ITER = 200
MAX_POLISH_ITER = 50


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray          # all complex roots, multiplicity as repetition
    cond: np.ndarray           # per-root condition estimates
    iterations: int
    converged: bool


def _initial_points(c: np.ndarray) -> np.ndarray:
    """Start points on circles whose radii come from the upper convex hull
    of (k, log |c_k|), one circle per hull edge."""
    n = len(c) - 1
    mags = np.abs(c)
    ks = np.nonzero(mags)[0]
    logs = np.log(mags[ks])
    # upper hull, left to right
    hull: list[int] = []
    for i in range(len(ks)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (ks[i1] - ks[i0]) * (logs[i] - logs[i0]) - (ks[i] - ks[i0]) * (logs[i1] - logs[i0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    pts = []
    for e in range(len(hull) - 1):
        k0, k1 = ks[hull[e]], ks[hull[e + 1]]
        m = k1 - k0
        radius = (mags[k0] / mags[k1]) ** (1.0 / m)
        phase = 2.0 * np.pi * (np.arange(m) + 0.5 * e) / m + 0.7 + 2.0 * np.pi * k0 / max(n, 1)
        pts.append(radius * np.exp(1j * phase))
    z = np.concatenate(pts) if pts else np.zeros(0, dtype=complex)
    if len(z) != n:  # hull lost points to exact cancellations; pad on a safe circle
        radius = 1.0 + mags[:-1].max() / mags[-1]
        extra = n - len(z)
        z = np.concatenate([z, radius * np.exp(2j * np.pi * (np.arange(extra) + 0.25) / max(extra, 1))])
    return z


def all_roots(p, tol: float = 1e-12) -> RootSet:
    """All complex roots of a polynomial given by ascending coefficients.

    The iteration updates every root simultaneously; roots are frozen once
    their correction or backward error is below tolerance.  Multiple roots
    converge as clusters of radius roughly tol**(1/multiplicity).
    """
    c = np.atleast_1d(np.asarray(getattr(p, "coeffs", p), dtype=complex)).copy()
    if c.size < 2:
        raise ValueError("need degree >= 1")
    scale = np.abs(c).max()
    if scale == 0:
        raise ValueError("zero polynomial has no root set")
    c /= scale
    # drop numerically absent leading coefficients, then exact roots at 0
    top = len(c) - 1
    while top > 0 and abs(c[top]) < 1e-14:
        top -= 1
    c = c[: top + 1]
    if len(c) < 2:
        return RootSet(np.zeros(0, complex), np.zeros(0), 0, True)
    nz_low = int(np.nonzero(c)[0][0])
    zeros_at_origin = nz_low
    c = c[nz_low:]
    n = len(c) - 1
    if n == 0:
        roots = np.zeros(zeros_at_origin, dtype=complex)
        return RootSet(roots, np.zeros(zeros_at_origin), 0, True)

    dc = npp.polyder(c)
    z = _initial_points(c)
    frozen = np.zeros(n, dtype=bool)
    iters = 0
    for iters in range(1, MAX_SIMULTANEOUS_ITER + 1):
        pv = npp.polyval(z, c)
        dv = npp.polyval(z, dc)
        pscale = npp.polyval(np.abs(z), np.abs(c))
        frozen |= np.abs(pv) <= 8.0 * n * np.finfo(float).eps * pscale
        if frozen.all():
            break
        tiny = dv == 0
        if np.any(tiny):
            z = np.where(tiny, z * (1 + 1e-8) + 1e-8, z)
            continue
        newton = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = (1.0 / diff).sum(axis=1)
        denom = 1.0 - newton * s
        denom = np.where(denom == 0, 1e-30, denom)
        w = newton / denom
        w[frozen] = 0.0
        z = z - w
        active = ~frozen
        if np.all(np.abs(w[active]) <= tol * (1.0 + np.abs(z[active]))):
            break

    # per-root Newton polish (stops on stall, which multiple roots will do)
    for _ in range(MAX_POLISH_ITER):
        pv = npp.polyval(z, c)
        dv = npp.polyval(z, dc)
        ok = dv != 0
        step = np.where(ok, pv / np.where(ok, dv, 1.0), 0.0)
        nz = z - step
        better = np.abs(npp.polyval(nz, c)) <= np.abs(pv)
        z = np.where(better, nz, z)
        if not np.any(better & (np.abs(step) > 1e-16 * (1 + np.abs(z)))):
            break

    pv = npp.polyval(z, c)
    dv = npp.polyval(z, dc)
    pscale = npp.polyval(np.abs(z), np.abs(c))
    backward = np.abs(pv) / (pscale + 1e-300)
    with np.errstate(divide="ignore"):
        cond = pscale / np.maximum(np.abs(dv) * np.maximum(np.abs(z), 1e-300), 1e-300)
    converged = bool(np.all(backward < 1e-10))
    roots = np.concatenate([z, np.zeros(zeros_at_origin, dtype=complex)])
    cond = np.concatenate([cond, np.full(zeros_at_origin, 1.0)])
    order = np.lexsort((roots.imag, roots.real))
    return RootSet(roots[order], cond[order], iters, converged)


@dataclass(frozen=True)
class PolishResult:
    z: complex
    residual: float
    converged: bool
    near_critical: bool
    iterations: int


def newton_polish(f, z0: complex, tol: Tolerances = DEFAULT_TOL,
                  max_iter: int = MAX_POLISH_ITER) -> PolishResult:
    """Newton iteration for f_eta(z) = 0 in the two real variables.

    The 2x2 real Jacobian follows from the derivative pair (r'(z), -1); its
    determinant is J_f(z) = |r'(z)|^2 - 1, so steps blow up on the critical
    set.  When |J_f| falls below the singular tolerance the best iterate so
    far is returned flagged near_critical instead of diverging.
    """
    z = complex(z0)
    best = z
    best_res = np.inf
    near_critical = False
    it = 0
    for it in range(1, max_iter + 1):
        try:
            fv = f.eval(z)
            a = f.wirtinger(z)
        except Exception:
            break
        res = abs(fv)
        if res < best_res:
            best, best_res = z, res
        scale = 1.0 + abs(z) + abs(f.eta)
        if res <= 1e-15 * scale:
            break
        det = (a * np.conj(a)).real - 1.0
        if abs(det) <= tol.singular:
            near_critical = True
            break
        # solve a*dz + b*conj(dz) = -f with b = -1
        dz = (np.conj(a) * (-fv) - np.conj(fv)) / det
        if not np.isfinite(dz):
            break
        if abs(dz) > 10.0 * (1.0 + abs(z)):
            dz *= (1.0 + abs(z)) / abs(dz)  # damp wild steps away from the basin
        z = z + dz
        if abs(dz) <= 1e-16 * (1.0 + abs(z)):
            break
    scale = 1.0 + abs(best) + abs(f.eta)
    return PolishResult(
        z=best,
        residual=best_res,
        converged=bool(best_res <= tol.res * scale),
        near_critical=near_critical,
        iterations=it,
    )
