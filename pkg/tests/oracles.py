"""Independent cross-checks used by the test suite.

Both oracles avoid the library's own solution paths on purpose.  The census
oracle finds zeros of r(z) - conj(z) - eta by damped Newton iteration on the
real 2x2 system from a large pile of starting points, working directly on
coefficient arrays with numpy polyval.  The face oracle counts connected
regions of the Jacobian sign map on a pixel grid with scipy.ndimage.

Neither touches the elimination polynomial, the curve tracer, or the
partition code, so agreement is evidence rather than tautology.
"""

import numpy as np
from numpy.polynomial import polynomial as npp
from scipy import ndimage


def _rational_parts(p, q):
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    return p, q, npp.polyder(p), npp.polyder(q)


def _eval_r(z, p, q):
    with np.errstate(all="ignore"):
        return npp.polyval(z, p) / npp.polyval(z, q)


def _eval_dr(z, p, q, dp, dq):
    with np.errstate(all="ignore"):
        qv = npp.polyval(z, q)
        return (npp.polyval(z, dp) * qv - npp.polyval(z, p) * npp.polyval(z, dq)) / qv**2


def default_starts(p, q, eta=0.0, box=3.0, grid_n=41, rings=(0.02, 0.1, 0.4), ring_n=24):
    """Box grid, circles around each pole, a far circle, far-field seeds.

    When deg p = deg q + 1 the function behaves like a*z + c at infinity
    and conj(z) = a*z + (c - eta) has the exact solution
    z = (conj(b) + conj(a)*b) / (1 - |a|^2), b = c - eta, which can sit
    far outside any fixed search box when |a| is close to 1.  A ring is
    seeded there, and at conj(r(inf) - eta) for deg p <= deg q.
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    xs = np.linspace(-box, box, grid_n)
    starts = [(xs[None, :] + 1j * xs[:, None]).ravel()]
    ang = np.exp(2j * np.pi * np.arange(ring_n) / ring_n)
    poles = npp.polyroots(q) if len(q) > 1 else np.array([])
    dq_ = npp.polyder(q)
    d2q_ = npp.polyder(q, 2)
    dp_ = npp.polyder(p)
    for w in poles:
        for rad in rings:
            starts.append(w + rad * ang)
        # first-order location of the zero captured by this pole: with
        # residue m and regular part reg, m/(z - w) = eta + conj(w) - reg
        q1 = npp.polyval(w, dq_)
        if abs(q1) > 1e-10:
            m = npp.polyval(w, p) / q1
            reg = (npp.polyval(w, dp_) * q1
                   - npp.polyval(w, p) * npp.polyval(w, d2q_) / 2.0) / q1**2
            den_ = eta + np.conj(w) - reg
            if abs(den_) > 1e-12:
                delta = m / den_
                if np.isfinite(delta) and abs(delta) > 0:
                    starts.append(w + delta + 0.3 * abs(delta) * ang)
    starts.append(4.0 * box * ang)
    if len(p) == len(q) + 1:
        a = p[-1] / q[-1]
        c = (p[-2] - a * q[-2]) / q[-1] if len(q) > 1 else p[-2] / q[-1]
        den = 1.0 - abs(a) ** 2
        if abs(den) > 1e-12:
            b = c - eta
            z_far = (np.conj(b) + np.conj(a) * b) / den
            starts.append(z_far + 0.05 * (1.0 + abs(z_far)) * ang)
    elif len(p) <= len(q):
        a = p[-1] / q[-1] if len(p) == len(q) else 0.0
        z_far = np.conj(a - eta)
        starts.append(z_far + 0.3 * ang)
    return np.concatenate(starts)


def census_oracle(p, q, eta, box=3.0, grid_n=41, max_iter=80,
                  res_tol=1e-9, dedupe=1e-7):
    """All isolated zeros of r(z) - conj(z) - eta by multistart Newton.

    p, q are ascending coefficient arrays of r = p/q.  Returns a list of
    (z, sign) pairs sorted by (re, im), where sign is +1 on the
    sense-preserving side of the critical set and -1 on the reversing side.

    The Newton step solves a*dz + b*conj(dz) = -F with a = r'(z), b = -1,
    which gives dz = -(conj(a)*F + conj(F)) / (|a|^2 - 1).  Steps longer
    than 0.5 are clipped so starts near poles do not fly off.
    """
    p, q, dp, dq = _rational_parts(p, q)
    eta = complex(eta)
    z = default_starts(p, q, eta=eta, box=box, grid_n=grid_n).astype(complex)
    for _ in range(max_iter):
        a = _eval_dr(z, p, q, dp, dq)
        F = _eval_r(z, p, q) - np.conj(z) - eta
        den = np.abs(a) ** 2 - 1.0
        with np.errstate(all="ignore"):
            step = -(np.conj(a) * F + np.conj(F)) / den
        bad = ~np.isfinite(step) | (np.abs(den) < 1e-13)
        step = np.where(bad, 0.0, step)
        with np.errstate(all="ignore"):
            mag = np.abs(step)
            step = np.where(mag > 0.5, step * (0.5 / np.where(mag > 0, mag, 1.0)), step)
        z = z + step

    F = _eval_r(z, p, q) - np.conj(z) - eta
    a = _eval_dr(z, p, q, dp, dq)
    den = np.abs(a) ** 2 - 1.0
    scale = 1.0 + np.abs(z)
    keep = np.isfinite(F) & (np.abs(F) < res_tol * scale) & (np.abs(den) > 1e-8)
    zs, signs = z[keep], np.sign(den[keep])

    out = []
    for zz, ss in zip(zs, signs):
        hit = False
        for k, (zo, so) in enumerate(out):
            if abs(zz - zo) < dedupe * (1.0 + abs(zo)):
                hit = True
                break
        if not hit:
            out.append((complex(zz), int(ss)))
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return out


def census_counts(p, q, eta, **kw):
    """(N, N_plus, N_minus) from the multistart oracle."""
    zs = census_oracle(p, q, eta, **kw)
    npl = sum(1 for _, s in zs if s > 0)
    return len(zs), npl, len(zs) - npl


def jacobian_signmap(p, q, box=1.6, n=701):
    """Sign of |r'|^2 - 1 on an n x n pixel grid over [-box, box]^2."""
    p, q, dp, dq = _rational_parts(p, q)
    xs = np.linspace(-box, box, n)
    Z = xs[None, :] + 1j * xs[:, None]
    a = _eval_dr(Z, p, q, dp, dq)
    with np.errstate(all="ignore"):
        J = np.abs(a) ** 2 - 1.0
    # exact pole hits give nan; the Jacobian blows up positive near poles
    J = np.where(np.isfinite(J), J, 1.0)
    return np.where(J >= 0, 1, -1)


def face_count_oracle(p, q, box=1.6, n=701):
    """Number of connected faces of {|r'| != 1} seen on the pixel grid.

    Counts 4-connected components of each sign separately; diagonal
    connectivity would leak across a one-pixel-wide curve.  Returns
    (total, n_positive, n_negative).  The box must contain every critical
    curve or the answer is meaningless.
    """
    sign = jacobian_signmap(p, q, box=box, n=n)
    _, n_pos = ndimage.label(sign > 0)
    _, n_neg = ndimage.label(sign < 0)
    return n_pos + n_neg, n_pos, n_neg


def curve_crossing_oracle(p, q, x0, y0, x1, y1, n=4096):
    """Sign changes of |r'| - 1 along a straight segment.

    Each transversal pass through a critical curve flips the sign once, so
    this counts curve crossings independently of the tracer.
    """
    p, q, dp, dq = _rational_parts(p, q)
    t = np.linspace(0.0, 1.0, n)
    z = (x0 + 1j * y0) * (1 - t) + (x1 + 1j * y1) * t
    a = _eval_dr(z, p, q, dp, dq)
    with np.errstate(all="ignore"):
        g = np.abs(a) - 1.0
    g = np.where(np.isfinite(g), g, 1.0)
    s = np.where(g >= 0, 1, -1)
    return int(np.sum(s[:-1] != s[1:]))
