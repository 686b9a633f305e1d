"""Complex polynomials, rational functions and constant-shifted harmonic maps.

The objects here model f_eta(z) = r(z) - conj(z) - eta for a rational
r = p/q with deg(r) = max(deg p, deg q) >= 2.  Coefficients are stored in
ascending degree order as complex128 and are never rescaled behind the
caller's back; root solving normalizes internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npp

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    CommonFactorError,
    EvalOverflowError,
    InputError,
    NotAdmissibleError,
    PoleEvaluationError,
    DegenerateEliminationError,
)

__all__ = [
    "ComplexPoly",
    "RationalFn",
    "ShiftedFunction",
    "Pole",
    "conj_reflect",
    "elimination_poly",
    "point_mass_rational",
    "rational_from_json",
    "max_zero_count",
]


def _as_coeffs(c) -> np.ndarray:
    a = np.atleast_1d(np.asarray(c, dtype=complex))
    if a.ndim != 1 or a.size == 0:
        raise ValueError("coefficients must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(a)):
        raise ValueError("coefficients must be finite")
    # trim exact-zero leading (highest degree) coefficients only
    nz = np.nonzero(a)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return a[: nz[-1] + 1].copy()


class ComplexPoly:
    """Dense univariate polynomial over C, ascending coefficients.

    The zero polynomial is the single coefficient [0] and reports
    degree -1 as an explicit sentinel.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = _as_coeffs(coeffs)
        self.coeffs.flags.writeable = False

    @property
    def degree(self) -> int:
        if self.coeffs.size == 1 and self.coeffs[0] == 0:
            return -1
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.degree < 0

    def __repr__(self) -> str:
        return f"ComplexPoly({self.coeffs.tolist()!r})"

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Horner evaluation; raises EvalOverflowError when the result
        leaves the finite double range."""
        scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
        with np.errstate(over="ignore", invalid="ignore"):
            v = npp.polyval(np.asarray(z, dtype=complex), self.coeffs)
        if not np.all(np.isfinite(np.atleast_1d(v))):
            raise EvalOverflowError(f"polynomial evaluation overflowed (degree {self.degree})")
        return complex(v) if scalar else v

    def derivative(self) -> "ComplexPoly":
        if self.degree <= 0:
            return ComplexPoly([0.0])
        return ComplexPoly(npp.polyder(self.coeffs))

    def __add__(self, other: "ComplexPoly") -> "ComplexPoly":
        return ComplexPoly(npp.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other: "ComplexPoly") -> "ComplexPoly":
        return ComplexPoly(npp.polysub(self.coeffs, other.coeffs))

    def __mul__(self, other) -> "ComplexPoly":
        if isinstance(other, ComplexPoly):
            return ComplexPoly(npp.polymul(self.coeffs, other.coeffs))
        return ComplexPoly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def magnitude_at(self, z):
        """sum_k |c_k| |z|^k, the conditioning scale of eval at z."""
        return npp.polyval(np.abs(np.asarray(z, dtype=complex)), np.abs(self.coeffs))


def conj_reflect(p: ComplexPoly) -> ComplexPoly:
    """p*(w) := conj(p(conj w)), i.e. the coefficient-conjugated polynomial."""
    return ComplexPoly(np.conj(p.coeffs))


def _sylvester_log_resultant(p: np.ndarray, q: np.ndarray):
    """log |Res(p, q)| via the Sylvester matrix, with a relative scale."""
    m, n = len(p) - 1, len(q) - 1
    s = np.zeros((m + n, m + n), dtype=complex)
    # rows of p (descending convention inside the matrix)
    pd, qd = p[::-1], q[::-1]
    for i in range(n):
        s[i, i : i + m + 1] = pd
    for i in range(m):
        s[n + i, i : i + n + 1] = qd
    sign, logdet = np.linalg.slogdet(s)
    log_scale = n * math.log(float(np.linalg.norm(p))) + m * math.log(float(np.linalg.norm(q)))
    return (-math.inf if sign == 0 else float(logdet)), log_scale


@dataclass(frozen=True)
class Pole:
    z: complex
    multiplicity: int


class RationalFn:
    """r = p/q with cached derivative numerators and located poles.

    A nonconstant common factor of p and q (resultant below the relative
    gcd tolerance) is treated as an input error and rejected, never
    silently removed.
    """

    def __init__(self, p, q, tol: Tolerances = DEFAULT_TOL):
        self.p = p if isinstance(p, ComplexPoly) else ComplexPoly(p)
        self.q = q if isinstance(q, ComplexPoly) else ComplexPoly(q)
        self.tol = tol
        if self.q.is_zero:
            raise ValueError("denominator is identically zero")
        if self.degree < 2:
            raise NotAdmissibleError(f"deg(r) = {self.degree} < 2")
        if self.p.degree >= 1 and self.q.degree >= 1:
            logres, logscale = _sylvester_log_resultant(self.p.coeffs, self.q.coeffs)
            if logres - logscale < math.log(tol.gcd):
                raise CommonFactorError(
                    "p and q share a root within the resultant tolerance; "
                    "reduce the fraction before constructing RationalFn"
                )
        # r'  = d1_num / q^2,  r'' = d2_num / q^3  (quotient rule, not reduced)
        dp, dq = self.p.derivative(), self.q.derivative()
        self.d1_num = dp * self.q - self.p * dq
        n1 = self.d1_num.derivative()
        self.d2_num = n1 * self.q - 2.0 * (self.d1_num * dq)
        self.d3_num = self.d2_num.derivative() * self.q - 3.0 * (self.d2_num * dq)
        self._q2 = self.q * self.q
        self._q3 = self._q2 * self.q
        self._q4 = self._q3 * self.q
        self.poles = self._locate_poles()

    @property
    def degree(self) -> int:
        return max(self.p.degree, self.q.degree)

    def _locate_poles(self) -> tuple[Pole, ...]:
        if self.q.degree < 1:
            return ()
        from .roots import all_roots  # deferred: roots consumes plain arrays

        rs = all_roots(self.q.coeffs, tol=self.tol.root)
        zs = sorted(rs.roots, key=lambda w: (round(w.real, 9), round(w.imag, 9)))
        poles: list[list] = []
        for z in zs:
            radius = 1e-6 * (1.0 + abs(z))
            for entry in poles:
                if abs(z - entry[0] / entry[1]) < radius:
                    entry[0] += z
                    entry[1] += 1
                    break
            else:
                poles.append([z, 1])
        return tuple(Pole(e[0] / e[1], e[1]) for e in poles)

    def nearest_pole(self, z: complex) -> Pole | None:
        if not self.poles:
            return None
        return min(self.poles, key=lambda v: abs(z - v.z))

    def _qcheck(self, z):
        qv = self.q.eval(z)
        qs = self.q.magnitude_at(z)
        bad = np.abs(qv) <= 1e-13 * (qs + 1e-300)
        return qv, bad

    def eval(self, z: complex) -> complex:
        """r(z); raises PoleEvaluationError on (numerical) poles."""
        qv, bad = self._qcheck(z)
        if np.any(bad):
            zb = complex(np.atleast_1d(np.asarray(z, dtype=complex))[np.argmax(np.atleast_1d(bad))])
            p = self.nearest_pole(zb)
            raise PoleEvaluationError(zb, None if p is None else p.z)
        return self.p.eval(z) / qv

    def deriv1(self, z: complex) -> complex:
        qv, bad = self._qcheck(z)
        if np.any(bad):
            raise PoleEvaluationError(z, getattr(self.nearest_pole(complex(np.ravel(z)[0])), "z", None))
        return self.d1_num.eval(z) / self._q2.eval(z)

    def deriv2(self, z: complex) -> complex:
        qv, bad = self._qcheck(z)
        if np.any(bad):
            raise PoleEvaluationError(z, getattr(self.nearest_pole(complex(np.ravel(z)[0])), "z", None))
        return self.d2_num.eval(z) / self._q3.eval(z)

    def deriv3(self, z: complex) -> complex:
        qv, bad = self._qcheck(z)
        if np.any(bad):
            raise PoleEvaluationError(z, getattr(self.nearest_pole(complex(np.ravel(z)[0])), "z", None))
        return self.d3_num.eval(z) / self._q4.eval(z)

    def eval_many(self, z: np.ndarray) -> np.ndarray:
        """Unchecked vectorized r(z) for grids; poles give inf/nan."""
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return npp.polyval(z, self.p.coeffs) / npp.polyval(z, self.q.coeffs)

    def deriv1_many(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return npp.polyval(z, self.d1_num.coeffs) / npp.polyval(z, self._q2.coeffs)

    def deriv2_many(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return npp.polyval(z, self.d2_num.coeffs) / npp.polyval(z, self._q3.coeffs)


class ShiftedFunction:
    """f_eta(z) = r(z) - conj(z) - eta.

    Construction rejects the excluded family r(z) = alpha*z + proper part
    with |alpha| = 1 (detected as deg p = deg q + 1 with a unimodular
    leading ratio), for which |f| does not grow at infinity.
    """

    def __init__(self, r: RationalFn, eta: complex = 0.0, tol: Tolerances | None = None):
        self.r = r
        self.eta = complex(eta)
        self.tol = tol or r.tol
        if r.p.degree == r.q.degree + 1:
            alpha = r.p.coeffs[-1] / r.q.coeffs[-1]
            if abs(abs(alpha) - 1.0) <= self.tol.admissible:
                raise NotAdmissibleError(
                    f"r behaves like alpha*z with |alpha| = {abs(alpha)!r} at infinity"
                )

    def shifted(self, eta: complex) -> "ShiftedFunction":
        return ShiftedFunction(self.r, eta, self.tol)

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        if z.ndim == 0:
            return self.r.eval(complex(z)) - complex(z).conjugate() - self.eta
        return self.r.eval_many(z) - np.conj(z) - self.eta

    __call__ = eval

    def jacobian(self, z):
        """J_f(z) = |r'(z)|^2 - 1; sign classifies local orientation."""
        z = np.asarray(z, dtype=complex)
        if z.ndim == 0:
            d = self.r.deriv1(complex(z))
        else:
            d = self.r.deriv1_many(z)
        return (d * np.conj(d)).real - 1.0

    def wirtinger(self, z: complex) -> complex:
        """The analytic derivative d/dz f = r'(z); d/dzbar f is -1."""
        return self.r.deriv1(z)


def elimination_poly(f: ShiftedFunction) -> ComplexPoly:
    """Polynomial whose roots contain every zero of f_eta.

    Substituting conj(z) = r(z) - eta into the conjugate equation gives
    z = r*(r(z) - eta) - conj(eta) with r* the coefficient-conjugated
    rational function; clearing denominators yields a polynomial of degree
    at most deg(r)^2 + 1.  Extraneous roots must be filtered by residual.
    """
    p, q = f.r.p, f.r.q
    a = p - complex(f.eta) * q          # numerator of r(z) - eta
    b = q
    pc, qc = conj_reflect(p), conj_reflect(q)
    K = max(pc.degree, qc.degree, 0)
    a_pow = [ComplexPoly([1.0])]
    b_pow = [ComplexPoly([1.0])]
    for _ in range(K):
        a_pow.append(a_pow[-1] * a)
        b_pow.append(b_pow[-1] * b)

    def homog(u: ComplexPoly) -> ComplexPoly:
        acc = ComplexPoly([0.0])
        for k, c in enumerate(u.coeffs):
            if c != 0:
                acc = acc + c * (a_pow[k] * b_pow[K - k])
        return acc

    p_hat = homog(pc)
    q_hat = homog(qc)
    num = p_hat - ComplexPoly([complex(f.eta).conjugate(), 1.0]) * q_hat
    scale = max(
        float(np.abs(p.coeffs).max()),
        float(np.abs(q.coeffs).max()),
        abs(f.eta),
        1.0,
    ) ** max(K, 1)
    if num.is_zero or float(np.abs(num.coeffs).max()) < 1e-12 * scale:
        raise DegenerateEliminationError("conjugate elimination cancelled identically")
    return num


def max_zero_count(r: RationalFn) -> int:
    """Sharp upper bound 5*deg(r) - 5 on the number of zeros of f_eta."""
    return 5 * r.degree - 5


def point_mass_rational(masses, positions, tol: Tolerances = DEFAULT_TOL) -> RationalFn:
    """r(z) = sum_k m_k / (z - z_k) over a common denominator.

    Masses must be positive and positions pairwise distinct; at least two
    terms are required so that deg(r) >= 2.
    """
    masses = [float(m) for m in masses]
    positions = [complex(z) for z in positions]
    if len(masses) != len(positions):
        raise InputError("masses", "masses and positions differ in length")
    if len(masses) < 2:
        raise InputError("masses", "need at least two point masses")
    if any(m <= 0 for m in masses):
        raise InputError("masses", "masses must be positive")
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            if positions[i] == positions[j]:
                raise InputError("positions", "positions must be pairwise distinct")
    q = ComplexPoly([1.0])
    for z in positions:
        q = q * ComplexPoly([-z, 1.0])
    p = ComplexPoly([0.0])
    for k, m in enumerate(masses):
        term = ComplexPoly([m])
        for j, z in enumerate(positions):
            if j != k:
                term = term * ComplexPoly([-z, 1.0])
        p = p + term
    return RationalFn(p, q, tol)


def _coeff_list(raw, fieldname: str) -> list[complex]:
    if not isinstance(raw, (list, tuple)) or not raw:
        raise InputError(fieldname, "expected a nonempty list of [re, im] pairs")
    out = []
    for k, entry in enumerate(raw):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise InputError(fieldname, f"entry {k} is not a [re, im] pair")
        try:
            out.append(complex(float(entry[0]), float(entry[1])))
        except (TypeError, ValueError):
            raise InputError(fieldname, f"entry {k} is not numeric")
    return out


def rational_from_json(obj, tol: Tolerances = DEFAULT_TOL) -> RationalFn:
    """Build a RationalFn from the external lens description.

    {"type": "rational", "p": [[re, im], ...], "q": [[re, im], ...]}
    {"type": "point_masses", "masses": [...], "positions": [[re, im], ...]}
    """
    if not isinstance(obj, dict):
        raise InputError("lens", "lens description must be a JSON object")
    kind = obj.get("type")
    if kind == "rational":
        return RationalFn(_coeff_list(obj.get("p"), "p"), _coeff_list(obj.get("q"), "q"), tol)
    if kind == "point_masses":
        masses = obj.get("masses")
        if not isinstance(masses, (list, tuple)):
            raise InputError("masses", "expected a list of positive numbers")
        return point_mass_rational(masses, _coeff_list(obj.get("positions"), "positions"), tol)
    raise InputError("type", f"unknown lens type {kind!r}")
