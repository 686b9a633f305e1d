"""Built-in lens functions used throughout the test and verify suites."""

from __future__ import annotations

from .algebra import ComplexPoly, RationalFn
from .config import DEFAULT_TOL, Tolerances


def mpw(n: int = 3, rho: float = 0.6, tol: Tolerances = DEFAULT_TOL) -> RationalFn:
    """Equal point masses 1/n at the n-th roots of rho^n:
    r(z) = z^(n-1) / (z^n - rho^n)."""
    if n < 2:
        raise ValueError("n >= 2 required")
    if not 0 < rho:
        raise ValueError("rho must be positive")
    p = [0.0] * (n - 1) + [1.0]
    q = [-(rho ** n)] + [0.0] * (n - 1) + [1.0]
    return RationalFn(ComplexPoly(p), ComplexPoly(q), tol)


def example2(tol: Tolerances = DEFAULT_TOL) -> RationalFn:
    """r(z) = ((1+i) z^2 - i) / (z^3 + 1), a three-pole lens whose shift
    family realizes the minimal zero count."""
    return RationalFn(ComplexPoly([-1j, 0.0, 1.0 + 1j]), ComplexPoly([1.0, 0.0, 0.0, 1.0]), tol)


def pure_power(k: int = 2, tol: Tolerances = DEFAULT_TOL) -> RationalFn:
    """r(z) = z^k; k = 2 gives the classic deltoid caustic."""
    if k < 2:
        raise ValueError("k >= 2 required")
    return RationalFn(ComplexPoly([0.0] * k + [1.0]), ComplexPoly([1.0]), tol)


PRESETS = {
    "mpw": mpw,
    "example2": example2,
    "power": pure_power,
}
