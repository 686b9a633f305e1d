"""Exception types raised by the numerical core."""

from __future__ import annotations


class HarmZerosError(Exception):
    """Base class for all package errors."""


class InputError(HarmZerosError):
    """Malformed user input (JSON lens description, CLI argument)."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class EvalOverflowError(HarmZerosError):
    """Polynomial or rational evaluation left the finite double range."""


class PoleEvaluationError(HarmZerosError):
    """Evaluation was requested at (or numerically on top of) a pole."""

    def __init__(self, z, pole=None):
        self.z = z
        self.pole = pole
        loc = f" (nearest pole {pole})" if pole is not None else ""
        super().__init__(f"evaluation at z={z} hits a pole{loc}")


class CommonFactorError(HarmZerosError):
    """Numerator and denominator share a root; the input is malformed."""


class NotAdmissibleError(HarmZerosError):
    """The function violates deg(r) >= 2 or has the excluded alpha*z + proper-part form."""


class DegenerateEliminationError(HarmZerosError):
    """The conjugate-eliminated polynomial cancels identically."""


class ConvergenceError(HarmZerosError):
    """An iteration diverged or exhausted its budget."""


class TracingError(HarmZerosError):
    """Critical-curve tracing could not link branches unambiguously."""


class DegenerateCriticalError(HarmZerosError):
    """|r''| vanishes on the critical set; curves are not guaranteed smooth."""


class WindingError(HarmZerosError):
    """Winding computation hit a zero on the contour or its sample budget."""


class IsolationError(HarmZerosError):
    """No isolating circle could be found for a local winding."""


class CrossingError(HarmZerosError):
    """A shift path is unusable (endpoint on a caustic, degenerate segment)."""


class CountBoundError(HarmZerosError):
    """A zero census exceeded the 5*deg(r) - 5 bound; internal failure."""
