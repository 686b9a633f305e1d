"""Shared tolerance profile and deterministic defaults."""

from __future__ import annotations

import dataclasses
import os

TAU = 6.283185307179586476925286766559


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    All residual-style thresholds are relative to a local magnitude scale
    (documented at the point of use); geometric thresholds are absolute in
    the z-plane unless noted.
    """

    res: float = 1e-10          # accepted zero residual, relative
    ambiguous_factor: float = 1e2   # residual band [res, res*factor] is reported, not counted
    singular: float = 1e-6      # |J_f| below this classifies a zero as singular
    curve: float = 1e-9         # allowed | |r'(z)| - 1 | on traced critical samples
    gcd: float = 1e-10          # relative resultant threshold for a common p,q factor
    admissible: float = 1e-12   # |lead(p)/lead(q)| vs. 1 when deg p = deg q + 1
    degenerate: float = 1e-9    # min |r''| on the critical set must exceed this
    cusp: float = 1e-8          # cusp functional zero test, scaled by (1 + |r''|)
    boundary: float = 1e-7      # distance band for "on a critical curve" in face queries
    dedupe: float = 1e-8        # zero dedup radius, scaled by (1 + |z|)
    winding_int: float = 1e-6   # |winding value - nearest integer| bound
    root: float = 1e-12         # simultaneous root iteration step tolerance
    cusp_arc: float = 1e-10     # cusp bisection stops below this arclength
    near_cusp_arc: float = 1e-3 # crossings within this arclength of a cusp image count as cusp
    angular: float = 0.02       # crossing angles below this (radians) are flagged unreliable

    def _replace(self, **kw) -> "Tolerances":
        return dataclasses.replace(self, **kw)


_PROFILES = {
    "default": {},
    "strict": {"res": 1e-12, "curve": 1e-10, "root": 1e-14, "cusp": 1e-10},
    "loose": {"res": 1e-8, "curve": 1e-7, "singular": 1e-4, "cusp": 1e-6},
}

ENV_PROFILE = "HARMZEROS_TOL_PROFILE"


def tolerances_from_profile(name: str | None = None) -> Tolerances:
    """Build a Tolerances record from a named profile.

    With name=None the HARMZEROS_TOL_PROFILE environment variable is
    consulted and "default" is used when unset.
    """
    if name is None:
        name = os.environ.get(ENV_PROFILE, "default")
    try:
        overrides = _PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {name!r}; choose from {sorted(_PROFILES)}")
    return Tolerances(**overrides)


DEFAULT_TOL = Tolerances()

# One seed for every randomized sampling routine so repeated runs of the CLI
# and the verification suites produce byte-identical artifacts.
DEFAULT_SEED = 20220425
