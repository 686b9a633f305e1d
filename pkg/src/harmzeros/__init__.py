"""Critical curves, caustics and zero censuses of f_eta(z) = r(z) - conj(z) - eta."""

from .config import DEFAULT_TOL, DEFAULT_SEED, Tolerances, tolerances_from_profile
from .algebra import (
    ComplexPoly,
    RationalFn,
    ShiftedFunction,
    conj_reflect,
    elimination_poly,
    max_zero_count,
    point_mass_rational,
    rational_from_json,
)
from .roots import RootSet, all_roots, newton_polish
from .critical import (
    CriticalCurve,
    Face,
    RegionPartition,
    build_partition,
    tangent_direction,
    trace_critical_curves,
)
from .caustics import (
    Caustic,
    CuspPoint,
    LocalModel,
    classify_point,
    find_preimages,
    local_model,
    map_caustics,
    path_crossings,
    tmodel_zeros,
)
from .zeros import (
    PRESERVING,
    REVERSING,
    SINGULAR,
    ZeroCensus,
    ZeroRecord,
    find_zeros,
    poincare_index,
    verify_argument_principle,
    winding,
)
from .analysis import (
    CountMap,
    CrossingLedger,
    Geometry,
    asymptotic_count,
    compute_geometry,
    count_map,
    crossing_ledger,
    cusp_crossing_experiment,
    extremal_check,
    fold_crossing_experiment,
    large_shift_verify,
    path_invariance_check,
    regularity_check,
    representative_shifts,
    safe_shift_radius,
    sample_fold_points,
)
from .presets import PRESETS, example2, mpw, pure_power
from .svgplot import render_svg
from . import errors

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "DEFAULT_SEED",
    "Tolerances",
    "tolerances_from_profile",
    "ComplexPoly",
    "RationalFn",
    "ShiftedFunction",
    "conj_reflect",
    "elimination_poly",
    "max_zero_count",
    "point_mass_rational",
    "rational_from_json",
    "RootSet",
    "all_roots",
    "newton_polish",
    "CriticalCurve",
    "Face",
    "RegionPartition",
    "build_partition",
    "tangent_direction",
    "trace_critical_curves",
    "Caustic",
    "CuspPoint",
    "LocalModel",
    "classify_point",
    "find_preimages",
    "local_model",
    "map_caustics",
    "path_crossings",
    "tmodel_zeros",
    "PRESERVING",
    "REVERSING",
    "SINGULAR",
    "ZeroCensus",
    "ZeroRecord",
    "find_zeros",
    "poincare_index",
    "verify_argument_principle",
    "winding",
    "CountMap",
    "CrossingLedger",
    "Geometry",
    "asymptotic_count",
    "compute_geometry",
    "count_map",
    "crossing_ledger",
    "cusp_crossing_experiment",
    "extremal_check",
    "fold_crossing_experiment",
    "large_shift_verify",
    "path_invariance_check",
    "regularity_check",
    "representative_shifts",
    "safe_shift_radius",
    "sample_fold_points",
    "PRESETS",
    "example2",
    "mpw",
    "pure_power",
    "render_svg",
    "errors",
]
