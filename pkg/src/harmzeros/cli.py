"""Command-line front end.

Subcommands cover the whole library surface: `zeros` (census at one
shift), `critical` and `caustics` (geometry as CSV), `crossing` (ledger
along a shift path), `sweep` (count map over a shift grid), `verify`
(theorem suites) and `plot` (SVG figure).  Outputs are byte-identical
across runs for a fixed configuration and seed.

Exit codes: 0 success or pass, 1 malformed input, 2 verification failure,
3 inconclusive verification.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import analysis, svgplot
from .algebra import RationalFn, rational_from_json
from .caustics import caustics_to_csv
from .config import DEFAULT_SEED, tolerances_from_profile
from .critical import curves_to_csv
from .errors import HarmZerosError, InputError
from .presets import PRESETS

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3

_COMPLEX_RE = re.compile(
    r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?:([+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i)?$"
)


def parse_complex(text: str) -> complex:
    """Parse the a+bi form used on the command line; no spaces allowed."""
    s = text.strip()
    if not s or " " in s:
        raise InputError("complex", f"cannot parse {text!r}, expected a+bi with no spaces")
    if s in ("i", "+i"):
        return 1j
    if s == "-i":
        return -1j
    m = _COMPLEX_RE.match(s)
    if m and (m.group(1) is not None or m.group(2) is not None):
        re_part = float(m.group(1)) if m.group(1) else 0.0
        im_text = m.group(2)
        if im_text is None:
            im_part = 0.0
        elif im_text in ("+", "-"):
            im_part = float(im_text + "1")
        else:
            im_part = float(im_text)
        v = complex(re_part, im_part)
        if np.isfinite(v.real) and np.isfinite(v.imag):
            return v
    # bare imaginary like "2i" or "-0.5i"
    if s.endswith("i"):
        try:
            v = complex(0.0, float(s[:-1]))
            if np.isfinite(v.imag):
                return v
        except ValueError:
            pass
    raise InputError("complex", f"cannot parse {text!r}, expected a+bi with no spaces")


def parse_grid(text: str) -> tuple[float, float, int]:
    """lo:hi:n with 2 <= n <= 4096."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError("grid", f"expected lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError("grid", f"expected lo:hi:n with numeric fields, got {text!r}")
    if not np.isfinite([lo, hi]).all() or hi <= lo:
        raise InputError("grid", f"need finite lo < hi, got {text!r}")
    if not 2 <= n <= 4096:
        raise InputError("grid", f"grid dimension {n} outside [2, 4096]")
    return lo, hi, n


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad usage on exit code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _lens_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lens", choices=sorted(PRESETS), help="built-in lens preset")
    p.add_argument("--n", type=int, default=3, help="point count for --lens mpw")
    p.add_argument("--rho", type=float, default=0.6, help="radius for --lens mpw")
    p.add_argument("--k", type=int, default=2, help="exponent for --lens power")
    p.add_argument("--input", help="JSON lens description file")
    p.add_argument("--tol-profile", default=None,
                   help="tolerance profile (default from HARMZEROS_TOL_PROFILE)")
    p.add_argument("--theta-steps", type=int, default=720,
                   help="base resolution of the critical-curve trace")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _build_rational(args) -> RationalFn:
    tol = tolerances_from_profile(args.tol_profile)
    if (args.lens is None) == (args.input is None):
        raise InputError("lens", "exactly one of --lens or --input is required")
    if args.input is not None:
        try:
            with open(args.input) as fh:
                obj = json.load(fh)
        except OSError as exc:
            raise InputError("input", f"cannot read {args.input}: {exc}")
        except json.JSONDecodeError as exc:
            raise InputError("input", f"not valid JSON: {exc}")
        return rational_from_json(obj, tol)
    if args.lens == "mpw":
        return PRESETS["mpw"](args.n, args.rho, tol)
    if args.lens == "power":
        return PRESETS["power"](args.k, tol)
    return PRESETS[args.lens](tol)


def _geometry(args) -> analysis.Geometry:
    r = _build_rational(args)
    tol = tolerances_from_profile(args.tol_profile)
    return analysis.compute_geometry(r, theta_steps=args.theta_steps, tol=tol)


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_zeros(args) -> int:
    geom = _geometry(args)
    eta = parse_complex(args.eta)
    census = geom.census(eta)
    _write(_json_dump(census.to_dict()), args.json)
    return EXIT_OK


def _cmd_critical(args) -> int:
    geom = _geometry(args)
    _write(curves_to_csv(geom.curves), args.csv)
    return EXIT_OK


def _cmd_caustics(args) -> int:
    geom = _geometry(args)
    _write(caustics_to_csv(geom.caustics), args.csv)
    return EXIT_OK


def _cmd_crossing(args) -> int:
    geom = _geometry(args)
    pts = [parse_complex(s) for s in args.path.split(",") if s]
    if len(pts) < 2:
        raise InputError("path", "need at least two path vertices")
    ledger = analysis.crossing_ledger(geom, np.array(pts, dtype=complex))
    _write(_json_dump(ledger.to_dict()), args.json)
    if ledger.verdict == "pass":
        return EXIT_OK
    return EXIT_FAIL if ledger.verdict == "fail" else EXIT_INCONCLUSIVE


def _cmd_sweep(args) -> int:
    geom = _geometry(args)
    re_lo, re_hi, n_re = parse_grid(args.re)
    im_lo, im_hi, n_im = parse_grid(args.im)
    cmap = analysis.count_map(geom, re_lo, re_hi, im_lo, im_hi, n_re, n_im)
    _write(cmap.to_csv(), args.csv)
    return EXIT_OK


def _suite_fold(geom, seed: int) -> list[tuple[str, str, list]]:
    out = []
    for cid, z0 in analysis.sample_fold_points(geom, count=8):
        led = analysis.fold_crossing_experiment(geom, z0)
        out.append((f"fold curve {cid} z0={z0:.6g}", led.verdict, led.notes))
    return out


def _suite_cusp(geom, seed: int) -> list[tuple[str, str, list]]:
    out = []
    for ca in geom.caustics:
        for cp in ca.cusp_points:
            led = analysis.cusp_crossing_experiment(geom, cp)
            out.append((f"cusp caustic {ca.caustic_id} z0={complex(cp.z):.6g}",
                        led.verdict, led.notes))
    return out


def _suite_asymptotic(geom, seed: int) -> list[tuple[str, str, list]]:
    out = []
    for k in range(8):
        rep = analysis.large_shift_verify(geom, 1e3, k * np.pi / 4.0)
        out.append((f"large shift direction {k}pi/4", rep.verdict, rep.notes))
    return out


def _suite_invariance(geom, seed: int) -> list[tuple[str, str, list]]:
    rep = analysis.safe_shift_radius(geom, selftest=10, seed=seed)
    verdict = "pass" if rep.selftest_pass else "fail"
    return [(f"safe shift radius {rep.delta:.6g}", verdict, rep.notes)]


_SUITES = {
    "fold": _suite_fold,
    "cusp": _suite_cusp,
    "asymptotic": _suite_asymptotic,
    "invariance": _suite_invariance,
}


def _cmd_verify(args) -> int:
    geom = _geometry(args)
    names = sorted(_SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        rows.extend((name, label, verdict, notes)
                    for label, verdict, notes in _SUITES[name](geom, args.seed))
    report = {
        "suites": names,
        "results": [
            {"suite": s, "case": label, "verdict": verdict, "notes": notes}
            for s, label, verdict, notes in rows
        ],
    }
    n_fail = sum(1 for row in rows if row[2] == "fail")
    n_inc = sum(1 for row in rows if row[2] not in ("pass", "fail"))
    report["verdict"] = "fail" if n_fail else ("inconclusive" if n_inc else "pass")
    if args.json:
        _write(_json_dump(report), args.json)
    for s, label, verdict, _ in rows:
        print(f"[{verdict:>12s}] {s}: {label}")
    print(f"verify: {report['verdict']} "
          f"({len(rows) - n_fail - n_inc}/{len(rows)} pass)")
    if n_fail:
        return EXIT_FAIL
    return EXIT_INCONCLUSIVE if n_inc else EXIT_OK


def _cmd_plot(args) -> int:
    geom = _geometry(args)
    zeros = []
    paths = []
    if args.eta is not None:
        census = geom.census(parse_complex(args.eta))
        zeros = census.records
        if args.json:
            _write(_json_dump(census.to_dict()), args.json)
    svg = svgplot.render_svg(
        curves=geom.curves,
        caustics=geom.caustics if args.caustics else (),
        paths=paths,
        zeros=zeros,
        poles=geom.r.poles,
    )
    _write(svg, args.svg)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="harmzeros",
                  description="zero censuses, critical curves and caustics of "
                              "r(z) - conj(z) - eta")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", parents=[], help="zero census at one shift")
    _lens_arguments(p)
    p.add_argument("--eta", required=True, help="shift, a+bi with no spaces")
    p.add_argument("--json", default=None, help="output path (default stdout)")
    p.set_defaults(fn=_cmd_zeros)

    p = sub.add_parser("critical", help="traced critical curves as CSV")
    _lens_arguments(p)
    p.add_argument("--csv", default=None, help="output path (default stdout)")
    p.set_defaults(fn=_cmd_critical)

    p = sub.add_parser("caustics", help="caustic polylines and cusps as CSV")
    _lens_arguments(p)
    p.add_argument("--csv", default=None, help="output path (default stdout)")
    p.set_defaults(fn=_cmd_caustics)

    p = sub.add_parser("crossing", help="census ledger along a shift path")
    _lens_arguments(p)
    p.add_argument("--path", required=True,
                   help="comma-separated path vertices, each a+bi; "
                        "use --path=... when the first starts with a minus")
    p.add_argument("--json", default=None, help="output path (default stdout)")
    p.set_defaults(fn=_cmd_crossing)

    p = sub.add_parser("sweep", help="zero-count map over a shift grid")
    _lens_arguments(p)
    p.add_argument("--re", required=True, help="real axis as lo:hi:n")
    p.add_argument("--im", required=True, help="imaginary axis as lo:hi:n")
    p.add_argument("--csv", default=None, help="output path (default stdout)")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("verify", help="run a theorem verification suite")
    _lens_arguments(p)
    p.add_argument("--suite", choices=sorted(_SUITES) + ["all"], default="all")
    p.add_argument("--json", default=None, help="report path (default stdout)")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("plot", help="SVG figure of curves, caustics and zeros")
    _lens_arguments(p)
    p.add_argument("--eta", default=None, help="shift whose census is drawn")
    p.add_argument("--svg", required=True, help="SVG output path")
    p.add_argument("--json", default=None, help="census JSON sibling output")
    p.add_argument("--no-caustics", dest="caustics", action="store_false",
                   help="draw only the critical curves")
    p.set_defaults(fn=_cmd_plot)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"harmzeros: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HarmZerosError as exc:
        print(f"harmzeros: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"harmzeros: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
