import numpy as np
import pytest

from harmzeros import RationalFn, errors, presets
from harmzeros.critical import (
    build_partition,
    check_nondegenerate,
    curves_to_csv,
    tangent_direction,
    trace_critical_curves,
)

import oracles


def test_power2_curve_is_half_circle_radius():
    curves = trace_critical_curves(presets.pure_power(2))
    assert len(curves) == 1
    radii = np.abs(curves[0].z)
    assert np.max(np.abs(radii - 0.5)) < 1e-9


def test_power3_curve_radius():
    # |r'| = |3 z^2| = 1 on |z| = 3^(-1/2)
    curves = trace_critical_curves(presets.pure_power(3))
    assert len(curves) == 1
    assert np.max(np.abs(np.abs(curves[0].z) - 3 ** -0.5)) < 1e-9


def test_power2_cusp_preimage_angles():
    curves = trace_critical_curves(presets.pure_power(2))
    c = curves[0]
    got = sorted(np.angle(c.z[i]) % (2 * np.pi) for i in c.cusp_indices)
    want = [np.pi / 3, np.pi, 5 * np.pi / 3]
    assert len(got) == 3
    for g, w in zip(got, want):
        assert abs(g - w) < 1e-6


def test_curves_are_closed_and_sampled_finely():
    for r in (presets.pure_power(2), presets.mpw(3, 0.6)):
        for c in trace_critical_curves(r):
            assert c.z[0] == c.z[-1]
            assert len(c.z) > 300
            steps = np.abs(np.diff(c.z))
            assert steps.max() < 0.05


def test_tangent_direction_on_circle():
    r = presets.pure_power(2)
    h = tangent_direction(r, 0.5 + 0j)
    assert abs(abs(h) - 1.0) < 1e-12
    assert abs(h.real) < 1e-12
    # J stays quadratically small along the tangent, grows linearly off it
    s = 1e-4
    f = lambda z: abs(2 * z) ** 2 - 1.0
    assert abs(f(0.5 + s * h)) < 1e-6
    assert abs(f(0.5 + s * 1.0)) > 1e-5


def test_mpw_curve_count_matches_sign_map():
    rho = 0.6
    curves = trace_critical_curves(presets.mpw(3, rho))
    total, n_pos, n_neg = oracles.face_count_oracle(
        [0, 0, 1], [-rho**3, 0, 0, 1], box=1.6, n=901)
    part = build_partition(presets.mpw(3, rho), curves)
    assert len(part.faces) == total
    # crossing the curves along a ray through a gap between the poles
    hits = oracles.curve_crossing_oracle(
        [0, 0, 1], [-rho**3, 0, 0, 1], 0.0, 0.0, 1.55, 0.011)
    assert hits == 2


def test_partition_invariants():
    for r in (presets.pure_power(2), presets.mpw(3, 0.6), presets.example2()):
        curves = trace_critical_curves(r)
        part = build_partition(r, curves)
        unbounded = [f for f in part.faces if f.unbounded]
        assert len(unbounded) == 1
        u = unbounded[0]
        assert u.signature == frozenset()
        for f in part.faces:
            assert part.face_of(f.representative).face_id == f.face_id
            # orientation is the Jacobian sign at the representative
            jac = abs(r.deriv1(f.representative)) ** 2 - 1.0
            assert f.orientation == (1 if jac > 0 else -1)
            # faces alternate orientation with nesting depth
            assert f.orientation == u.orientation * (-1) ** len(f.signature)


def test_face_of_many_agrees_with_scalar():
    r = presets.mpw(3, 0.6)
    part = build_partition(r, trace_critical_curves(r))
    rng = np.random.default_rng(17)
    pts = rng.uniform(-1.4, 1.4, 40) + 1j * rng.uniform(-1.4, 1.4, 40)
    many = part.face_of_many(pts)
    for z, face in zip(pts, many):
        one = part.face_of(complex(z))
        if one is None:
            assert face is None
        else:
            assert face.face_id == one.face_id


def test_nondegeneracy_check_on_presets():
    for r in (presets.pure_power(2), presets.mpw(3, 0.6), presets.example2()):
        ok, margin = check_nondegenerate(r, trace_critical_curves(r))
        assert ok
        assert margin > 1e-3


def test_degenerate_lens_is_rejected():
    # r' = 1 + z^2 has r'' = 0 at z = 0, which lies on |r'| = 1
    r = RationalFn([0.0, 1.0, 0.0, 1.0 / 3.0], [1.0])
    with pytest.raises(errors.HarmZerosError):
        curves = trace_critical_curves(r)
        ok, _ = check_nondegenerate(r, curves)
        if not ok:
            raise errors.DegenerateCriticalError("flat point on the critical set")


def test_csv_round_trip():
    curves = trace_critical_curves(presets.pure_power(2))
    text = curves_to_csv(curves)
    lines = text.strip().split("\n")
    assert lines[0] == "curve_id,idx,theta,re,im,is_cusp,cusp_value"
    assert len(lines) == 1 + sum(len(c.z) for c in curves)
    seen_cusp = 0
    for row in lines[1:]:
        cid, idx, theta, re, im, is_cusp, cval = row.split(",")
        assert abs(complex(float(re), float(im))) - 0.5 < 1e-9
        seen_cusp += int(is_cusp)
    assert seen_cusp == 3
