import numpy as np
import pytest

from harmzeros import RationalFn, ShiftedFunction, presets
from harmzeros.caustics import (
    caustics_to_csv,
    find_preimages,
    local_model,
    map_caustics,
    path_crossings,
    tmodel_zeros,
)
from harmzeros.config import DEFAULT_SEED
from harmzeros.critical import trace_critical_curves
from harmzeros.errors import CrossingError
from harmzeros.zeros import find_zeros


def test_deltoid_formula():
    """Caustic of r = z^2 is w = e^(2 i t)/4 - e^(-i t)/2 on the circle."""
    r = presets.pure_power(2)
    curves = trace_critical_curves(r)
    ca = map_caustics(r, curves)[0]
    t = np.angle(ca.source.z)
    want = 0.25 * np.exp(2j * t) - 0.5 * np.exp(-1j * t)
    assert np.max(np.abs(ca.w - want)) < 1e-9


def test_deltoid_cusps():
    r = presets.pure_power(2)
    ca = map_caustics(r, trace_critical_curves(r))[0]
    assert len(ca.cusp_points) == 3
    for cp in ca.cusp_points:
        assert abs(abs(cp.w) - 0.75) < 1e-8
        assert cp.model.kind == "cusp"
        # the gaining side at a deltoid cusp is straight inward
        inward = -cp.w / abs(cp.w)
        d = cp.model.image_shift_direction
        assert abs(d / abs(d) - inward) < 1e-6
    angles = sorted(np.angle(cp.w) % (2 * np.pi) for cp in ca.cusp_points)
    want = [0.0, 2 * np.pi / 3, 4 * np.pi / 3]
    for g, w in zip(angles, sorted(want)):
        assert abs(g - w) < 1e-6 or abs(g - w - 2 * np.pi) < 1e-6


def test_fold_model_on_circle():
    r = presets.pure_power(2)
    m = local_model(r, 0.5 + 0j)
    assert m.kind == "fold"
    assert abs(m.d - 1.0) < 1e-9
    assert abs(m.image_shift_direction - 1.0) < 1e-9


def test_preimage_count_generic_fold():
    r = presets.pure_power(2)
    caustics = map_caustics(r, trace_critical_curves(r))
    rng = np.random.default_rng(DEFAULT_SEED)
    for _ in range(12):
        t = rng.uniform(0, 2 * np.pi)
        # stay away from the three cusp parameters
        if min(abs((t - c) % (2 * np.pi)) for c in (np.pi / 3, np.pi, 5 * np.pi / 3)) < 0.2:
            continue
        z0 = 0.5 * np.exp(1j * t)
        w0 = r.eval(z0) - np.conj(z0)
        pre = find_preimages(r, caustics, complex(w0))
        assert len(pre) == 1
        assert abs(pre[0].z0 - z0) < 1e-6


def test_preimage_rejects_near_miss_arc():
    # 17 degrees from a cusp the opposite arc of the deltoid passes about
    # 1e-2 away from w0; it must not be reported as a second preimage
    r = presets.pure_power(2)
    caustics = map_caustics(r, trace_critical_curves(r))
    z0 = 0.5 * np.exp(1j * np.radians(-77.0))
    w0 = r.eval(z0) - np.conj(z0)
    pre = find_preimages(r, caustics, complex(w0))
    assert len(pre) == 1


def test_tmodel_zeros_exact():
    # d = i, delta = 0.04: T(x) = i(x^2 - delta) on the real axis and
    # y^2 - 2y + delta = 0 on the imaginary axis
    real, nonreal = tmodel_zeros(1j, 0.04)
    assert sorted(z.real for z in real) == [-0.2, 0.2]
    ys = sorted(z.imag for z in nonreal)
    want = sorted([1 - np.sqrt(0.96), 1 + np.sqrt(0.96)])
    assert np.allclose(ys, want)

    # negative delta: no real zeros, the imaginary pair survives
    real, nonreal = tmodel_zeros(1j, -0.3)
    assert real == []
    assert len(nonreal) == 2

    # delta = 0: the origin only on the real branch
    real, nonreal = tmodel_zeros(1j, 0.0)
    assert real == [0j]


def test_tmodel_boundary_case():
    # Re(1/d)^2 = delta: the y = 0 candidate coincides with a real zero
    dinv = 0.3 - 0.8j
    d = 1.0 / dinv
    real, nonreal = tmodel_zeros(d, 0.09)
    assert len(real) == 2
    assert len(nonreal) == 1
    assert abs(nonreal[0] - (-0.3 + 1.6j)) < 1e-12


def test_tmodel_against_zero_pipeline():
    """T is itself a shifted function for r = d z^2 + z, eta = delta d."""
    rng = np.random.default_rng(DEFAULT_SEED + 9)
    checked = 0
    for k in range(100):
        d = complex(rng.standard_normal(), rng.standard_normal())
        if abs(d) < 0.3:
            continue
        delta = float(rng.uniform(-0.5, 0.8))
        if k % 10 == 0:
            delta = (1.0 / d).real ** 2  # boundary case on purpose
        model = sorted(
            tmodel_zeros(d, delta)[0] + tmodel_zeros(d, delta)[1],
            key=lambda z: (round(z.real, 9), round(z.imag, 9)),
        )
        r = RationalFn([0.0, 1.0, d], [1.0])
        census = find_zeros(ShiftedFunction(r, delta * d))
        got = sorted((rec.z for rec in census.records),
                     key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        assert len(got) == len(model)
        for a, b in zip(got, model):
            assert abs(a - b) < 1e-8
        checked += 1
    assert checked >= 80


def test_crossing_parity_inside_to_outside():
    r = presets.pure_power(2)
    curves = trace_critical_curves(r)
    caustics = map_caustics(r, curves)
    events = path_crossings(caustics, [0j, 2.0 + 0.3j], r=r)
    assert len(events) == 1
    e = events[0]
    assert e.kind == "fold"
    assert e.direction == -1
    assert e.predicted.dn == -2
    # and the reverse path gains two
    back = path_crossings(caustics, [2.0 + 0.3j, 0j], r=r)
    assert len(back) == 1
    assert back[0].predicted.dn == 2


def test_crossing_events_are_ordered_along_path():
    r = presets.mpw(3, 0.6)
    curves = trace_critical_curves(r)
    caustics = map_caustics(r, curves)
    path = [0.45 + 0.31j, -0.52 - 0.33j]
    events = path_crossings(caustics, path, r=r)
    assert len(events) >= 2
    pos = [(e.path_seg, e.t) for e in events]
    assert pos == sorted(pos)


def test_crossing_rejects_bad_paths():
    r = presets.pure_power(2)
    caustics = map_caustics(r, trace_critical_curves(r))
    with pytest.raises(CrossingError):
        path_crossings(caustics, [complex(-0.25, 0.0), 2.0 + 0j], r=r)
    with pytest.raises(CrossingError):
        path_crossings(caustics, [1.0 + 1j, 1.0 + 1j], r=r)


def test_caustic_csv_header_and_cusp_rows():
    r = presets.pure_power(2)
    caustics = map_caustics(r, trace_critical_curves(r))
    text = caustics_to_csv(caustics)
    lines = text.strip().split("\n")
    assert lines[0] == "caustic_id,idx,re,im,is_cusp"
    flagged = [row for row in lines[1:] if row.endswith(",1")]
    assert len(flagged) == 3
    for row in lines[1:]:
        cid, idx, re, im, is_cusp = row.split(",")
        w = complex(float(re), float(im))
        assert abs(w) < 0.7501
