import numpy as np
import pytest

from harmzeros import analysis, presets
from harmzeros.errors import CrossingError


def test_asymptotic_count_values():
    # one finite far zero plus one per pole when deg p < deg q
    assert analysis.asymptotic_count(presets.mpw(3, 0.6)) == (1, 4)
    assert analysis.asymptotic_count(presets.example2()) == (1, 4)
    assert analysis.asymptotic_count(presets.pure_power(2)) == (2, 2)


def test_large_shift_single_direction(mpw_geom):
    rep = analysis.large_shift_verify(mpw_geom, 1e3, 0.3)
    assert rep.verdict == "pass"
    assert rep.observed == rep.expected == 4
    assert len(rep.pole_table) == 3
    for entry in rep.pole_table:
        assert entry["zeros_within_eps"] == 1
        assert entry["all_preserving"]
    assert rep.far_in_unbounded


def test_safe_shift_radius(power2_geom):
    rep = analysis.safe_shift_radius(power2_geom, selftest=6)
    assert rep.selftest_pass
    assert rep.epsilon > 0
    assert rep.delta > 0


def test_count_map_levels_mpw(mpw_map):
    assert mpw_map.levels == [4, 6, 8, 10]
    reps = mpw_map.level_representatives()
    assert sorted(reps) == [4, 6, 8, 10]
    assert analysis.representative_shifts(mpw_map) == reps
    for row in mpw_map.rows:
        if not row.flags:
            assert row.caustic_dist > 0
        assert row.n == row.n_plus + row.n_minus


def test_count_map_levels_power2(power2_geom):
    cmap = analysis.count_map(power2_geom, -0.9, 0.9, -0.9, 0.9, 15, 15)
    assert cmap.levels == [2, 4]
    assert cmap.n_re == cmap.n_im == 15
    assert len(cmap.rows) == 225


def test_count_map_csv(power2_geom):
    cmap = analysis.count_map(power2_geom, -0.4, 0.4, -0.4, 0.4, 3, 3)
    lines = cmap.to_csv().strip().split("\n")
    assert lines[0] == "re,im,N,N_plus,N_minus,flags"
    assert len(lines) == 10
    for row in lines[1:]:
        parts = row.split(",")
        assert len(parts) == 6
        float(parts[0]), float(parts[1])
        assert int(parts[2]) == int(parts[3]) + int(parts[4])


def test_extremal_and_regularity_mpw(mpw_geom):
    extremal, census, bound = analysis.extremal_check(mpw_geom)
    assert extremal
    assert bound == 10
    assert census.n == 10
    regular, _ = analysis.regularity_check(mpw_geom)
    assert regular


def test_crossing_ledger_deltoid(power2_geom):
    ledger = analysis.crossing_ledger(power2_geom, [0j, 1.2 + 0.2j])
    assert ledger.verdict == "pass"
    assert len(ledger.events) == 1
    e = ledger.events[0]
    assert e.kind == "fold"
    assert e.verdict == "pass"
    assert e.observed["dn"] == -2
    # the two gap censuses are constant at 4 inside and 2 outside
    assert ledger.gaps[0].counts[0] == 4
    assert ledger.gaps[-1].counts[0] == 2
    d = ledger.to_dict()
    assert d["verdict"] == "pass"
    assert len(d["events"]) == 1


def test_fold_experiment_single(power2_geom):
    pts = analysis.sample_fold_points(power2_geom, 2)
    assert len(pts) == 2
    ledger = analysis.fold_crossing_experiment(power2_geom, pts[0][1])
    assert ledger.verdict == "pass"
    kinds = [e.kind for e in ledger.events]
    assert kinds == ["fold"]


def test_cusp_experiment_single(power2_geom):
    cp = power2_geom.caustics[0].cusp_points[0]
    ledger = analysis.cusp_crossing_experiment(power2_geom, cp)
    assert ledger.verdict == "pass"
    assert ledger.extra["b_plus"] + ledger.extra["b_minus"] == 1
    assert ledger.extra["singular_index"] in (-1, 1)


def test_sample_fold_points_avoid_cusps(mpw_geom):
    pts = analysis.sample_fold_points(mpw_geom, 8)
    assert len(pts) == 8
    assert len(set(z for _c, z in pts)) == 8
    from harmzeros.caustics import local_model
    for _cid, z in pts:
        assert local_model(mpw_geom.r, z).kind == "fold"


def test_path_invariance_same_face(mpw_map, mpw_geom):
    reps = mpw_map.level_representatives()
    eta = reps[10]
    row = [r for r in mpw_map.rows if r.eta == eta][0]
    # both endpoints inside the disc that stays clear of every caustic
    other = eta + 0.5 * row.caustic_dist
    ledger = analysis.path_invariance_check(mpw_geom, eta, other)
    assert ledger.verdict == "pass"
    a, b = ledger.extra["endpoints"]
    assert a == b


def test_path_invariance_rejects_crossing(mpw_geom, mpw_map):
    reps = mpw_map.level_representatives()
    with pytest.raises(CrossingError):
        analysis.path_invariance_check(mpw_geom, reps[10], reps[4])
