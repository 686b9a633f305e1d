import numpy as np

from harmzeros import RationalFn, ShiftedFunction, all_roots, newton_polish
from harmzeros.config import DEFAULT_SEED


def test_root_count_matches_degree():
    rng = np.random.default_rng(DEFAULT_SEED)
    for _ in range(1000):
        deg = int(rng.integers(1, 9))
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        c[-1] += 1.5 * np.sign(c[-1].real or 1.0)
        rs = all_roots(c)
        assert len(rs.roots) == deg
        assert rs.converged


def test_roots_of_known_polynomial():
    # z^5 - 2: fifth roots of 2
    c = np.zeros(6, dtype=complex)
    c[0] = -2.0
    c[5] = 1.0
    rs = all_roots(c)
    got = np.sort_complex(rs.roots)
    want = np.sort_complex(2 ** (1 / 5) * np.exp(2j * np.pi * np.arange(5) / 5))
    assert np.max(np.abs(got - want)) < 1e-10


def test_residuals_small_at_roots():
    rng = np.random.default_rng(DEFAULT_SEED + 5)
    for _ in range(100):
        c = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        c[-1] += 2.0
        rs = all_roots(c)
        scale = np.abs(c).max()
        for z in rs.roots:
            val = abs(np.polyval(c[::-1], z))
            assert val < 1e-7 * scale * (1 + abs(z)) ** 6


def test_multiple_root_cluster():
    """A triple root is recovered as a cluster of radius about tol^(1/3)."""
    z0 = 0.4 - 0.7j
    # (z - z0)^3 * (z + 1)
    c3 = np.polynomial.polynomial.polyfromroots([z0, z0, z0, -1.0])
    rs = all_roots(c3)
    near = [z for z in rs.roots if abs(z - z0) < 1e-3]
    assert len(near) == 3
    for z in near:
        assert abs(z - z0) < 1e-4


def test_polish_is_idempotent_at_regular_zero():
    r = RationalFn([0.0, 0.0, 1.0], [1.0])
    f = ShiftedFunction(r, 0.0)
    res = newton_polish(f, 1.0 + 1e-3j)
    assert res.converged
    assert abs(res.z - 1.0) < 1e-10
    again = newton_polish(f, res.z)
    assert again.iterations <= 2
    assert abs(again.z - res.z) < 1e-12


def test_polish_flags_near_critical():
    # the zero z = 0 of z^2 - conj z sits inside |z| = 1/2 where the
    # Jacobian is negative but small near the curve; a start on the curve
    # itself must not report a clean regular polish
    r = RationalFn([0.0, 0.0, 1.0], [1.0])
    f = ShiftedFunction(r, complex(-0.25 + 1e-8, 0.0))
    # eta on (tiny offset from) the caustic: the singular zero has a
    # vanishing Jacobian, so the polish should flag it
    res = newton_polish(f, -0.5 + 1e-4j)
    assert res.near_critical or res.residual < 1e-8


def test_polish_converges_from_decent_start():
    rng = np.random.default_rng(11)
    r = RationalFn([0.0, 0.0, 1.0], [-0.216, 0.0, 0.0, 1.0])
    f = ShiftedFunction(r, 0.03 + 0.02j)
    hits = 0
    for _ in range(40):
        z0 = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        res = newton_polish(f, z0)
        if res.converged and not res.near_critical:
            assert abs(f.eval(res.z)) < 1e-8
            hits += 1
    assert hits > 10
