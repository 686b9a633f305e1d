import pytest

from harmzeros import analysis, presets


@pytest.fixture(scope="session")
def power2_geom():
    """r = z^2: circle critical curve, deltoid caustic with 3 cusps."""
    return analysis.compute_geometry(presets.pure_power(2))


@pytest.fixture(scope="session")
def mpw_geom():
    """Point-mass lens n=3, rho=3/5, the extremal example."""
    return analysis.compute_geometry(presets.mpw(3, 0.6))


@pytest.fixture(scope="session")
def example2_geom():
    """r = ((1+i)z^2 - i)/(z^3 + 1), the minimal-count example."""
    return analysis.compute_geometry(presets.example2())


@pytest.fixture(scope="session")
def mpw_map(mpw_geom):
    """Shift-plane count map for the point-mass lens, shared by slow tests."""
    return analysis.count_map(mpw_geom, -0.55, 0.55, -0.55, 0.55, 41, 41)


@pytest.fixture(scope="session")
def example2_map(example2_geom):
    """Count map covering the example2 caustic with a margin on every side."""
    return analysis.count_map(example2_geom, -1.35, 1.1, -1.55, 1.7, 41, 41)
