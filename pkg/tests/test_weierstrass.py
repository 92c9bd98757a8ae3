import numpy as np
import pytest

from dpwforge import weierstrass as W
from dpwforge.errors import PathThroughPole, UnknownSurface
from dpwforge.holode import CoordMap, PathSpec


def enneper_exact(z):
    z = np.asarray(z, dtype=complex)
    return np.real(np.stack([z - z ** 3 / 3, 1j * (z + z ** 3 / 3), z ** 2], -1))


def test_enneper_closed_form():
    d = W.catalog("enneper")
    for z in (0.4 + 0.3j, -1.2 + 0.5j):
        assert np.max(np.abs(W.eval_minimal(d, z) - enneper_exact(z))) < 1e-13
    pts = np.array([[0.1, 0.5j], [-0.7 + 0.2j, 1.0]])
    assert np.max(np.abs(W.eval_points(d, pts) - enneper_exact(pts))) < 1e-13


def test_grid_matches_points():
    d = W.catalog("catenoid")
    cm = CoordMap("exp")
    Wg = np.log(np.linspace(0.6, 1.5, 4))[None, :] + 1j * np.linspace(0, 2, 3)[:, None]
    G = W.eval_grid(d, Wg, cm, w_star=0j)
    P = W.eval_points(d, Wg, 0j, cm)
    assert np.max(np.abs(G - P)) < 1e-12


@pytest.mark.parametrize("name,center,closed", [
    ("catenoid", 0j, True), ("richmond", 0j, True), ("jorge_meeks", 1 + 0j, True),
    ("lopez_ros", 1 + 0j, True), ("catenoid_imaginary", 0j, False), ("scherk_singly", 1 + 0j, False),
])
def test_real_periods(name, center, closed):
    rep = W.period_check(W.catalog(name), PathSpec.circle(center, 0.3), loop_id=name)
    assert rep.closed is closed
    assert rep.to_json()["loop"] == name


def test_catenoid_imaginary_period_value():
    c = 0.7
    d = W.catalog("catenoid_imaginary", {"c": c})
    ccw = W.period_check(d, PathSpec.circle(0j, 1.0))
    cw = W.period_check(d, PathSpec.circle(0j, 1.0, turns=-1.0))
    assert np.max(np.abs(ccw.vector.real - [0, 0, -4 * np.pi * c])) < 1e-10
    assert np.max(np.abs(cw.vector.real - [0, 0, 4 * np.pi * c])) < 1e-10
    assert abs(ccw.real_norm - 4 * np.pi * c) < 1e-10


def test_gauss_map_is_unit_normal():
    d = W.catalog("catenoid")
    z, h = 0.8 + 0.4j, 1e-5
    fx = (W.eval_minimal(d, z + h, 1) - W.eval_minimal(d, z - h, 1)) / (2 * h)
    fy = (W.eval_minimal(d, z + 1j * h, 1) - W.eval_minimal(d, z - 1j * h, 1)) / (2 * h)
    n = W.gauss_map(d, z)
    assert abs(np.linalg.norm(n) - 1) < 1e-14
    assert abs(n @ fx) < 1e-8 and abs(n @ fy) < 1e-8
    # conformal with |f_x|^2 = (1+|g|^2)^2 |h|^2
    m = W.metric_factor(d, z)
    assert abs(fx @ fx / m - 1) < 1e-8 and abs(fy @ fy / m - 1) < 1e-8 and abs(fx @ fy) < 1e-8


def test_gauss_map_at_zero_of_g():
    d = W.catalog("jorge_meeks")
    assert np.allclose(W.gauss_map(d, np.array([0.0])), [[0, 0, -1]])


def test_errors():
    with pytest.raises(UnknownSurface):
        W.catalog("costa")
    d = W.catalog("catenoid")
    with pytest.raises(PathThroughPole):
        W.eval_minimal(d, -1.0, 1.0)
    with pytest.raises(ValueError):
        W.period_check(d, PathSpec.segments(1, 2))


@pytest.mark.parametrize("name", W.CATALOG)
def test_catalog_entries_evaluate(name):
    d = W.catalog(name)
    z0 = 0.35 + 0.25j
    f = W.eval_minimal(d, z0, 0.3 + 0.1j)
    assert np.all(np.isfinite(f))
    assert d.to_json()["name"] == name
