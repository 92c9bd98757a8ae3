import numpy as np
import pytest

from dpwforge import delaunay as D
from dpwforge import factor, holode
from dpwforge import loopalg as la
from dpwforge.errors import BadParams, DegenerateAxis, NoClosing, NotClosed

from conftest import N

CLOSED = [dict(s=0.2, t=0.15), dict(s=0.3, t=-0.1), dict(s=0.2, t=0.15, ambient="S3", gamma=0.6),
          dict(s=0.2, t=0.15, ambient="H3", q=1.0)]


@pytest.mark.parametrize("kw", CLOSED)
def test_close_satisfies_identity_and_monodromy(kw):
    p = D.close(**kw)
    assert D.closing_residual(p) < 1e-14
    M = D.monodromy_closed_form(p, N)
    assert D.period_residuals(M, p)["closed"]
    assert D.seam_gap(p, n_u=5) < 1e-6


def test_open_parameters_fail_to_close():
    p = D.DelaunayParams(0.3, 0.2, 0.15)
    assert D.closing_residual(p) > 1e-3
    res = D.period_residuals(D.monodromy_closed_form(p, N), p)
    assert not res["closed"]
    assert D.seam_gap(p, n_u=5) > 1e-2
    with pytest.raises(NotClosed):
        D.weight(p)


def test_numeric_monodromy_matches_closed_form():
    p = D.close(0.2, 0.15)
    sol = holode.PhiSolution(p.potential(), 1.0, N=N)
    M, _ = holode.monodromy(sol, holode.PathSpec.circle(0j, 1.0), check=False)
    assert np.max(np.abs(M.coeffs - D.monodromy_closed_form(p, N).coeffs)) < 1e-9


def test_cylinder_weight_exact():
    for H in (0.5, 1.5):
        rep = D.weight(D.close(0.25, 0.25, H=H))
        assert rep.classification == "cylinder"
        assert abs(rep.w - np.pi / (2 * H)) < 1e-12


def test_classification():
    assert D.weight(D.close(0.2, 0.15)).classification == "unduloid"
    assert D.weight(D.close(0.3, -0.1)).classification == "nodoid"
    assert D.weight(D.close(0.5, 0.0)).classification == "sphere-chain"
    assert D.weight(D.close(0.2, 0.15)).to_json()["ambient"] == "R3"


@pytest.mark.parametrize("kw", CLOSED)
def test_flux_matches_closed_form_weight(kw):
    p = D.close(**kw)
    w = D.weight(p).w
    assert abs(D.flux_weight(p, n_theta=64)["w"] - w) < 1e-6 * abs(w)


def test_no_closing():
    with pytest.raises(NoClosing):
        D.close(0.4, 0.3)


def test_params_validation():
    with pytest.raises(BadParams):
        D.DelaunayParams(0.1, 0.2j, 0.3)
    with pytest.raises(BadParams):
        D.DelaunayParams(0.1, 0.2, 0.3, ambient="S3")
    with pytest.raises(BadParams):
        D.DelaunayParams(0.1, 0.2, 0.3, ambient="H3", q=0)
    with pytest.raises(BadParams):
        D.axis(D.DelaunayParams(0.1, 0.2j, -0.3j, ambient="S3", gamma=0.5))


def test_r3_axis_is_rotation_axis():
    p = D.close(0.2, 0.15)
    ax = D.axis(p)
    iso = D.rotation_isometry(p, 1.0, N)
    # points of the axis are fixed by the rotation isometry
    for s_ in (0.0, 1.3):
        x = ax.point + s_ * ax.direction
        assert np.linalg.norm(iso.apply(x) - x) < 1e-10
    # distance to the axis is constant around each parallel
    th = np.linspace(0, 2 * np.pi, 7)
    X, _ = D.surface_logpolar(p, 0.3 + 1j * th, N)
    assert np.ptp(ax.distance_r3(X)) < 1e-10


@pytest.mark.parametrize("kw", CLOSED[2:])
def test_spherical_hyperbolic_axis_fixed(kw):
    p = D.close(**kw)
    ax = D.axis(p)
    iso = D.rotation_isometry(p, 1.0, N)
    fixed = np.linalg.svd(iso.matrix - np.eye(4))[2][-2:]
    assert np.max(np.abs(ax.functionals @ fixed.T)) < 1e-10
    assert ax.contains(fixed[0] / np.linalg.norm(fixed[0]))


def test_degenerate_axis():
    p = D.close(0.25, 0.25)
    assert D.axis(p).degenerate
    with pytest.raises(DegenerateAxis):
        D.axis(p, strict=True)


def test_dressing_identity_one_pair(rng):
    p = D.close(0.2, 0.15)
    h = factor.random_plus_loop(rng, 2, N, 0.3)
    assert D.dressing_residual(p, h, 1.0 + 0.2j, N) < 1e-9


def test_frames_unitary():
    p = D.close(0.2, 0.15, ambient="H3", q=1.0)
    F = D.frames_logpolar(p, np.array([0.1 + 0.5j, -0.2 + 2.0j]), N)
    lam = np.exp(0.7j)
    for Fk in F:
        U = la.evaluate(Fk, lam)
        assert np.max(np.abs(U @ U.conj().T - np.eye(2))) < 1e-10
