import numpy as np
import pytest

from dpwforge import sym
from dpwforge import loopalg as la
from dpwforge.errors import BadGammas, NotUnitary, ProjectionPole, ZeroQ

from conftest import N, cylinder_F, loop, sphere_factors


def unitary_loop(theta=0.4, b=0.3 - 0.2j):
    """z-constant unitary loop diag(e^{it}, e^{-it}) [[a, b/lam], [-conj(b) lam, conj(a)]]."""
    a = np.sqrt(1 - abs(b) ** 2)
    D = np.diag([np.exp(1j * theta), np.exp(-1j * theta)])
    return loop({0: D @ np.diag([a, a]), -1: D @ np.array([[0, b], [0, 0]]), 1: D @ np.array([[0, 0], [-np.conj(b), 0]])})


def frame(z=0.3 + 0.2j):
    return cylinder_F(z)


@pytest.mark.parametrize("tag,dim", [("R3", 3), ("S3", 4), ("H3", 4)])
def test_coordinate_round_trip(tag, dim, rng):
    x = rng.normal(size=(5, dim))
    assert np.allclose(sym.FROM_MATRIX[tag](sym.TO_MATRIX[tag](x)), x)


def test_metrics_match_coordinates(rng):
    x, y = rng.normal(size=(2, 3))
    assert np.isclose(sym.metric_r3(sym.r3_to_matrix(x), sym.r3_to_matrix(y)), x @ y)
    x, y = rng.normal(size=(2, 4))
    assert np.isclose(sym.metric_s3(sym.s3_to_matrix(x), sym.s3_to_matrix(y)), x @ y)
    assert np.isclose(sym.metric_h3(sym.h3_to_matrix(x), sym.h3_to_matrix(y)), sym.ambient_inner("H3", x, y))


def test_ambient_point_check():
    x = np.array([0.3, 0.1, -0.2, 0.0])
    x[3] = np.sqrt(1 - np.sum(x[:3] ** 2))
    assert sym.AmbientPoint.from_coords("S3", x).check()
    y = np.array([0.5, -0.2, 0.1, 0.0])
    y[3] = np.sqrt(1 + np.sum(y[:3] ** 2))
    assert sym.AmbientPoint.from_coords("H3", y).check()
    assert not sym.AmbientPoint.from_coords("H3", -y).check()
    assert sym.AmbientPoint.from_coords("R3", [1.0, 2.0, 3.0]).check()


def test_r3_cylinder_radius_and_normal():
    H = 0.5
    for z in (0.0, 0.3 + 0.2j, -0.7 + 1.1j):
        f, n = sym.sym_r3(cylinder_F(z), H)
        assert abs(np.linalg.norm(n) - 1) < 1e-12
        # round cylinder of radius 1/(2H) about a coordinate axis
        radii = [np.hypot(*np.delete(f, k)) for k in range(3)]
        assert min(abs(r - 1 / (2 * H)) for r in radii) < 1e-10


def test_r3_sphere_lies_on_sphere():
    H = 0.5
    pts = [sym.sym_r3(sphere_factors(z)[0], H)[0] for z in (0.0, 0.5j, 1.2 - 0.3j, 3.0)]
    c = pts[0] + sym.sym_r3(sphere_factors(0.0)[0], H)[1] / H
    # centre = f + N / H up to the normal orientation; test both signs
    c2 = pts[0] - sym.sym_r3(sphere_factors(0.0)[0], H)[1] / H
    d1 = [np.linalg.norm(p - c) for p in pts]
    d2 = [np.linalg.norm(p - c2) for p in pts]
    assert min(np.ptp(d1), np.ptp(d2)) < 1e-10


def test_s3_point_and_normal():
    f, n = sym.sym_s3(frame(), -0.6, 0.6)
    assert abs(f @ f - 1) < 1e-12 and abs(n @ n - 1) < 1e-12 and abs(f @ n) < 1e-12
    assert np.isclose(sym.mean_curvature_s3(-0.6, 0.6), 1 / np.tan(1.2))


def test_h3_point_and_normal():
    f, n = sym.sym_h3(frame(), 0.5)
    ip = lambda a, b: sym.ambient_inner("H3", a, b)
    assert abs(ip(f, f) + 1) < 1e-12 and abs(ip(n, n) - 1) < 1e-12 and abs(ip(f, n)) < 1e-12
    assert f[3] > 0
    assert np.isclose(sym.mean_curvature_h3(0.5), 1 / np.tanh(-0.5))


def test_parameter_errors():
    with pytest.raises(BadGammas):
        sym.sym_s3(frame(), 0.3, 0.3 + np.pi)
    with pytest.raises(ZeroQ):
        sym.sym_h3(frame(), 0.0)
    with pytest.raises(ValueError):
        sym.sym_r3(frame(), 0.0)


def test_not_unitary_detected():
    B = loop({0: np.diag([2.0, 0.5])})
    with pytest.raises(NotUnitary):
        sym.sym_r3(B, 0.5)
    with pytest.raises(NotUnitary):
        sym.sym_s3(B, -0.5, 0.5)


def test_batched_matches_single():
    F = np.stack([frame(0.1).coeffs, frame(0.2j).coeffs])
    f, n = sym.sym_r3(F, 0.5)
    assert f.shape == (2, 3)
    assert np.allclose(f[1], sym.sym_r3(frame(0.2j), 0.5)[0])


def test_stereographic_round_trip_and_pole():
    p = np.array([[0.3, -1.2, 0.5], [0.0, 0.0, 0.0]])
    assert np.allclose(sym.stereographic(sym.stereographic_inverse(p)), p)
    with pytest.raises(ProjectionPole):
        sym.stereographic(np.array([0.0, 0.0, 0.0, 1.0]))


def test_poincare_inside_ball():
    f, _ = sym.sym_h3(frame(1.5 - 0.7j), 0.5)
    d = sym.to_display(f, "H3")
    assert np.linalg.norm(d) < 1
    f0 = np.array([0.0, 0.0, 0.0, 1.0])
    assert np.allclose(sym.to_display(f0, "H3"), 0)
    with pytest.raises(ValueError):
        sym.to_display(f0, "R4")


def test_hat_involution_is_involutive(rng):
    M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.allclose(sym.hat_involution(sym.hat_involution(M)), M)


@pytest.mark.parametrize("ambient,kw", [("R3", {"H": 0.5}), ("S3", {"g1": -0.6, "g2": 0.6}), ("H3", {"q": 0.5})])
def test_isometry_from_loop(ambient, kw):
    A = unitary_loop()
    F = frame()
    AF = la.TwistedLoop(la.conv(A.coeffs, F.coeffs, N)[0], True)
    ev = {"R3": lambda G: sym.sym_r3(G, kw["H"])[0],
          "S3": lambda G: sym.sym_s3(G, kw["g1"], kw["g2"])[0],
          "H3": lambda G: sym.sym_h3(G, kw["q"])[0]}[ambient]
    iso = sym.isometry_from_loop(A, ambient, **kw)
    assert np.max(np.abs(iso.apply(ev(F)) - ev(AF))) < 1e-10
    M = iso.matrix
    G = np.diag(sym.METRIC_DIAG[ambient])
    assert np.max(np.abs(M.T @ G @ M - G)) < 1e-10


def test_r3_rotation_axis_fixed():
    iso = sym.isometry_from_loop(unitary_loop(), "R3", H=0.5)
    assert np.allclose(iso.matrix @ iso.axis, iso.axis)
    assert np.isclose(np.trace(iso.matrix), 1 + 2 * np.cos(iso.angle))
