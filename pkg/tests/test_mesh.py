import math

import numpy as np
import pytest

from dpwforge import mesh
from dpwforge.errors import DPWError, NumericalFailure, ValidationError


def plane(W):
    return np.stack([W.real, W.imag, np.zeros(W.shape)], -1)


def test_grid_faces_small():
    f = mesh.grid_faces(2, 3)
    assert f.tolist() == [[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4]]


def test_grid_faces_count_and_range():
    f = mesh.grid_faces(5, 7)
    assert f.shape == (2 * 4 * 6, 3) and f.min() == 0 and f.max() == 34


@pytest.mark.parametrize("bad", [dict(kind="torus"), dict(nu=1), dict(clearance=0),
                                 dict(kind="logpolar", range1=(0.0, 1.0))])
def test_gridspec_validation(bad):
    with pytest.raises(ValidationError):
        mesh.GridSpec(**bad)


def test_gridspec_json_round_trip():
    g = mesh.GridSpec.from_json({"kind": "logpolar", "rho": [0.5, 2.0], "nu": 9, "nv": 17})
    assert g.range2 == (0.0, 2 * math.pi)
    assert mesh.GridSpec.from_json(g.to_json()) == g
    assert mesh.DomainSpec is mesh.GridSpec


def test_logpolar_axes_and_seams():
    g = mesh.GridSpec("logpolar", (0.5, 2.0), (0.0, 2 * math.pi), 5, 9)
    u, v = g.axes()
    assert np.allclose(np.exp(u[[0, -1]]), [0.5, 2.0]) and np.isclose(v[-1], 2 * math.pi)
    assert g.seam_pairs() == [(0, 8)]
    Z = g.z_grid()
    assert np.allclose(np.abs(Z[0]), np.linspace(0.5, 2.0, 5))
    assert mesh.GridSpec("logpolar", (0.5, 2.0), (0.0, 3.0)).seam_pairs() == []


def test_slit_clearance():
    g = mesh.GridSpec("slit", (0.5, 2.0), (-math.pi, math.pi), 3, 5, clearance=1e-3)
    _, v = g.axes()
    assert np.isclose(v[0], -math.pi + 1e-3) and np.isclose(v[-1], math.pi - 1e-3)


def test_sample_and_seam_gap():
    g = mesh.GridSpec("logpolar", (0.5, 2.0), (0.0, 2 * math.pi), 4, 9)
    circle = lambda W: np.stack([np.exp(W.real) * np.cos(W.imag), np.exp(W.real) * np.sin(W.imag),
                                 W.real], -1)
    m = mesh.sample(circle, g, "R3", lambda_order=16)
    assert m.vertices.shape == (36, 3) and m.faces.shape == (2 * 3 * 8, 3)
    assert m.seam_gaps()[0] < 1e-14
    assert m.shape == (9, 4) and m.lambda_order == 16


def test_sample_s3_uses_stereographic_display():
    g = mesh.GridSpec(nu=3, nv=3, range1=(-0.5, 0.5), range2=(-0.5, 0.5))
    clif = lambda W: np.stack([np.cos(W.real), np.sin(W.real), np.cos(W.imag), np.sin(W.imag)], -1) / np.sqrt(2)
    m = mesh.sample(clif, g, "s3")
    assert m.ambient == "S3" and m.vertices.shape == (9, 3)
    assert m.channels["ambient_coords"].shape == (9, 4)


def test_sample_error_context():
    def boom(W):
        raise NumericalFailure("bad point")
    with pytest.raises(DPWError, match="rectangle grid"):
        mesh.sample(boom, mesh.GridSpec(nu=2, nv=2), "R3")


def test_face_index_checked():
    with pytest.raises(ValidationError):
        mesh.SurfaceMesh(np.zeros((3, 3)), np.array([[0, 1, 3]]), "R3", (1, 3))


def test_obj_format_and_determinism(tmp_path):
    m = mesh.sample(plane, mesh.GridSpec(nu=2, nv=2, range1=(-1.0, 1.0), range2=(-1.0, 1.0)), "R3", 16)
    text = mesh.obj_text(m)
    lines = text.splitlines()
    assert lines[:3] == ["# dpw-forge", "# lambda_order 16", "# ambient R3"]
    assert lines[3] == "v -1 -1 0" and lines[-1] == "f 1 4 3"
    p1, p2 = tmp_path / "a.obj", tmp_path / "b.obj"
    mesh.export_obj(m, p1)
    mesh.export_obj(mesh.sample(plane, mesh.GridSpec(nu=2, nv=2), "R3", 16), p2)
    assert p1.read_bytes() == p2.read_bytes()
    v, f, header = mesh.read_obj(p1)
    assert np.allclose(v, m.vertices) and (f == m.faces).all() and "dpw-forge" in header


def test_number_format():
    assert mesh._fmt(-0.0) == "0"
    assert mesh._fmt(1 / 3) == "0.333333333"
    assert mesh._fmt(12345.678901234) == "12345.6789"
    assert mesh._fmt(-2.5) == "-2.5"


def test_nan_refused(tmp_path):
    v = np.array([[0.0, 0, 0], [1, 0, 0], [np.nan, 1, 0]])
    m = mesh.SurfaceMesh(v, np.array([[0, 1, 2]]), "R3", (1, 3))
    with pytest.raises(NumericalFailure):
        mesh.export_obj(m, tmp_path / "x.obj")
    assert not (tmp_path / "x.obj").exists()
