"""Parameter grids, triangle meshes, seam metadata and OBJ export."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import sym
from .errors import DPWError, NumericalFailure, ValidationError
from .holode import IDENTITY, CoordMap


@dataclass(frozen=True)
class GridSpec:
    """kind 'rectangle' (x_range, y_range) or 'logpolar' / 'slit' (rho_range, theta_range).

    Grid rows run along the second coordinate (y or theta), columns along the first.
    'slit' clips theta to (-pi + clearance, pi - clearance)."""

    kind: str = "rectangle"
    range1: tuple = (-1.0, 1.0)
    range2: tuple = (-1.0, 1.0)
    nu: int = 33
    nv: int = 33
    clearance: float = 1e-6

    def __post_init__(self):
        if self.kind not in ("rectangle", "logpolar", "slit"):
            raise ValidationError(f"unknown grid kind {self.kind!r}")
        if self.nu < 2 or self.nv < 2:
            raise ValidationError("grid resolution must be at least 2x2")
        if self.clearance <= 0:
            raise ValidationError("clearance must be positive")
        if self.kind != "rectangle" and min(self.range1) <= 0:
            raise ValidationError("log-polar radii must be positive")

    @classmethod
    def from_json(cls, d):
        d = dict(d or {})
        kind = d.get("kind", "rectangle")
        if kind == "rectangle":
            r1, r2 = d.get("x", (-1.0, 1.0)), d.get("y", (-1.0, 1.0))
        else:
            r1 = d.get("rho", (0.5, 2.0))
            r2 = d.get("theta", (0.0, 2 * math.pi) if kind == "logpolar" else (-math.pi, math.pi))
        return cls(kind, tuple(float(x) for x in r1), tuple(float(x) for x in r2),
                   int(d.get("nu", 33)), int(d.get("nv", 33)), float(d.get("clearance", 1e-6)))

    def to_json(self):
        k1, k2 = ("x", "y") if self.kind == "rectangle" else ("rho", "theta")
        return {"kind": self.kind, k1: list(self.range1), k2: list(self.range2), "nu": self.nu,
                "nv": self.nv, "clearance": self.clearance}

    @property
    def coordmap(self):
        return IDENTITY if self.kind == "rectangle" else CoordMap("exp", 0j)

    def axes(self):
        a, b = self.range2
        if self.kind == "slit":
            a, b = max(a, -math.pi + self.clearance), min(b, math.pi - self.clearance)
        if self.kind == "rectangle":
            u = np.linspace(*self.range1, self.nu)
        else:
            u = np.log(np.linspace(*self.range1, self.nu))
        return u, np.linspace(a, b, self.nv)

    def parameter_grid(self):
        """W (nv, nu) in integration coordinates: z itself, or w = log z."""
        u, v = self.axes()
        return u[None, :] + 1j * v[:, None]

    def z_grid(self):
        return self.coordmap.z(self.parameter_grid())

    @property
    def scale(self):
        u, v = self.axes()
        return float(max(np.ptp(u), np.ptp(v)))

    def seam_pairs(self):
        """Row pairs that should coincide when the surface closes (full turn in theta)."""
        if self.kind == "logpolar" and abs(abs(self.range2[1] - self.range2[0]) - 2 * math.pi) < 1e-12:
            return [(0, self.nv - 1)]
        return []


DomainSpec = GridSpec


def grid_faces(nv, nu):
    idx = np.arange(nv * nu).reshape(nv, nu)
    a, b = idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()
    c, d = idx[1:, 1:].ravel(), idx[1:, :-1].ravel()
    # two triangles per quad, interleaved so faces of one quad are adjacent
    return np.stack([np.stack([a, b, c], 1), np.stack([a, c, d], 1)], 1).reshape(-1, 3)


@dataclass
class SurfaceMesh:
    vertices: np.ndarray
    faces: np.ndarray
    ambient: str
    shape: tuple
    channels: dict = field(default_factory=dict)
    seams: list = field(default_factory=list)
    lambda_order: int = None

    def __post_init__(self):
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise ValidationError("face index out of range")

    def seam_gaps(self):
        """Max ambient-coordinate distance over each seam row pair."""
        X = self.channels.get("ambient_coords", self.vertices).reshape(self.shape + (-1,))
        return [float(np.max(np.linalg.norm(X[i] - X[j], axis=-1))) for i, j in self.seams]

    def is_finite(self):
        return bool(np.all(np.isfinite(self.vertices)))


def sample(evaluator, grid, ambient, lambda_order=None):
    """Evaluate a surface on the grid and triangulate.

    evaluator(W) takes the (nv, nu) parameter grid and returns ambient coordinates
    (nv, nu, d), or a tuple (coords, normals)."""
    W = grid.parameter_grid()
    try:
        out = evaluator(W)
    except DPWError as e:
        e.args = (f"{e.args[0] if e.args else e} [on {grid.kind} grid {grid.nv}x{grid.nu}, "
                  f"u in {grid.range1}, v in {grid.range2}]",) + tuple(e.args[1:])
        raise
    X, Nrm = (out if isinstance(out, tuple) else (out, None))
    X = np.asarray(X, dtype=float)
    disp = sym.to_display(X.reshape(-1, X.shape[-1]), ambient.upper())
    ch = {"ambient_coords": X.reshape(-1, X.shape[-1]), "w": W.ravel()}
    if Nrm is not None:
        ch["normals"] = np.asarray(Nrm, dtype=float).reshape(-1, X.shape[-1])
    return SurfaceMesh(disp, grid_faces(grid.nv, grid.nu), ambient.upper(), (grid.nv, grid.nu), ch,
                       grid.seam_pairs(), lambda_order)


def _fmt(x):
    s = np.format_float_positional(float(x), precision=9, unique=False, fractional=False, trim="-")
    return "0" if s in ("-0", "0") else s


def obj_text(mesh):
    if not mesh.is_finite():
        raise NumericalFailure("mesh has NaN or Inf vertices; refusing to export")
    lines = ["# dpw-forge", f"# lambda_order {mesh.lambda_order if mesh.lambda_order is not None else 'none'}",
             f"# ambient {mesh.ambient}"]
    lines += ["v " + " ".join(_fmt(c) for c in v) for v in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    return "\n".join(lines) + "\n"


def export_obj(mesh, path):
    text = obj_text(mesh)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def read_obj(path):
    verts, faces, header = [], [], []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if line.startswith("#"):
                header.append(line[1:].strip())
            elif line.startswith("v "):
                verts.append([float(x) for x in line.split()[1:4]])
            elif line.startswith("f "):
                faces.append([int(x.split("/")[0]) - 1 for x in line.split()[1:4]])
    return np.array(verts), np.array(faces, dtype=int).reshape(-1, 3), header
