"""Scene configs: parse and validate, build the surface evaluator, run generate / verify / period."""

import copy
import json
import math
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from . import __version__, delaunay, geomcheck, h3reps, holode, mesh, pipeline, potential, sym
from . import weierstrass as ws
from .errors import BadGammas, BadParams, ValidationError, ZeroQ

DEFAULTS = {
    "surface": {"kind": "dpw", "family": "cylinder", "params": {}},
    "ambient": {"tag": "R3"},
    "domain": {},
    "numerics": {"N": 16, "tol": 1e-12, "iwasawa_tol": 1e-10, "check_h": 2.5e-3, "check_samples": 3},
    "output": {},
}

# default parameter domains per surface family, in GridSpec JSON form
FAMILY_DOMAINS = {
    "cylinder": {"kind": "rectangle", "x": [-1, 1], "y": [-1, 1]},
    "sphere": {"kind": "rectangle", "x": [-1, 1], "y": [-1, 1]},
    "smyth": {"kind": "rectangle", "x": [-1, 1], "y": [-1, 1]},
    "delaunay": {"kind": "logpolar", "rho": [math.exp(-1), math.exp(1)], "theta": [0, 2 * math.pi]},
    "catenoid": {"kind": "logpolar", "rho": [0.5, 2.0], "theta": [0, 2 * math.pi]},
    "catenoid_imaginary": {"kind": "logpolar", "rho": [0.5, 2.0], "theta": [0, 2 * math.pi]},
    "richmond": {"kind": "logpolar", "rho": [0.5, 2.0], "theta": [0, 2 * math.pi]},
    "jorge_meeks": {"kind": "logpolar", "rho": [0.1, 0.8], "theta": [0, 2 * math.pi]},
    "scherk_singly": {"kind": "logpolar", "rho": [0.1, 0.8], "theta": [0, 2 * math.pi]},
    "lopez_ros": {"kind": "logpolar", "rho": [0.3, 0.6], "theta": [0, 2 * math.pi]},
    "catenoid_cousin": {"kind": "slit", "rho": [0.5, 2.0], "theta": [-math.pi, math.pi]},
    "trinoid_cousin_dual": {"kind": "rectangle", "x": [-0.5, 0.5], "y": [-0.5, 0.5]},
    "flat_rotational": {"kind": "logpolar", "rho": [0.5, 2.0], "theta": [0, 2 * math.pi]},
}

# tolerances a scene must meet under `verify`
VERIFY_TOLERANCES = {"H_max_dev": 1e-3, "conformal_defect_rel_max": 1e-5, "gauss_residual_max": 1e-3,
                     "codazzi_residual_max": 1e-3, "dQ_max": 1e-3, "seam_gap": 1e-6,
                     "K_intrinsic_flat": 1e-3, "K_intrinsic_sign": 1e-3}


def load_schema():
    return json.loads(resources.files("dpwforge").joinpath("data/scene.schema.json").read_text())


def _complex(x):
    if x is None:
        return None
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    return complex(x)


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in (over or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass
class SceneConfig:
    """Resolved scene: DEFAULTS < scene file < command-line overrides."""

    raw: dict

    @classmethod
    def from_json(cls, d=None, overrides=None):
        d = d or {}
        try:
            jsonschema.validate(d, load_schema())
        except jsonschema.ValidationError as e:
            raise ValidationError(f"scene schema: {e.message} at {list(e.absolute_path)}") from None
        cfg = cls(_merge(_merge(DEFAULTS, d), overrides))
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path, overrides=None):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh), overrides)

    # sections
    @property
    def surface(self):
        return self.raw["surface"]

    @property
    def ambient(self):
        return self.raw["ambient"]

    @property
    def numerics(self):
        return self.raw["numerics"]

    @property
    def kind(self):
        return self.surface.get("kind", "dpw")

    @property
    def family(self):
        fam = self.surface.get("family")
        return fam if fam is not None else ("custom" if "potential" in self.surface else None)

    @property
    def tag(self):
        return self.ambient.get("tag", "R3").upper()

    @property
    def N(self):
        return int(self.numerics["N"])

    def grid(self):
        dom = _merge(FAMILY_DOMAINS.get(self.family, {}), self.raw.get("domain"))
        return mesh.GridSpec.from_json(dom)

    def outputs(self):
        out = self.raw.get("output", {})
        stem = self.family or self.kind
        return out.get("obj", f"{stem}.obj"), out.get("report", f"{stem}.report.json")

    def validate(self):
        """Cross-field constraints; raises ValidationError subclasses."""
        kind, tag, a = self.kind, self.tag, self.ambient
        if tag not in ("R3", "S3", "H3"):
            raise BadParams(f"unknown ambient {tag!r}")
        if kind == "weierstrass" and tag != "R3":
            raise BadParams("Weierstrass surfaces live in R3")
        if kind in ("bryant", "flat") and tag != "H3":
            raise BadParams(f"{kind} surfaces live in H3")
        if kind == "dpw":
            if tag == "S3":
                for key in ("gamma1", "gamma2"):
                    if key not in a:
                        raise BadGammas(f"ambient S3 needs {key}")
                sym._check_gammas(float(a["gamma1"]), float(a["gamma2"]))
            if tag == "H3" and not a.get("q"):
                raise ZeroQ("ambient H3 needs q != 0")
            if self.family is None:
                raise BadParams("dpw surface needs a family or an explicit potential")
            if self.family == "delaunay" and tag == "S3" and abs(a["gamma1"] + a["gamma2"]) > 1e-12:
                raise BadGammas("S3 Delaunay surfaces use gamma1 = -gamma2")
        self.grid()
        return self

    def to_json(self):
        return copy.deepcopy(self.raw)


# ----------------------------------------------------------------------------
# building surfaces
# ----------------------------------------------------------------------------


def sym_params(cfg):
    a = cfg.ambient
    tag = cfg.tag
    if tag == "R3":
        return pipeline.SymParams("R3", H=a.get("H", 0.5), lam0=_complex(a.get("lambda0", 1.0)))
    if tag == "S3":
        return pipeline.SymParams("S3", gamma1=float(a["gamma1"]), gamma2=float(a["gamma2"]))
    return pipeline.SymParams("H3", q=float(a["q"]), psi=float(a.get("psi", 0.0)))


def delaunay_params(cfg):
    p = cfg.surface.get("params", {})
    a = cfg.ambient
    tag = cfg.tag
    gamma = float(a["gamma2"]) if tag == "S3" else None
    q = float(a["q"]) if tag == "H3" else None
    H = float(a.get("H", 0.5))
    s, t = _complex(p.get("s", 0.25)), _complex(p.get("t", 0.25))
    if cfg.surface.get("close"):
        return delaunay.close(s, t, tag, H, gamma, q)
    return delaunay.DelaunayParams(float(p.get("r", 0.0)), s, t, tag, H, gamma, q)


@dataclass
class Built:
    """evaluate(W grid) -> (coords, normals or None); sampler(points) for geomcheck."""

    evaluate: object
    sampler: object
    H_expected: object
    extra: dict


def _default_base(grid):
    """Integration base point: 0 on rectangles, 1 when the annulus contains it, else the first node."""
    if grid.kind == "rectangle":
        return 0j
    if min(grid.range1) <= 1 <= max(grid.range1):
        return 1.0 + 0j
    return complex(grid.z_grid()[0, 0])


def build(cfg):
    kind, fam, num = cfg.kind, cfg.family, cfg.numerics
    grid = cfg.grid()
    cmap = grid.coordmap
    tol, N = float(num["tol"]), cfg.N
    params = cfg.surface.get("params", {})
    z_star = _complex(cfg.surface.get("z_star"))

    if kind == "dpw" and fam == "delaunay":
        if grid.kind == "rectangle":
            raise BadParams("Delaunay surfaces are sampled on a log-polar domain")
        p = delaunay_params(cfg)
        fn = lambda w: delaunay.surface_logpolar(p, w, N)
        extra = {"delaunay": p.to_json(), "closing_residual": delaunay.closing_residual(p)}
        return Built(fn, fn, p.mean_curvature, extra)

    if kind == "dpw":
        pot = potential.from_json(cfg.surface["potential"]) if "potential" in cfg.surface \
            else potential.builtin(fam, params)
        if z_star is None and grid.kind != "rectangle" and pot.base_point == 0:
            z_star = _default_base(grid)
        sp = sym_params(cfg)
        surf = pipeline.DPWSurface(pot, sp, N, tol, cmap, z_star, iwasawa_tol=float(num["iwasawa_tol"]))

        def evaluate(W):
            X, Nrm, _, _ = surf.grid(W)
            return X, Nrm

        return Built(evaluate, surf, sp.mean_curvature, {})

    if kind == "weierstrass":
        data = ws.catalog(fam, params)
        w_star = cmap.w(z_star if z_star is not None else _default_base(grid))
        return Built(lambda W: ws.eval_grid(data, W, cmap, w_star, tol),
                     lambda w: ws.eval_points(data, w, w_star, cmap, tol), 0.0, {})

    if kind in ("bryant", "flat"):
        data = h3reps.bryant_catalog(fam, params) if kind == "bryant" else h3reps.flat_catalog(fam, params)
        base = z_star if z_star is not None else _default_base(grid)
        w_star = complex(cmap.w(base))
        sampler = h3reps.H3Sampler(data, w_star, cmap, tol)

        def evaluate(W):
            F = h3reps.integrate_grid(data, W, cmap, w_star, tol=tol)
            return h3reps.bryant_surface(F)

        return Built(evaluate, sampler, 1.0 if kind == "bryant" else None, {"data": data.name})

    raise BadParams(f"unknown surface kind {kind!r}")


def check_points(grid, n):
    """n x n interior parameter points, kept away from the grid edge."""
    u, v = grid.axes()
    fu = np.linspace(0.2, 0.8, n) if n > 1 else np.array([0.5])
    uu = u[0] + fu * (u[-1] - u[0])
    vv = v[0] + fu * (v[-1] - v[0])
    return (uu[None, :] + 1j * vv[:, None]).ravel()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------


def run_generate(cfg):
    """Mesh, OBJ, geomcheck and report.  Returns (report dict, SurfaceMesh)."""
    grid = cfg.grid()
    b = build(cfg)
    m = mesh.sample(b.evaluate, grid, cfg.tag, cfg.N if cfg.kind == "dpw" else None)
    num = cfg.numerics
    rep = geomcheck.analyze(b.sampler, cfg.tag, check_points(grid, int(num["check_samples"])),
                            float(num["check_h"]), b.H_expected)
    report = {
        "tool": "dpw-forge",
        "version": __version__,
        "config": cfg.to_json(),
        "grid": grid.to_json(),
        "H_expected": b.H_expected,
        "geomcheck": rep.aggregates,
        "seam_gaps": m.seam_gaps(),
        "ambient_coords": m.channels["ambient_coords"],
    }
    report.update(b.extra)
    return _jsonable(report), m


def write_outputs(cfg, report, m):
    obj, rpath = cfg.outputs()
    if obj:
        mesh.export_obj(m, obj)
    if rpath:
        with open(rpath, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return obj, rpath


def verdicts(cfg, report):
    """List of (name, value, tolerance, passed) for the checks that apply to this scene."""
    g = report["geomcheck"]
    T = VERIFY_TOLERANCES
    out = []
    if report["H_expected"] is not None:
        out.append(("H_max_dev", g["H_max_dev"], T["H_max_dev"]))
    # flat immersions are not conformally parametrized, so only the Gauss residual applies
    keys = ("gauss_residual_max",) if cfg.kind == "flat" else \
        ("conformal_defect_rel_max", "gauss_residual_max", "codazzi_residual_max", "dQ_max")
    for key in keys:
        out.append((key, g[key], T[key]))
    if cfg.kind == "flat":
        out.append(("K_intrinsic_absmax", g["K_intrinsic_absmax"], T["K_intrinsic_flat"]))
    if cfg.kind == "bryant":
        out.append(("K_intrinsic_max", g["K_intrinsic_max"], T["K_intrinsic_sign"]))
    if cfg.family == "delaunay" and report["closing_residual"] < 1e-10:
        for i, gap in enumerate(report["seam_gaps"]):
            out.append((f"seam_gap[{i}]", gap, T["seam_gap"]))
    return [(k, float(v), t, bool(v < t)) for k, v, t in out]


def run_period(cfg, center=0j, radius=None, turns=1.0):
    """Closing analysis around a circle.  Returns dict with a 'closed' verdict."""
    kind, fam = cfg.kind, cfg.family
    if kind == "weierstrass":
        data = ws.catalog(fam, cfg.surface.get("params", {}))
        loop = holode.PathSpec.circle(center, radius or 1.0, turns)
        r = ws.period_check(data, loop, loop_id=f"circle({center}, {radius or 1.0})")
        return _jsonable({"kind": kind, "family": fam, **r.to_json()})
    if kind == "dpw" and fam == "delaunay":
        p = delaunay_params(cfg)
        N = cfg.N
        sol = holode.PhiSolution(p.potential(), radius or 1.0, N=N, tol=float(cfg.numerics["tol"]))
        loop = holode.PathSpec.circle(center, radius or 1.0, turns)
        M, zres = holode.monodromy(sol, loop)
        res = delaunay.period_residuals(M, p)
        return _jsonable({"kind": kind, "family": fam, "delaunay": p.to_json(), "z_independence": zres,
                          **res})
    raise BadParams(f"period analysis is available for Weierstrass data and Delaunay surfaces, not {kind}/{fam}")
