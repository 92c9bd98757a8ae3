"""dpw-forge command line: generate, verify, period, weight, selftest.

Exit codes: 0 success, 1 a verification ran but failed (or a period is open),
2 invalid input, 3 numerical failure.  numpy is imported only after the thread
cap is applied, so every module import below is deferred.
"""

import argparse
import json
import os
import sys

from .errors import NumericalFailure, ValidationError

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3
THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")


def apply_threads(n):
    """Cap BLAS/OpenMP workers; --threads wins over DPW_FORGE_THREADS."""
    n = n or os.environ.get("DPW_FORGE_THREADS")
    if n:
        for var in THREAD_VARS:
            os.environ[var] = str(int(n))
    return int(n) if n else None


def _complex_arg(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _add_scene_flags(p):
    p.add_argument("--scene", help="scene JSON file; flags below override its fields")
    p.add_argument("--kind", choices=["dpw", "weierstrass", "bryant", "flat"])
    p.add_argument("--surface", metavar="FAMILY", help="family name (cylinder, sphere, delaunay, smyth, enneper, ...)")
    p.add_argument("--ambient", type=str.upper, choices=["R3", "S3", "H3"])
    p.add_argument("--H", type=float, help="R3 mean curvature (Sym parameter)")
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--gamma", type=float, help="shorthand for gamma1 = -gamma, gamma2 = gamma")
    p.add_argument("--q", type=float, help="H3 Sym parameter")
    p.add_argument("--psi", type=float)
    p.add_argument("--r", type=float, help="Delaunay r")
    p.add_argument("--s", type=_complex_arg, help="Delaunay s")
    p.add_argument("--t", type=_complex_arg, help="Delaunay t")
    p.add_argument("--k", type=int, help="Smyth k")
    p.add_argument("--c", type=_complex_arg, help="family constant c")
    p.add_argument("--close", action="store_true", help="solve the Delaunay closing condition for r")
    p.add_argument("--N", type=int, help="lambda truncation order")
    p.add_argument("--tol", type=float, help="ODE tolerance")
    p.add_argument("--resolution", type=int, help="grid nodes per direction")
    p.add_argument("--obj", help="OBJ output path")
    p.add_argument("--report", help="JSON report output path")


def overrides_from_args(a):
    """Nested dict of the scene fields set on the command line."""
    surf, amb, num, out, dom = {}, {}, {}, {}, {}
    if a.kind:
        surf["kind"] = a.kind
    if a.surface:
        surf["family"] = a.surface
    params = {k: getattr(a, k) for k in ("r", "s", "t", "k", "c") if getattr(a, k) is not None}
    params = {k: [v.real, v.imag] if isinstance(v, complex) else v for k, v in params.items()}
    if params:
        surf["params"] = params
    if a.close:
        surf["close"] = True
    elif a.r is not None:
        surf["close"] = False  # an explicit r beats a scene-file close request
    if a.ambient:
        amb["tag"] = a.ambient
    for k in ("H", "gamma1", "gamma2", "q", "psi"):
        if getattr(a, k) is not None:
            amb[k] = getattr(a, k)
    if a.gamma is not None:
        amb["gamma1"], amb["gamma2"] = -a.gamma, a.gamma
    if a.N is not None:
        num["N"] = a.N
    if a.tol is not None:
        num["tol"] = a.tol
    if a.resolution is not None:
        dom["nu"] = dom["nv"] = a.resolution
    if a.obj:
        out["obj"] = a.obj
    if a.report:
        out["report"] = a.report
    sections = {"surface": surf, "ambient": amb, "numerics": num, "output": out, "domain": dom}
    return {k: v for k, v in sections.items() if v}


def _config(a):
    from .scene import SceneConfig

    ov = overrides_from_args(a)
    # a new family on the command line replaces the file's parameter set
    if a.scene:
        with open(a.scene, encoding="utf-8") as fh:
            base = json.load(fh)
        if "family" in ov.get("surface", {}) and ov["surface"]["family"] != base.get("surface", {}).get("family"):
            base.setdefault("surface", {}).pop("params", None)
    else:
        base = {}
    if ov.get("surface", {}).get("family") and "kind" not in ov["surface"] and "kind" not in base.get("surface", {}):
        ov["surface"]["kind"] = _guess_kind(ov["surface"]["family"])
    return SceneConfig.from_json(base, ov)


def _guess_kind(family):
    from . import h3reps, weierstrass

    if family in weierstrass.CATALOG:
        return "weierstrass"
    if family in h3reps.BRYANT_CATALOG:
        return "bryant"
    if family in h3reps.FLAT_CATALOG:
        return "flat"
    return "dpw"


def cmd_generate(a):
    from . import scene

    cfg = _config(a)
    report, m = scene.run_generate(cfg)
    obj, rpath = scene.write_outputs(cfg, report, m)
    g = report["geomcheck"]
    print(f"wrote {obj} ({len(m.vertices)} vertices, {len(m.faces)} faces) and {rpath}")
    if report["H_expected"] is not None:
        print(f"H expected {report['H_expected']:.6g}, max deviation {g['H_max_dev']:.2e}")
    for i, gap in enumerate(report["seam_gaps"]):
        print(f"seam gap {i}: {gap:.2e}")
    if "delaunay" in report:
        print(f"delaunay r = {report['delaunay']['r']:.12g}, closing residual {report['closing_residual']:.2e}")
    return EXIT_OK


def _verify_obj(path):
    from . import mesh

    verts, faces, header = mesh.read_obj(path)
    import numpy as np

    checks = [("finite vertices", bool(np.all(np.isfinite(verts)))),
              ("face indices in range", bool(faces.size == 0 or (faces.min() >= 0 and faces.max() < len(verts)))),
              ("dpw-forge header", "dpw-forge" in header)]
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"{len(verts)} vertices, {len(faces)} faces")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_FAILED


def cmd_verify(a):
    from . import scene

    if a.target and a.target.endswith(".obj"):
        return _verify_obj(a.target)
    if a.target:
        a.scene = a.target
    cfg = _config(a)
    report, m = scene.run_generate(cfg)
    rows = scene.verdicts(cfg, report)
    for name, value, tol, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'} {name} = {value:.3e} (tol {tol:.0e})")
    if a.report:
        scene.write_outputs(
            scene.SceneConfig(dict(cfg.raw, output={"obj": None, "report": a.report})), report, m)
    return EXIT_OK if all(r[3] for r in rows) else EXIT_FAILED


def cmd_period(a):
    from . import scene

    cfg = _config(a)
    res = scene.run_period(cfg, a.center, a.radius)
    closed = bool(res["closed"])
    print("CLOSED" if closed else "OPEN")
    for k, v in res.items():
        if k not in ("closed",):
            print(f"  {k}: {json.dumps(v)}")
    return EXIT_OK if closed else EXIT_FAILED


def cmd_weight(a):
    from . import delaunay
    from .scene import SceneConfig, delaunay_params

    a.surface = "delaunay"
    cfg = SceneConfig.from_json({}, overrides_from_args(a))
    p = delaunay_params(cfg)
    rep = delaunay.weight(p)
    print(f"w = {rep.w:.12g}")
    print(f"class = {rep.classification}")
    print(f"H = {rep.H:.12g}")
    for k, v in rep.neck.items():
        print(f"  {k}: {v}")
    if a.flux:
        f = delaunay.flux_weight(p)
        print(f"flux integral w = {f['w']:.12g} (relative difference {abs(f['w'] - rep.w) / max(abs(rep.w), 1e-300):.2e})")
    return EXIT_OK


def cmd_selftest(a):
    from . import factor

    worst = factor.roundtrip_suite(a.cases, a.N or 16, a.seed)
    limits = {"iwasawa": 1e-8, "iwasawa_factor": 1e-8, "birkhoff": 1e-8, "birkhoff_factor": 1e-8,
              "gram_schmidt": 1e-12}
    ok = True
    for k, v in worst.items():
        good = v < limits[k]
        ok &= good
        print(f"{'PASS' if good else 'FAIL'} {k}: worst {v:.2e} over {a.cases} cases (tol {limits[k]:.0e})")
    return EXIT_OK if ok else EXIT_FAILED


def build_parser():
    from . import __version__

    ap = argparse.ArgumentParser(prog="dpw-forge", description="CMC surfaces from holomorphic potentials.")
    ap.add_argument("--version", action="version", version=f"dpw-forge {__version__}")
    ap.add_argument("--threads", type=int, help="cap BLAS/OpenMP threads (fallback: DPW_FORGE_THREADS)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="mesh a scene and write OBJ + JSON report")
    _add_scene_flags(g)
    g.set_defaults(fn=cmd_generate)

    v = sub.add_parser("verify", help="regenerate a scene and check curvature tolerances, or sanity-check an OBJ")
    v.add_argument("target", nargs="?", help="scene JSON or OBJ file")
    _add_scene_flags(v)
    v.set_defaults(fn=cmd_verify)

    p = sub.add_parser("period", help="closing residuals around a circle")
    _add_scene_flags(p)
    p.add_argument("--center", type=_complex_arg, default=0j)
    p.add_argument("--radius", type=float, default=None)
    p.set_defaults(fn=cmd_period)

    w = sub.add_parser("weight", help="Delaunay weight and classification")
    _add_scene_flags(w)
    w.add_argument("--flux", action="store_true", help="also integrate the flux numerically")
    w.set_defaults(fn=cmd_weight)

    s = sub.add_parser("selftest", help="factorization round-trip suite")
    s.add_argument("--cases", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--N", type=int, default=16)
    s.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None):
    ap = build_parser()
    a = ap.parse_args(argv)
    apply_threads(a.threads)
    try:
        return a.fn(a)
    except ValidationError as e:
        print(f"dpw-forge: invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as e:
        print(f"dpw-forge: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as e:
        print(f"dpw-forge: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
