"""Acceptance criteria, one PASS/FAIL line each (collected in the terminal summary)."""

import dataclasses
import math
import time
from pathlib import Path

import numpy as np
import pytest

from dpwforge import delaunay as D
from dpwforge import factor, geomcheck, h3reps, holode, mesh, pipeline, potential, scene
from dpwforge import weierstrass as W

from conftest import N, sphere_factors

SCENES = Path(__file__).resolve().parents[1] / "scenes"
GRID33 = mesh.GridSpec("rectangle", (-1.0, 1.0), (-1.0, 1.0), 33, 33)


def test_criterion_1_cylinder_golden(record):
    t0 = time.perf_counter()
    X, _, _, _ = pipeline.DPWSurface(potential.builtin("cylinder"), z_star=0, N=N).grid(GRID33.parameter_grid())
    elapsed = time.perf_counter() - t0
    Wg = GRID33.parameter_grid()
    x, y = Wg.real, Wg.imag
    exact = np.stack([-4 * x, -np.sin(4 * y), -np.cos(4 * y)], -1)
    err = float(np.max(np.abs(X - exact)))
    ok = err < 1e-6 and elapsed < 10
    record(1, ok, f"cylinder max error {err:.1e} (tol 1e-6), runtime {elapsed:.1f} s (limit 10 s)")
    assert ok


def test_criterion_2_sphere_golden(record):
    Wg = GRID33.parameter_grid()
    X, _, _, _ = pipeline.DPWSurface(potential.builtin("sphere"), z_star=0, N=N).grid(Wg)
    x, y = Wg.real, Wg.imag
    d = 1 + x * x + y * y
    exact = np.stack([-4 * x, -4 * y, -1 + 3 * x * x + 3 * y * y], -1) / d[..., None]
    err = float(np.max(np.abs(X - exact)))
    rng = np.random.default_rng(2)
    zs = rng.uniform(-1.5, 1.5, 10) + 1j * rng.uniform(-1.5, 1.5, 10)
    ferr = 0.0
    for z in zs:
        res = factor.iwasawa(holode.closed_form_phi("sphere", {}, z, N))
        F, B = sphere_factors(z)
        ferr = max(ferr, float(np.max(np.abs(res.F.coeffs - F.coeffs))), float(np.max(np.abs(res.B.coeffs - B.coeffs))))
    ok = err < 1e-6 and ferr < 1e-8
    record(2, ok, f"sphere max error {err:.1e} (tol 1e-6); explicit factors at 10 points {ferr:.1e} (tol 1e-8)")
    assert ok


def test_criterion_3_factorization_round_trip(record):
    worst = factor.roundtrip_suite(100, N, seed=0)
    split = max(worst["iwasawa"], worst["birkhoff"], worst["iwasawa_factor"], worst["birkhoff_factor"])
    ok = split < 1e-8 and worst["gram_schmidt"] < 1e-12
    record(3, ok, f"100 cases: worst split residual {split:.1e} (tol 1e-8), "
                  f"Gram-Schmidt {worst['gram_schmidt']:.1e} (tol 1e-12)")
    assert ok


CLOSING_SETS = [
    dict(s=0.2, t=0.15), dict(s=0.3, t=-0.1), dict(s=0.1, t=0.3), dict(s=0.15, t=-0.25),
    dict(s=0.2, t=0.15, ambient="S3", gamma=0.6), dict(s=0.25, t=-0.1, ambient="S3", gamma=0.4),
    dict(s=0.1, t=0.2, ambient="S3", gamma=1.0),
    dict(s=0.2, t=0.15, ambient="H3", q=1.0), dict(s=0.3, t=-0.1, ambient="H3", q=0.5),
    dict(s=0.1, t=0.2, ambient="H3", q=-0.8),
]
SEAM_GRID = mesh.GridSpec("logpolar", (math.exp(-1), math.exp(1)), (0.0, 2 * math.pi), 9, 17)


def _seam_gap(p):
    m = mesh.sample(lambda Wg: D.surface_logpolar(p, Wg, N), SEAM_GRID, p.ambient)
    return m.seam_gaps()[0]


def test_criterion_4_delaunay_closing(record):
    worst_res, worst_gap, min_open = 0.0, 0.0, np.inf
    for kw in CLOSING_SETS:
        p = D.close(**kw)
        sol = holode.PhiSolution(p.potential(), 1.0, N=N)
        M, _ = holode.monodromy(sol, holode.PathSpec.circle(0j, 1.0), check=False)
        res = D.period_residuals(M, p)
        worst_res = max(worst_res, res["pm_identity"], res.get("dlambda", 0.0))
        worst_gap = max(worst_gap, _seam_gap(p))
        perturbed = dataclasses.replace(p, r=p.r + 0.05)
        min_open = min(min_open, _seam_gap(perturbed))
    ok = worst_res < 1e-8 and worst_gap < 1e-6 and min_open > 1e-2
    record(4, ok, f"10 closed sets: monodromy residual {worst_res:.1e} (tol 1e-8), seam gap {worst_gap:.1e} "
                  f"(tol 1e-6); 10 perturbed sets: smallest seam gap {min_open:.2e} (needs > 1e-2)")
    assert ok


DPW_SCENES = ["cylinder", "sphere", "smyth_k1", "delaunay_r3", "delaunay_s3", "delaunay_h3"]
DPW_EXTRA = [
    {"surface": {"kind": "dpw", "family": "smyth", "params": {"k": 0, "c": 1}}},
    {"surface": {"kind": "dpw", "family": "smyth", "params": {"k": 2, "c": 1}}},
    {"surface": {"kind": "dpw", "family": "cylinder"}, "ambient": {"tag": "S3", "gamma1": -0.6, "gamma2": 0.6}},
    {"surface": {"kind": "dpw", "family": "sphere"}, "ambient": {"tag": "H3", "q": 1.0}},
    {"surface": {"kind": "dpw", "family": "delaunay", "params": {"s": 0.3, "t": -0.1}, "close": True}},
]


def test_criterion_5_curvature(record):
    small = {"domain": {"nu": 9, "nv": 9}}
    cfgs = [scene.SceneConfig.from_file(SCENES / f"{n}.json", small) for n in DPW_SCENES]
    cfgs += [scene.SceneConfig.from_json(d, small) for d in DPW_EXTRA]
    keys = ("H_max_dev", "conformal_defect_max", "conformal_defect_rel_max", "gauss_residual_max",
            "codazzi_residual_max", "dQ_max")
    tol = {"H_max_dev": 1e-3, "conformal_defect_max": 1e-5, "conformal_defect_rel_max": 1e-5,
           "gauss_residual_max": 1e-3, "codazzi_residual_max": 1e-3, "dQ_max": 1e-3}
    worst = dict.fromkeys(keys, 0.0)
    for cfg in cfgs:
        rep, _ = scene.run_generate(cfg)
        for k in keys:
            worst[k] = max(worst[k], rep["geomcheck"][k])
    ok = all(worst[k] < tol[k] for k in keys)
    record(5, ok, f"{len(cfgs)} DPW meshes in R3/S3/H3: " + ", ".join(f"{k} {worst[k]:.1e}" for k in keys)
           + " (tol 1e-3, conformal 1e-5)")
    assert ok


def test_criterion_6_weierstrass(record):
    Wg = mesh.GridSpec("rectangle", (-1.0, 1.0), (-1.0, 1.0), 9, 9).parameter_grid()
    z = Wg
    enn = np.real(np.stack([z - z ** 3 / 3, 1j * (z + z ** 3 / 3), z ** 2], -1))
    x, y = z.real, z.imag
    hel = np.stack([2 * np.sinh(x) * np.sin(y), -2 * np.sinh(x) * np.cos(y), -2 * y], -1)
    e1 = float(np.max(np.abs(W.eval_grid(W.catalog("enneper"), Wg, w_star=0j) - enn)))
    e2 = float(np.max(np.abs(W.eval_grid(W.catalog("helicoid"), Wg, w_star=0j) - hel)))
    cat = W.period_check(W.catalog("catenoid"), holode.PathSpec.circle(0j, 1.0)).real_norm
    c = 0.7
    # the loop is traversed clockwise; counterclockwise gives (0, 0, -4 c pi)
    v = W.period_check(W.catalog("catenoid_imaginary", {"c": c}), holode.PathSpec.circle(0j, 1.0, turns=-1.0)).vector
    e3 = float(np.max(np.abs(v.real - [0, 0, 4 * c * np.pi])))
    hdev = 0.0
    for fam in W.CATALOG:
        cfg = scene.SceneConfig.from_json({"surface": {"kind": "weierstrass", "family": fam}, "domain": {"nu": 9, "nv": 9}})
        rep, _ = scene.run_generate(cfg)
        hdev = max(hdev, abs(rep["geomcheck"]["H_mean"]), rep["geomcheck"]["H_max_dev"])
    ok = e1 < 1e-6 and e2 < 1e-6 and cat < 1e-8 and e3 < 1e-6 and hdev < 1e-4
    record(6, ok, f"Enneper {e1:.1e}, helicoid {e2:.1e} (tol 1e-6); catenoid real period {cat:.1e} (tol 1e-8); "
                  f"(z, ciz^-2) period vs (0,0,4c pi) {e3:.1e} (tol 1e-6); |H| over {len(W.CATALOG)} catalog "
                  f"meshes {hdev:.1e} (tol 1e-4)")
    assert ok


def test_criterion_7_bryant_flat(record):
    d = h3reps.bryant_catalog("horosphere")
    w = (np.linspace(-1, 1, 5)[None, :] + 1j * np.linspace(-1, 1, 5)[:, None]).ravel()
    F = h3reps.frames_at(d, w)
    exact = np.stack([np.array([[1, np.conj(v)], [v, 1 + abs(v) ** 2]]) for v in w])
    horo = float(np.max(np.abs(F @ np.conj(np.swapaxes(F, -1, -2)) - exact)))
    hdev, kmax, metric = 0.0, -np.inf, 0.0
    for fam in h3reps.BRYANT_CATALOG:
        cfg = scene.SceneConfig.from_json({"surface": {"kind": "bryant", "family": fam}, "ambient": {"tag": "H3"},
                                           "domain": {"nu": 9, "nv": 9}})
        grid = cfg.grid()
        b = scene.build(cfg)
        pts = scene.check_points(grid, 3)
        rep = geomcheck.analyze(b.sampler, "H3", pts, 2.5e-3, 1.0)
        hdev = max(hdev, rep.aggregates["H_max_dev"])
        kmax = max(kmax, rep.aggregates["K_intrinsic_max"])
        cm = grid.coordmap
        formula = h3reps.bryant_metric_factor(b.sampler.data, cm.z(pts)) * np.abs(cm.dz(pts)) ** 2
        metric = max(metric, float(np.max(np.abs(rep.samples["metric_factor"] / formula - 1))))
    cfg = scene.SceneConfig.from_json({"surface": {"kind": "flat", "family": "flat_rotational"},
                                       "ambient": {"tag": "H3"}, "domain": {"nu": 9, "nv": 9}})
    flat = scene.run_generate(cfg)[0]["geomcheck"]["K_intrinsic_absmax"]
    ok = horo < 1e-8 and hdev < 1e-3 and kmax <= 1e-3 and flat < 1e-3 and metric < 1e-3
    record(7, ok, f"horosphere {horo:.1e} (tol 1e-8); Bryant |H-1| {hdev:.1e} (tol 1e-3), max K {kmax:.1e} "
                  f"(<= 1e-3); flat |K| {flat:.1e} (tol 1e-3); metric identity {metric:.1e} relative (tol 1e-3)")
    assert ok


WEIGHT_SETS = [dict(s=0.2, t=0.15), dict(s=0.3, t=-0.1),
               dict(s=0.2, t=0.15, ambient="S3", gamma=0.6), dict(s=0.25, t=-0.1, ambient="S3", gamma=0.4),
               dict(s=0.2, t=0.15, ambient="H3", q=1.0), dict(s=0.3, t=-0.1, ambient="H3", q=0.5)]


def test_criterion_8_weights(record):
    worst = 0.0
    for kw in WEIGHT_SETS:
        p = D.close(**kw)
        w = D.weight(p).w
        worst = max(worst, abs(D.flux_weight(p)["w"] - w) / abs(w))
    cyl = max(abs(D.weight(D.close(0.25, 0.25, H=H)).w - np.pi / (2 * H)) for H in (0.5, 1.0, 2.0))
    ok = worst < 1e-3 and cyl < 1e-9
    record(8, ok, f"closed form vs flux integral over 6 sets: {worst:.1e} relative (tol 1e-3); "
                  f"cylinder w - pi/(2|H|) {cyl:.1e} (tol 1e-9)")
    assert ok


@pytest.mark.slow
def test_criterion_9_smyth_symmetry(record):
    z = (np.linspace(-1, 1, 17)[None, :] + 1j * np.linspace(-1, 1, 17)[:, None]).ravel()
    worst = {}
    for k in (0, 1, 2):
        surf = pipeline.DPWSurface(potential.builtin("smyth", {"k": k, "c": 1.0}), z_star=0, N=N)
        res = geomcheck.smyth_symmetry_check(surf.frames, k, z)
        worst[k] = max(res.values())
    ok = max(worst.values()) < 1e-6
    record(9, ok, "17x17 grid, all reflections: " + ", ".join(f"k={k} {v:.1e}" for k, v in worst.items())
           + " (tol 1e-6)")
    assert ok


def test_criterion_10_dressing(record):
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(20):
        p = D.DelaunayParams(rng.uniform(0, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
        h = factor.random_plus_loop(rng, 2, N, 0.3)
        z0 = rng.uniform(0.7, 1.3) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        worst = max(worst, D.dressing_residual(p, h, z0, N))
    ok = worst < 1e-9
    record(10, ok, f"20 random (h+, Delaunay) pairs: conjugation identity {worst:.1e} (tol 1e-9)")
    assert ok
