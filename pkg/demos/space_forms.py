"""
One frame, three space forms
============================

The same unitary frame through the R3, S3 and H3 Sym formulas; metric and
|Q| agree, and the mean curvatures satisfy the Lawson relations.
"""

import numpy as np

from dpwforge import geomcheck, pipeline, potential, sym

surf = pipeline.DPWSurface(potential.builtin("smyth", {"k": 1, "c": 1.0}), z_star=0)
pts = np.array([0.2 + 0.1j, -0.3 + 0.25j])

out = geomcheck.lawson_check(surf.frames, pts, dgamma=1.1, h=2.5e-3)
print("measured H:", out["H"])
print("formula H: ", out["H_formula"])
print("H_s^2 + 1 - H_r^2:", out["residual_s_r"], "  H_r^2 + 1 - H_h^2:", out["residual_r_h"])
print("metric mismatch:", out["metric_mismatch"], "  |Q| mismatch:", out["hopf_abs_mismatch"])

# display maps: stereographic for S3, Poincare ball for H3
F = surf.frames(pts)
f_s3, _ = sym.sym_s3(F, -0.55, 0.55)
f_h3, _ = sym.sym_h3(F, 0.5)
print("S3 points on the sphere:", np.linalg.norm(f_s3, axis=-1))
print("stereographic:", sym.to_display(f_s3, "S3"))
print("Poincare ball radii:", np.linalg.norm(sym.to_display(f_h3, "H3"), axis=-1))
