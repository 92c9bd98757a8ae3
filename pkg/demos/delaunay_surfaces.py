"""
Delaunay surfaces in R3, S3 and H3
==================================

Close the period problem, measure the seam, and compare the closed-form
weight with a flux integral taken off the mesh.
"""

import numpy as np

from dpwforge import delaunay as D
from dpwforge import factor, holode

N = 16

for kw in [dict(s=0.2, t=0.15), dict(s=0.3, t=-0.1),
           dict(s=0.2, t=0.15, ambient="S3", gamma=0.6), dict(s=0.2, t=0.15, ambient="H3", q=1.0)]:
    p = D.close(**kw)
    M = D.monodromy_closed_form(p, N)
    res = D.period_residuals(M, p)
    rep = D.weight(p)
    flux = D.flux_weight(p)["w"]
    print(f"{p.ambient} s={p.s.real:+.2f} t={p.t.real:+.2f} r={p.r:.6f}  closed={res['closed']}  "
          f"seam={D.seam_gap(p):.1e}  w={rep.w:+.8f} flux={flux:+.8f}  {rep.classification}")

# numerical monodromy agrees with exp(2 pi i D)
p = D.close(0.2, 0.15)
sol = holode.PhiSolution(p.potential(), 1.0, N=N)
M, zres = holode.monodromy(sol, holode.PathSpec.circle(0j, 1.0))
print("numeric vs closed-form monodromy:", np.max(np.abs(M.coeffs - D.monodromy_closed_form(p, N).coeffs)))

# perturbing r opens the seam
p_open = D.DelaunayParams(p.r + 0.05, p.s, p.t)
print("perturbed seam gap:", D.seam_gap(p_open))

# the axis is fixed by the rotation isometry
ax = D.axis(p)
iso = D.rotation_isometry(p, 0.7, N)
print("axis point moved by:", np.linalg.norm(iso.apply(ax.point) - ax.point))

# dressing by a plus loop conjugates the monodromy
h = factor.random_plus_loop(np.random.default_rng(3), 2, N, 0.3)
print("dressing conjugation residual:", D.dressing_residual(p, h, 1.0 + 0.1j, N))
