"""
Smyth surfaces and their reflection symmetries
==============================================

The frame of xi = lambda^-1 [[0, 1], [c z^k, 0]] dz satisfies
F(R z) = A conj(F(z)) A^-1 for each of the k + 2 reflections R.
"""

import numpy as np

from dpwforge import geomcheck, pipeline, potential

z = (np.linspace(-1, 1, 7)[None, :] + 1j * np.linspace(-1, 1, 7)[:, None]).ravel()
for k in (0, 1, 2):
    surf = pipeline.DPWSurface(potential.builtin("smyth", {"k": k, "c": 1.0}), z_star=0)
    res = geomcheck.smyth_symmetry_check(surf.frames, k, z)
    print(f"k={k}:", {ell: f"{v:.1e}" for ell, v in res.items()})

# the wrong rotation order, or a non-real c, breaks it
surf = pipeline.DPWSurface(potential.builtin("smyth", {"k": 1, "c": 1.0}), z_star=0)
print("k=1 frames tested as k=2:", max(geomcheck.smyth_symmetry_check(surf.frames, 2, z).values()))
surf = pipeline.DPWSurface(potential.builtin("smyth", {"k": 1, "c": 1j}), z_star=0)
print("c = i:", max(geomcheck.smyth_symmetry_check(surf.frames, 1, z).values()))
