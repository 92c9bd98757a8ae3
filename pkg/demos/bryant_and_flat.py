"""
CMC 1 and flat surfaces in H3
=============================

Bryant data integrated to frames F, the surface F F^*, its two Gauss maps,
and a flat surface of revolution.
"""

import numpy as np

from dpwforge import geomcheck, h3reps
from dpwforge.holode import CoordMap

# horosphere: F = [[1, 0], [w, 1]]
d = h3reps.bryant_catalog("horosphere")
w = 0.5 - 0.2j
F = h3reps.bryant_integrate(d, w)
print("horosphere F:\n", np.round(F, 14))

pts = np.array([0.3 + 0.2j, -0.25 + 0.4j])
for name in ("enneper_cousin", "helicoid_cousin", "trinoid_cousin_dual"):
    data = h3reps.bryant_catalog(name)
    rep = geomcheck.analyze(h3reps.H3Sampler(data), "H3", 0.5 * pts, h=2.5e-3, H_expected=1.0)
    a = rep.aggregates
    print(f"{name:20s} H {a['H_mean']:.9f}  max K {a['K_intrinsic_max']:+.3f}")

# the hyperbolic Gauss map read off the surface matches the formula
data = h3reps.bryant_catalog("enneper_cousin")
S = h3reps.H3Sampler(data)
x, n = S(pts)
_, G = h3reps.bryant_gauss_maps(data, S.frames(pts), pts)
print("G formula:  ", G)
print("G geometric:", h3reps.hyperbolic_gauss_map_geometric(x, n))

# flat surface of revolution on an annulus
flat = h3reps.flat_catalog("flat_rotational")
cm = CoordMap("exp")
wp = np.log(np.array([1.2 + 0.3j, 0.8 - 0.4j]))
rep = geomcheck.analyze(h3reps.H3Sampler(flat, 0j, cm), "H3", wp, h=2.5e-3)
print("flat |K|:", rep.aggregates["K_intrinsic_absmax"])
