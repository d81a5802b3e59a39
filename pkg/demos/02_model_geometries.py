"""Euclidean and Poincare-ball model spaces: distances, exponential maps,
ball volumes and the volume-comparison ratio.
"""

import numpy as np

from randerslab import (
    SpaceForm,
    bishop_gromov_ratio,
    comparison_volume,
    croke_constant,
    exp_log_maps,
    geodesic_distance,
)

hyp = SpaceForm(dim=2, curvature=-1.0)

print("distance from the origin in the curvature -1 disk:")
for r in [0.3, 0.6, 0.9, 0.99]:
    d = geodesic_distance(hyp, np.zeros(2), np.array([r, 0.0]))
    print(f"  chart radius {r:4}:  geodesic distance {d:.6f}  (= 2 artanh r)")

exp_map, log_map = exp_log_maps(hyp, np.array([0.3, -0.2]))
v = np.array([1.5, 0.7])
y = exp_map(v)
print("\nexp/log round trip at base (0.3, -0.2):")
print("  v       =", v)
print("  exp(v)  =", np.round(y, 8))
print("  log(exp(v)) =", np.round(log_map(y), 8))

print("\nball volumes, radius 1.5:")
for c in [0.0, -0.5, -1.0, -2.0]:
    print(f"  curvature {c:+.1f}: {comparison_volume(c, 2, 1.5):.6f}")

print("\nvolume ratio against the matching comparison volume (always 1):")
print("  ", bishop_gromov_ratio(hyp, np.zeros(2), 2.0))
print("against the flat comparison volume (grows with radius):")
for rho in [0.5, 1.0, 2.0, 3.0]:
    print(f"  rho = {rho}: {bishop_gromov_ratio(hyp, np.zeros(2), rho, comparison_curvature=0.0):.6f}")

print("\ndimensional constants of the gradient-comparison inequality:")
for d in [2, 3, 4, 5]:
    print(f"  C({d}) = {croke_constant(d):.6f}")
