"""Euclidean rearrangement of a radial profile on a hyperbolic ball: norms
are preserved, the target ball matches the source volume, and the
rearranged gradient is controlled by the original one.
"""

import math

from randerslab import SpaceForm, euclidean_rearrangement, norm_preservation_check, polya_szego_check
from randerslab.rearrange import level_volumes, tent_profile

space = SpaceForm(2, -1.0)
u = tent_profile(space, radius=1.0, height=1.0, n=4000)
u_star = euclidean_rearrangement(u)

vol = 2 * math.pi * (math.cosh(1.0) - 1.0)
print("hyperbolic tent on the geodesic unit disk")
print("  source ball volume:", vol)
print("  target Euclidean radius:", u_star.radius, " (= sqrt(vol/pi):", math.sqrt(vol / math.pi), ")")

print("\nnorm preservation (relative discrepancy):")
for q in [1.0, 2.0, math.inf]:
    print(f"  q = {q}: {norm_preservation_check(u, u_star, q):.2e}")

print("\nlevel-set volumes match:")
levels = [0.8, 0.5, 0.2]
before = level_volumes(u, space, levels)
after = level_volumes(u_star, u_star.space, levels)
for t, v1, v2 in zip(before.levels, before.volumes, after.volumes):
    print(f"  {{u > {t}}}: {v1:.6f}   vs rearranged {v2:.6f}")

lhs, rhs, holds = polya_szego_check(u, u_star, p=2.0)
print("\ngradient comparison: ||grad u||_2 =", round(lhs, 6), ">= scaled ||grad u*||_2 =", round(rhs, 6), "->", holds)
