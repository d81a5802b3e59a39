"""Sobolev embeddings: regime classification, radial embedding-constant
estimates on model balls, and the closed-form failure of every admissible
embedding on the Funk ball, where the drift saturates (|beta| -> 1).
"""

import math

import numpy as np

from randerslab import SpaceForm, classify_pair, embedding_constant, funk_counterexample

print("admissible exponent regimes in dimension 3:")
for p, q in [(2.0, 4.0), (3.0, 7.0), (4.0, math.inf), (2.0, 8.0)]:
    pair = classify_pair(p, q, 3)
    print(f"  (p, q) = ({p}, {q}):", pair.regime if pair else "not admissible")

hyp = SpaceForm(3, -1.0)
pair = classify_pair(2.0, 4.0, 3)
print("\nRayleigh-quotient upper bounds for the ball embedding constant:")
for chart in [0.0, 0.5, 0.8]:
    y = np.array([chart, 0.0, 0.0])
    est = embedding_constant(hyp, y, 1.0, pair, n_grid=96)
    print(f"  center chart radius {chart}: {est:.6f}")

print("\nthe witness profile |x| (1-|x|)^(-1/t) on the Funk ball:")
print(f"{'d':>3} {'p':>5} {'q':>5} {'regime':>7} {'t':>6} {'gradient bound':>15} {'L^q integral':>13}")
for d in (2, 3, 4):
    for p, q in [(2.0, 4.0), (1.5, 2.5), (float(d + 1), math.inf)]:
        pair = classify_pair(p, q, d)
        if pair is None:
            continue
        v = funk_counterexample(d, pair)
        lq = "DIVERGENT" if not isinstance(v.lq_norm, float) else f"{v.lq_norm:.4f}"
        wb = "DIVERGENT" if not isinstance(v.w_norm_bound, float) else f"{v.w_norm_bound:.4f}"
        print(f"{d:>3} {p:>5} {str(q):>5} {v.regime:>7} {v.t:>6.2f} {wb:>15} {lq:>13}")
print("\nfinite gradient side + divergent Lebesgue side = no embedding, in every regime.")
