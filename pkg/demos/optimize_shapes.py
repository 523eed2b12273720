"""
Searching for extremal shapes
=============================

Projected gradient ascent over support-function coefficients.  Maximising the
momentum functional returns to the disk from random starts; maximising the
Gaussian-weighted momentum at fixed perimeter drifts toward thin shapes, where
the rhombus family shows the supremum ``pi l^2 / 8`` is approached but not
attained.
"""

import math

from isomoment.families import rhombus_H_exact
from isomoment.functionals import F_ball, asymmetry
from isomoment.optimizer import certify_local_max_ball, extremize

###############################################################################
# Random restarts for the momentum functional.
for seed in range(3):
    body, trace = extremize("F", n=2, K=6, seed=seed, max_iter=300)
    print(f"seed {seed}: start {trace.values[0]:.8f} final {trace.values[-1]:.12f} "
          f"target {F_ball(2):.12f} asymmetry {asymmetry(body).value:.1e} ({trace.reason})")

###############################################################################
# Second-order check at the disk: negative coefficients mean a local maximum.
for row in certify_local_max_ball("F", n=2):
    print(row)

###############################################################################
# A short ascent for the weighted momentum at perimeter 2 pi.
l = 2 * math.pi
_, trace = extremize("script_H", n=2, K=32, seed=0, max_iter=15)
print(f"after {len(trace.values) - 1} steps: {trace.values[-1] / (math.pi * l * l / 8):.4f} of pi l^2/8")
print("flat rhombus, alpha = 0.01:", rhombus_H_exact(l, 0.01) / (math.pi * l * l / 8))
