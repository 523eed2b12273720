"""
Where the disk stops being optimal
==================================

Thin ellipses and a high-frequency ripple probe the curvature inequality on
either side of the threshold.  The ellipse gap behaves like
``pi (5 - 3 beta) eps^2`` and changes sign at ``beta = 5/3``; the ripple body
turns negative for every ``beta > 1``.
"""

import math

from isomoment.families import corollary_gap, ellipse, k0_mode_body
from isomoment.harness import sweep_and_fit, threshold_scan

###############################################################################
# Fit the quadratic coefficient of the gap for three values of beta.
for beta in (0.0, 1.0, 1.5):
    fit = sweep_and_fit("ellipse", [0.01, 0.02, 0.03, 0.04], beta=beta)
    print(f"beta={beta}: c={fit.c:.5f} target={fit.target:.5f} p={fit.p:.4f} R^2={fit.r2:.8f}")

###############################################################################
# Between 1 and 5/3 the two constructions disagree in sign.
for row in threshold_scan([0.5, 1.1, 1.5, 1.7, 2.5], samples=50):
    print({k: (round(v, 8) if isinstance(v, float) else v) for k, v in row.items()})

###############################################################################
# The ripple gap is exactly ``pi d^2 [(1 + beta) + (1 - beta) k0^2]`` for
# ``h = 1 + d sin(k0 t)``.
body, k0 = k0_mode_body(1.2, 0.05)
d = 0.05 / k0**2
print(k0, corollary_gap(body, 1.2), math.pi * d * d * (2.2 - 0.2 * k0**2))
print("ellipse gap at beta = 5/3:", corollary_gap(ellipse(0.02), 5 / 3))
