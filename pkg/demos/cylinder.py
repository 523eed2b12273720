"""
Momentum is unbounded in three dimensions
=========================================

Long thin cylinders with surface area ``2 pi`` have arbitrarily large boundary
momentum, so there is no three-dimensional analogue of the planar bound.
"""

import math

from isomoment.families import cylinder, cylinder_reference
from isomoment.measures import boundary_momentum, cylinder_momentum_quadrature

###############################################################################
# Closed form, adaptive quadrature and the rate ``pi / (6 eps^2)``.
print(f"{'eps':>6} {'L':>8} {'closed form':>14} {'quadrature':>14} {'pi/(6 eps^2)':>14}")
for eps in (0.1, 0.05, 0.02, 0.01, 0.005):
    ref = cylinder_reference(eps)
    total = boundary_momentum(cylinder(eps))
    quad = cylinder_momentum_quadrature(eps, ref.L)
    print(f"{eps:6.3f} {ref.L:8.3f} {total:14.6f} {quad:14.6f} {math.pi / (6 * eps**2):14.6f}")
