"""
Measures and momenta of simple convex bodies
============================================

A tour of the basic quantities on a square, a disk and a lopsided smooth body.
"""

import math

import numpy as np

from isomoment.bodies import Polygon2D, make_ball, make_support_body
from isomoment.measures import (
    boundary_momentum,
    curvature_centroid,
    curvature_measure,
    gauss_weighted_momentum,
    measure_report,
)
from isomoment.functionals import check_momentum_bound, script_H

###############################################################################
# A unit square.  Its curvature measure is four atoms of mass pi/2 sitting on
# the vertices, and its boundary momentum about the center is 4/3.
square = Polygon2D([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])
rep = measure_report(square)
print("square quermassintegrals", rep.quermass)
print("atoms", [round(m, 6) for _, m in curvature_measure(square).atoms])
print("momentum about the center", boundary_momentum(square))

###############################################################################
# The momentum bound ``inf M <= P^3 / (2 pi)^2`` holds with room to spare.
rec = check_momentum_bound(square)
print(f"bound {rec.rhs:.6f}, momentum {rec.lhs:.6f}, deficit {rec.deficit:.6f}")

###############################################################################
# A smooth body ``h = 1 + 0.1 cos 3t``.  Its Gaussian-weighted momentum is
# ``2 pi (1 + 0.1^2 (1 + 9) / 2) = 2.1 pi``; two independent routes agree.
body = make_support_body(2, {0: 1.0, (3, "cos"): 0.1})
gm = gauss_weighted_momentum(body)
print("quadrature", gm.quadrature, "spectral", gm.spectral, "2.1 pi", 2.1 * math.pi)
print("normalised H", script_H(body), "= 1.05 pi")

###############################################################################
# Moving a disk moves its curvature centroid with it.
disk = make_ball(2, 1.0, center=[0.3, -0.2])
print("curvature centroid", np.round(curvature_centroid(disk), 12))
