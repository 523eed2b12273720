"""Curvature-weighted isoperimetric functionals of convex bodies.

Bodies are represented by support-function spectra on the circle or sphere,
by polygons, or by radial graphs.  The package computes quermassintegrals,
curvature measures and boundary momenta, evaluates the associated
inequalities with error bounds, and runs randomised campaigns, sweeps and
shape optimisation on top of them.
"""

from .bodies import (
    Cylinder3D,
    Polygon2D,
    RadialBody,
    StarBody2D,
    SupportBody,
    body_from_json,
    body_to_json,
    fingerprint,
    make_ball,
    make_support_body,
    transform,
)
from .functionals import (
    F_ball,
    F_functional,
    G_beta,
    I_beta,
    asymmetry,
    check_momentum_bound,
    check_theorem1,
    hausdorff_distance,
    script_H,
)
from .measures import (
    boundary_momentum,
    curvature_measure,
    gauss_weighted_momentum,
    mean_curvature_momentum,
    measure_report,
)

__version__ = "0.1.0"

__all__ = [
    "Cylinder3D",
    "F_ball",
    "F_functional",
    "G_beta",
    "I_beta",
    "Polygon2D",
    "RadialBody",
    "StarBody2D",
    "SupportBody",
    "asymmetry",
    "body_from_json",
    "body_to_json",
    "boundary_momentum",
    "check_momentum_bound",
    "check_theorem1",
    "curvature_measure",
    "fingerprint",
    "gauss_weighted_momentum",
    "hausdorff_distance",
    "make_ball",
    "make_support_body",
    "mean_curvature_momentum",
    "measure_report",
    "script_H",
    "transform",
]
