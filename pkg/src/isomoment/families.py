"""Analytic families with closed-form reference values."""

import math
from dataclasses import dataclass

import numpy as np

from .bodies import (
    Cylinder3D,
    Polygon2D,
    RadialBody,
    SupportBody,
    _parse_coeffs_2d,
    _parse_coeffs_3d,
    make_support_body,
)
from .errors import PerturbationTooLarge, ValidationError
from .measures import (
    ball_volume,
    centroid,
    cylinder_cap_momentum,
    cylinder_lateral_momentum,
    gauss_weighted_momentum,
    measure_report,
)
from .spectral import HarmonicSpectrum, default_grid

__all__ = [
    "CylinderReference",
    "NearlySphericalBody",
    "corollary_gap",
    "cylinder",
    "cylinder_reference",
    "ellipse",
    "ellipse_reference",
    "k0_mode_body",
    "perturbed_ball",
    "rhombus",
    "rhombus_H_exact",
    "rhombus_f",
]


# ---------------------------------------------------------------------------
# ellipse


def ellipse(eps, grid_resolution=None):
    """Centred ellipse with semiaxes ``1 + eps`` and ``1 - eps``.

    Built from exact support values; the Fourier tail is far below roundoff
    for ``eps < 0.3`` on the default grid.
    """
    if not 0.0 <= eps < 0.3:
        raise ValidationError("ellipse needs 0 <= eps < 0.3")
    grid = default_grid(2, grid_resolution)
    t = grid.theta
    h = np.sqrt((1 + eps) ** 2 * np.cos(t) ** 2 + (1 - eps) ** 2 * np.sin(t) ** 2)
    return SupportBody.from_samples(h, grid)


def ellipse_reference(eps):
    """Second-order expansions of the ellipse quantities (not exact values)."""
    return {
        "perimeter": 2 * math.pi + 0.5 * math.pi * eps**2,
        "area": math.pi * (1 - eps**2),
        "mean_curvature_momentum": 2 * math.pi + 6 * math.pi * eps**2,
        "gap_coefficient": lambda beta: math.pi * (5 - 3 * beta),
    }


def corollary_gap(body, beta):
    """``inf int |x - x0|^2 dmu + 2 beta |E| - (1 + beta) P^2 / (2 pi)`` in the plane.

    Positive values mean the disk is not a maximiser at this ``beta``.
    """
    if body.dim != 2:
        raise ValidationError("planar only")
    rep = measure_report(body)
    mom = gauss_weighted_momentum(body, "optimal", check=False).value
    return mom + 2 * beta * rep.volume - (1 + beta) * rep.perimeter**2 / (2 * math.pi)


def k0_mode_body(beta, eps, grid_resolution=None):
    """Body ``1 + (eps/k0^2) sin(k0 t)`` with the smallest integer ``k0`` such that
    ``k0^2 > (1 + beta)/(beta - 1)``; its gap has the sign of
    ``(1 + beta) + (1 - beta) k0^2 < 0`` for ``beta > 1``.
    """
    if beta <= 1:
        raise ValidationError("needs beta > 1")
    k0 = math.ceil(math.sqrt(math.floor((1 + beta) / (beta - 1)) + 1))
    body = make_support_body(2, {0: 1.0, (k0, "sin"): eps / k0**2}, grid_resolution)
    return body, k0


# ---------------------------------------------------------------------------
# rhombus


def rhombus(l, alpha):
    """Rhombus of perimeter ``l`` with angle ``alpha`` at the vertices on the x axis."""
    if not (l > 0 and 0 < alpha < math.pi):
        raise ValidationError("rhombus needs l > 0 and 0 < alpha < pi")
    a = 0.25 * l * math.cos(alpha / 2)
    b = 0.25 * l * math.sin(alpha / 2)
    return Polygon2D([[a, 0.0], [0.0, b], [-a, 0.0], [0.0, -b]])


def rhombus_f(alpha):
    return (math.pi - alpha) * math.cos(alpha / 2) ** 2 + alpha * math.sin(alpha / 2) ** 2


def rhombus_H_exact(l, alpha):
    """``inf_x0 int |x - x0|^2 dmu`` for the rhombus: ``(l^2/8) f(alpha)``.

    This is the unnormalised infimum (no ``1/n`` factor); it tends to
    ``pi l^2 / 8`` at both ends of the angle range without reaching it.
    """
    return l * l / 8.0 * rhombus_f(alpha)


# ---------------------------------------------------------------------------
# cylinder


@dataclass(frozen=True)
class CylinderReference:
    eps: float
    L: float
    perimeter: float
    lateral: float
    caps: float
    lateral_printed: float
    caps_printed: float

    @property
    def total(self):
        return self.lateral + self.caps


def cylinder(eps):
    """Cylinder of radius ``eps`` and height ``1/eps - eps`` (surface area ``2 pi``)."""
    if not 0 < eps < 1:
        raise ValidationError("cylinder needs 0 < eps < 1")
    return Cylinder3D(eps, 1.0 / eps - eps)


def cylinder_reference(eps):
    """Closed-form momentum of the unit-area cylinder family about its center.

    ``lateral`` is ``2 pi (eps^3 L + eps L^3 / 12)`` and ``caps`` the two-disk
    value ``pi eps^4 + (pi/2) L^2 eps^2``.  The ``*_printed`` fields keep the
    older forms ``2 pi (eps^3 L + eps L^3 / 3)`` and ``(pi/2)(eps^4 + L^2 eps^2)``
    for comparison; the lateral one is the momentum about an end of the axis,
    not the center, and grows like ``2 pi / (3 eps^2)`` instead of
    ``pi / (6 eps^2)``.
    """
    c = cylinder(eps)
    L = c.L
    return CylinderReference(
        eps=eps,
        L=L,
        perimeter=2 * math.pi * eps * (L + eps),
        lateral=cylinder_lateral_momentum(eps, L),
        caps=cylinder_cap_momentum(eps, L),
        lateral_printed=2 * math.pi * (eps**3 * L + eps * L**3 / 3),
        caps_printed=0.5 * math.pi * (eps**4 + L * L * eps * eps),
    )


# ---------------------------------------------------------------------------
# nearly spherical sets


class NearlySphericalBody(RadialBody):
    """Radial graph ``r (1 + t u)`` normalised to the ball's volume and barycenter.

    Attributes
    ----------
    u : HarmonicSpectrum
        The requested perturbation (orthonormal coefficients).
    t : float
        Amplitude.
    r : float
        Base radius after volume normalisation.
    """

    def __init__(self, spectrum, grid, u, t, r, passes):
        super().__init__(spectrum, grid)
        self.u = u
        self.t = t
        self.r = r
        self.passes = passes


def _as_spectrum(n, u):
    if isinstance(u, HarmonicSpectrum):
        if u.dim != n:
            raise ValidationError("perturbation dimension mismatch")
        return u
    return _parse_coeffs_2d(u) if n == 2 else _parse_coeffs_3d(u)


def _pad(spec, degree):
    K = spec.max_degree
    if K >= degree:
        return spec
    if spec.dim == 2:
        c, s = np.zeros(degree + 1), np.zeros(degree + 1)
        c[: K + 1], s[: K + 1] = spec.cos, spec.sin
    else:
        c, s = np.zeros((degree + 1,) * 2), np.zeros((degree + 1,) * 2)
        c[: K + 1, : K + 1], s[: K + 1, : K + 1] = spec.cos, spec.sin
    return HarmonicSpectrum(spec.dim, c, s)


def perturbed_ball(n, u, t, mass=None, grid=None, eps0=0.1, max_passes=10):
    """Nearly spherical body with volume ``mass`` (default ``omega_n``) and zero
    boundary barycenter.

    ``u`` is a :class:`HarmonicSpectrum` or an amplitude map in the support-body
    convention; it must have no constant term.  Volume is fixed first, then the
    barycenter is removed through the degree-one coefficients; the two steps
    are repeated until the barycenter is below 1e-10 (at least three passes).
    """
    spec = _as_spectrum(n, u)
    if abs(spec.mean_coefficient) > 1e-14:
        raise ValidationError("perturbation must have no constant term")
    grid = grid or default_grid(n)
    spec = _pad(spec, 1)
    tu = spec.scaled(t)
    vals = tu.synthesize(grid)
    grad = tu.gradient_samples(grid)
    w1inf = float(np.max(np.abs(vals)) + np.max(np.linalg.norm(grad, axis=1)))
    if w1inf >= eps0 or np.min(1 + vals) <= 0:
        raise PerturbationTooLarge(f"|t u|_W1inf = {w1inf:.3g} not below {eps0}")
    mass = ball_volume(n) if mass is None else float(mass)
    one = math.sqrt(2 * math.pi) if n == 2 else math.sqrt(4 * math.pi)
    # rho = 1 + t u as a spectrum, then normalised
    rho = HarmonicSpectrum(n, tu.cos.copy(), tu.sin.copy())
    if n == 2:
        rho.cos[0] += one
    else:
        rho.cos[0, 0] += one
    k1 = math.sqrt(math.pi) if n == 2 else math.sqrt(4 * math.pi / 3)
    r = 1.0
    passes = 0
    for passes in range(1, max_passes + 1):
        body = RadialBody(rho, grid)
        vol = grid.integrate(body.rho**n) / n
        s = (mass / vol) ** (1.0 / n)
        rho = rho.scaled(s)
        r *= s
        c = centroid(RadialBody(rho, grid))
        # translation by -c changes rho by -<c, omega> to first order
        if n == 2:
            rho.cos[1] -= c[0] * k1
            rho.sin[1] -= c[1] * k1
        else:
            rho.cos[1, 1] -= c[0] * k1
            rho.sin[1, 1] -= c[1] * k1
            rho.cos[1, 0] -= c[2] * k1
        if passes >= 3 and float(np.linalg.norm(c)) < 1e-10:
            break
    # a final volume fix keeps |E| exact; its effect on the barycenter is O(1e-10 t)
    vol = grid.integrate(RadialBody(rho, grid).rho ** n) / n
    s = (mass / vol) ** (1.0 / n)
    rho = rho.scaled(s)
    r *= s
    return NearlySphericalBody(rho, grid, spec, t, r, passes)


