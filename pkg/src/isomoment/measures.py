"""Volumes, quermassintegrals, curvature measures and curvature-weighted momenta.

Conventions
-----------
* Mean curvature is normalised so that the unit sphere has ``H = 1``.  The
  unnormalised measure (sum of principal curvatures) is ``(n - 1) H``; use
  :func:`mean_curvature_momentum` with ``normalized=False`` for it.
* ``x0=None`` in the momentum functions means the origin; ``x0="optimal"``
  selects the minimising point of the corresponding quadratic.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .bodies import Cylinder3D, Polygon2D, RadialBody, SupportBody
from .errors import MethodMismatch

__all__ = [
    "CurvatureMeasure",
    "GaussMomentum",
    "MeasureReport",
    "ball_volume",
    "boundary_momentum",
    "centroid",
    "curvature_centroid",
    "curvature_measure",
    "cylinder_cap_momentum",
    "cylinder_lateral_momentum",
    "cylinder_momentum_quadrature",
    "gauss_weighted_momentum",
    "mean_curvature_centroid",
    "mean_curvature_momentum",
    "measure_report",
    "min_boundary_momentum",
]


def ball_volume(n):
    """Volume ``omega_n`` of the unit ball in R^n."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass
class MeasureReport:
    dim: int
    volume: float
    perimeter: float
    quermass: tuple
    mean_width: float
    errors: dict = field(default_factory=dict)

    def af_slacks(self):
        """Aleksandrov-Fenchel slacks ``(W_j/w)^(1/(n-j)) - (W_i/w)^(1/(n-i))`` for ``i < j < n``."""
        n, w = self.dim, ball_volume(self.dim)
        q = [(self.quermass[i] / w) ** (1.0 / (n - i)) for i in range(n)]
        return [q[j] - q[i] for i in range(n) for j in range(i + 1, n)]

    def to_json(self):
        return {
            "dim": self.dim,
            "volume": self.volume,
            "perimeter": self.perimeter,
            "quermass": list(self.quermass),
            "mean_width": self.mean_width,
            "errors": dict(self.errors),
        }


def _boundary_jacobian(body):
    """Boundary measure per unit solid angle along the Gauss map."""
    return body.s1 if body.dim == 2 else body.s2


def measure_report(body):
    """Volume, perimeter, quermassintegrals and mean width with error estimates."""
    n = body.dim
    if isinstance(body, Polygon2D):
        P = body.perimeter
        W = (body.area, P / 2.0, math.pi)
        errs = {"W0": 0.0, "W1": 0.0}
    elif isinstance(body, Cylinder3D):
        e, L = body.eps, body.L
        P = 2.0 * math.pi * e * L + 2.0 * math.pi * e * e
        W = (math.pi * e * e * L, P / 3.0, math.pi * (L + math.pi * e) / 3.0, 4.0 * math.pi / 3.0)
        errs = {"W0": 0.0, "W1": 0.0, "W2": 0.0}
    elif isinstance(body, SupportBody):
        g = body.grid
        h = body.h
        if n == 2:
            W0, e0 = g.integrate_with_error(0.5 * h * body.s1)
            W1, e1 = g.integrate_with_error(0.5 * h)
            W = (W0, W1, math.pi)
            errs = {"W0": e0, "W1": e1}
            P = 2.0 * W1
        else:
            W0, e0 = g.integrate_with_error(h * body.s2 / 3.0)
            W1, e1 = g.integrate_with_error(h * body.s1 / 3.0)
            W2, e2 = g.integrate_with_error(h / 3.0)
            W = (W0, W1, W2, 4.0 * math.pi / 3.0)
            errs = {"W0": e0, "W1": e1, "W2": e2}
            P = 3.0 * W1
    elif isinstance(body, RadialBody):
        g = body.grid
        V, ev = g.integrate_with_error(body.rho**n / n)
        P, ep = g.integrate_with_error(body.area_element)
        W = (V, P / n) + (float("nan"),) * (n - 2) + (ball_volume(n),)
        errs = {"W0": ev, "W1": ep / n}
    else:
        raise TypeError(f"no measures for {type(body).__name__}")
    W = tuple(float(w) for w in W)
    return MeasureReport(
        dim=n,
        volume=W[0],
        perimeter=float(P),
        quermass=W,
        mean_width=2.0 * W[n - 1] / ball_volume(n),
        errors={k: float(v) for k, v in errs.items()},
    )


# ---------------------------------------------------------------------------
# curvature measures


@dataclass
class CurvatureMeasure:
    """Gaussian curvature measure of a convex body.

    ``atoms`` are ``(point, mass)`` pairs.  The absolutely continuous part is
    ``density`` (curvature, 1/length^(n-1)) at ``nodes`` against the boundary
    weights ``boundary_weights``.
    """

    dim: int
    atoms: list
    nodes: np.ndarray = None
    density: np.ndarray = None
    boundary_weights: np.ndarray = None

    @property
    def total_mass(self):
        return self.integrate(lambda x: np.ones(len(x)))

    def integrate(self, func):
        """``int func dmu`` for a function of boundary points (vectorised over rows)."""
        total = 0.0
        if self.atoms:
            pts = np.array([p for p, _ in self.atoms])
            m = np.array([w for _, w in self.atoms])
            total += float(np.dot(m, func(pts)))
        if self.nodes is not None:
            total += float(np.sum(func(self.nodes) * self.density * self.boundary_weights))
        return total


def curvature_measure(body):
    if isinstance(body, Polygon2D):
        ang = body.exterior_angles
        return CurvatureMeasure(2, [(v.copy(), float(a)) for v, a in zip(body.vertices, ang)])
    if isinstance(body, SupportBody):
        J = _boundary_jacobian(body)
        with np.errstate(divide="ignore"):
            dens = 1.0 / J
        return CurvatureMeasure(body.dim, [], body.boundary(), dens, J * body.grid.weights)
    raise TypeError(f"no curvature measure for {type(body).__name__}")


# ---------------------------------------------------------------------------
# centroids


def centroid(body):
    """Barycenter of the boundary (with respect to surface measure)."""
    if isinstance(body, Polygon2D):
        v = body.vertices
        mid = 0.5 * (v + np.roll(v, -1, axis=0))
        L = body.edge_lengths
        return L @ mid / L.sum()
    if isinstance(body, Cylinder3D):
        return np.asarray(body.center, dtype=float)
    if isinstance(body, SupportBody):
        w = _boundary_jacobian(body) * body.grid.weights
        return w @ body.boundary() / w.sum()
    if isinstance(body, RadialBody):
        w = body.area_element * body.grid.weights
        return w @ body.points / w.sum()
    raise TypeError(f"no centroid for {type(body).__name__}")


def curvature_centroid(body):
    """Gaussian curvature centroid ``(1/(n w_n)) int x dmu^G``.

    Spectral bodies read it off the degree-one coefficients; polygons use the
    angle-weighted vertex average.
    """
    if isinstance(body, Polygon2D):
        return body.exterior_angles @ body.vertices / (2.0 * math.pi)
    if isinstance(body, SupportBody):
        sp = body.spectrum
        if body.dim == 2:
            return np.array([sp.cos[1], sp.sin[1]]) / math.sqrt(math.pi)
        k = math.sqrt(3.0 / (4.0 * math.pi))
        return k * np.array([sp.cos[1, 1], sp.sin[1, 1], sp.cos[1, 0]])
    raise TypeError(f"no curvature centroid for {type(body).__name__}")


def mean_curvature_centroid(body):
    """Minimiser of ``y -> int |x - y|^2 H dH^{n-1}``."""
    if isinstance(body, SupportBody):
        if body.dim == 2:
            return curvature_centroid(body)
        w = body.s1 * body.grid.weights
        return w @ body.boundary() / w.sum()
    if isinstance(body, Polygon2D):
        return curvature_centroid(body)
    if isinstance(body, RadialBody) and body.dim == 2:
        w = _polar_mean_curvature_weight(body) * body.grid.weights
        return w @ body.points / w.sum()
    raise TypeError(f"no mean curvature centroid for {type(body).__name__}")


def _resolve_x0(body, x0, optimal):
    if x0 is None:
        return np.zeros(body.dim)
    if isinstance(x0, str):
        if x0 != "optimal":
            raise ValueError("x0 must be a point, None or 'optimal'")
        return np.asarray(optimal(body), dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (body.dim,) or not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be a finite point of matching dimension")
    return x0


# ---------------------------------------------------------------------------
# momenta


def cylinder_lateral_momentum(eps, L):
    """Momentum of the lateral surface about the center.

    ``int_0^{2 pi} int_{-L/2}^{L/2} eps (eps^2 + z^2) dz dtheta``.
    """
    return 2.0 * math.pi * (eps**3 * L + eps * L**3 / 12.0)


def cylinder_cap_momentum(eps, L):
    """Momentum of both caps about the center: ``2 int_disk (r^2 + L^2/4) dA``."""
    return math.pi * eps**4 + 0.5 * math.pi * L * L * eps * eps


def cylinder_momentum_quadrature(eps, L):
    """Total momentum about the center by adaptive quadrature of the profiles.

    Independent of the closed forms; used to cross-check them.
    """
    lateral = integrate.quad(lambda z: eps * (eps * eps + z * z), -L / 2, L / 2, epsabs=0, epsrel=1e-13)[0]
    cap = integrate.quad(lambda r: r * (r * r + L * L / 4), 0, eps, epsabs=0, epsrel=1e-13)[0]
    return 2.0 * math.pi * (lateral + 2.0 * cap)


def boundary_momentum(body, x0=None, return_error=False):
    """``int_{dE} |x - x0|^2 dH^{n-1}``.

    Polygons use exact per-edge antiderivatives and the cylinder is closed
    form; smooth bodies use spectral quadrature.
    """
    x0 = _resolve_x0(body, x0, centroid)
    err = 0.0
    if isinstance(body, Polygon2D):
        p = body.vertices - x0
        d = body.edges
        L = body.edge_lengths
        val = float(np.sum(L * (np.sum(p * p, 1) + np.sum(p * d, 1) + np.sum(d * d, 1) / 3.0)))
    elif isinstance(body, Cylinder3D):
        e, L = body.eps, body.L
        P = 2.0 * math.pi * e * (L + e)
        shift = np.asarray(body.center) - x0
        val = cylinder_lateral_momentum(e, L) + cylinder_cap_momentum(e, L) + P * float(shift @ shift)
    elif isinstance(body, SupportBody):
        r = body.boundary() - x0
        val, err = body.grid.integrate_with_error(np.sum(r * r, 1) * _boundary_jacobian(body))
    elif isinstance(body, RadialBody):
        r = body.points - x0
        val, err = body.grid.integrate_with_error(np.sum(r * r, 1) * body.area_element)
    else:
        raise TypeError(f"no boundary momentum for {type(body).__name__}")
    return (float(val), float(err)) if return_error else float(val)


def min_boundary_momentum(body, return_error=False):
    """``inf_x0 M(x0)``, attained at the boundary barycenter."""
    return boundary_momentum(body, "optimal", return_error=return_error)


@dataclass
class GaussMomentum:
    """Gauss-weighted momentum by boundary quadrature and by the spectral identity."""

    quadrature: float
    spectral: float = None
    error: float = 0.0

    @property
    def value(self):
        return self.spectral if self.spectral is not None else self.quadrature

    @property
    def difference(self):
        return 0.0 if self.spectral is None else abs(self.quadrature - self.spectral)


def _spectral_gauss_momentum(body, x0):
    sp = body.spectrum
    c, s = sp.cos.copy(), sp.sin.copy()
    if body.dim == 2:
        c[1] -= x0[0] * math.sqrt(math.pi)
        s[1] -= x0[1] * math.sqrt(math.pi)
        e = c**2 + s**2
    else:
        k = math.sqrt(4.0 * math.pi / 3.0)
        c[1, 1] -= x0[0] * k
        s[1, 1] -= x0[1] * k
        c[1, 0] -= x0[2] * k
        e = np.sum(c**2 + s**2, axis=1)
    return float(np.dot(1.0 + sp.eigenvalues(), e))


def gauss_weighted_momentum(body, x0=None, check=True):
    """``int |x - x0|^2 dmu^G`` computed two ways for smooth bodies.

    For support bodies the quadrature route integrates ``|x(omega) - x0|^2``
    over the sphere (the Gauss map pushes the measure forward to surface
    measure); the spectral route sums ``(1 + k(n+k-2)) a_k^2`` for the
    support function recentred at ``x0``.
    """
    x0 = _resolve_x0(body, x0, curvature_centroid)
    if isinstance(body, Polygon2D):
        mu = curvature_measure(body)
        return GaussMomentum(mu.integrate(lambda x: np.sum((x - x0) ** 2, 1)))
    if isinstance(body, SupportBody):
        r = body.boundary() - x0
        quad, err = body.grid.integrate_with_error(np.sum(r * r, 1))
        spec = _spectral_gauss_momentum(body, x0)
        if check and abs(quad - spec) > 1e-8 * max(abs(quad), abs(spec)):
            raise MethodMismatch(quad, spec)
        return GaussMomentum(float(quad), spec, float(err))
    raise TypeError(f"no Gauss momentum for {type(body).__name__}")


def _polar_mean_curvature_weight(body):
    """``H ds / d theta`` for a planar radial graph."""
    r, r1, r2 = body.rho, body.drho, body.d2rho
    return (r * r + 2.0 * r1 * r1 - r * r2) / (r * r + r1 * r1)


def mean_curvature_momentum(body, x0=None, normalized=True):
    """``int_{dE} H |x - x0|^2 dH^{n-1}``.

    Planar radial graphs use the polar integrand; 3-D support bodies integrate
    ``|x(omega) - x0|^2 s_1(omega)`` over the sphere.  With ``normalized=False``
    the value is multiplied by ``n - 1`` (sum of principal curvatures).
    """
    x0 = _resolve_x0(body, x0, mean_curvature_centroid)
    if isinstance(body, RadialBody):
        if body.dim != 2:
            raise TypeError("radial mean curvature momentum is planar only")
        r = body.points - x0
        val = body.grid.integrate(np.sum(r * r, 1) * _polar_mean_curvature_weight(body))
    elif isinstance(body, Polygon2D):
        val = gauss_weighted_momentum(body, x0).value
    elif isinstance(body, SupportBody):
        r = body.boundary() - x0
        weight = np.ones_like(body.h) if body.dim == 2 else body.s1
        val = body.grid.integrate(np.sum(r * r, 1) * weight)
    else:
        raise TypeError(f"no mean curvature momentum for {type(body).__name__}")
    return float(val) * (1.0 if normalized else body.dim - 1)
