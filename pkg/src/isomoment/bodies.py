"""Convex body representations.

Support bodies are stored by the coefficients of their support function.
User-facing coefficients are plain amplitudes:

* ``dim == 2``: ``h(t) = a0 + sum_k cos_k cos(k t) + sin_k sin(k t)``, with keys
  ``0`` (or ``"a0"``), ``(k, "cos")`` and ``(k, "sin")``;
* ``dim == 3``: ``h = sum c_{l,m} Y_{l,m}`` with real spherical harmonics scaled
  to unit mean square over the sphere (``Y_{0,0} = 1``), keys ``(l, m)`` with
  ``-l <= m <= l`` (negative ``m`` selects the sine family).

With these conventions ``a0 = r`` and zero elsewhere is the ball of radius r.
Internally everything is converted to the orthonormal spectra of
:mod:`isomoment.spectral`.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .errors import NonPositiveSupport, NotConvex, ValidationError
from .spectral import HarmonicSpectrum, default_grid

CONVEXITY_TOL = 1e-10

__all__ = [
    "Cylinder3D",
    "Polygon2D",
    "RadialBody",
    "StarBody2D",
    "SupportBody",
    "body_from_json",
    "body_to_json",
    "boundary_points",
    "fingerprint",
    "make_ball",
    "make_support_body",
    "polygon_support_samples",
    "transform",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_PI = math.sqrt(math.pi)
_SQRT_4PI = math.sqrt(4.0 * math.pi)


# ---------------------------------------------------------------------------
# coefficient conventions


def _parse_coeffs_2d(coeffs):
    cos_terms, sin_terms = {0: 0.0}, {}
    for key, val in coeffs.items():
        val = float(val)
        if not math.isfinite(val):
            raise ValidationError(f"non-finite coefficient at {key!r}")
        if key in (0, "a0", (0,), (0, "cos")):
            cos_terms[0] = val
            continue
        if not (isinstance(key, tuple) and len(key) == 2 and key[1] in ("cos", "sin")):
            raise ValidationError(f"bad 2-D coefficient key {key!r}")
        k = int(key[0])
        if k < 1:
            raise ValidationError(f"bad degree in key {key!r}")
        (cos_terms if key[1] == "cos" else sin_terms)[k] = val
    K = max(list(cos_terms) + list(sin_terms))
    c = np.zeros(K + 1)
    s = np.zeros(K + 1)
    for k, v in cos_terms.items():
        c[k] = v
    for k, v in sin_terms.items():
        s[k] = v
    c[0] *= _SQRT_2PI
    c[1:] *= _SQRT_PI
    s[1:] *= _SQRT_PI
    return HarmonicSpectrum(2, c, s)


def _parse_coeffs_3d(coeffs):
    items = []
    for key, val in coeffs.items():
        if key in ("a0", 0):
            key = (0, 0)
        try:
            l, m = int(key[0]), int(key[1])
        except (TypeError, ValueError, IndexError):
            raise ValidationError(f"bad 3-D coefficient key {key!r}") from None
        if l < 0 or abs(m) > l:
            raise ValidationError(f"bad 3-D coefficient key {key!r}")
        val = float(val)
        if not math.isfinite(val):
            raise ValidationError(f"non-finite coefficient at {key!r}")
        items.append((l, m, val))
    L = max([1] + [l for l, _, _ in items])
    C = np.zeros((L + 1, L + 1))
    S = np.zeros((L + 1, L + 1))
    for l, m, v in items:
        if m >= 0:
            C[l, m] = v * _SQRT_4PI
        else:
            S[l, -m] = v * _SQRT_4PI
    return HarmonicSpectrum(3, C, S)


def spectrum_to_amplitudes(spec):
    """Inverse of the coefficient parsing: orthonormal spectrum to amplitude map."""
    out = {}
    if spec.dim == 2:
        out[0] = float(spec.cos[0] / _SQRT_2PI)
        for k in range(1, spec.max_degree + 1):
            if spec.cos[k]:
                out[(k, "cos")] = float(spec.cos[k] / _SQRT_PI)
            if spec.sin[k]:
                out[(k, "sin")] = float(spec.sin[k] / _SQRT_PI)
        return out
    for (l, m), v in spec.to_dict().items():
        out[(l, m)] = v / _SQRT_4PI
    out.setdefault((0, 0), 0.0)
    return out


# ---------------------------------------------------------------------------
# support bodies


class SupportBody:
    """Convex body given by a band-limited support function.

    Construct with :func:`make_support_body`, :func:`make_ball` or
    :meth:`from_spectrum`.  Samples and curvature data on the grid are
    computed once at construction.

    Attributes
    ----------
    h : ndarray
        Support function at the grid directions.
    radii : ndarray
        Principal radii of curvature per node, shape ``(npts, dim-1)``.
    s1, s2 : ndarray
        Normalised elementary symmetric functions of the radii.  In 2-D
        ``s1 = h + h''`` and ``s2`` is undefined (``None``); in 3-D ``s1`` is the
        mean radius and ``s2`` the product (the Gauss-map Jacobian).
    min_slack : float
        Smallest principal radius on the grid (the convexity certificate).
    """

    def __init__(self, spectrum, grid, validate=True, tol=CONVEXITY_TOL):
        if spectrum.dim != grid.dim:
            raise ValidationError("spectrum and grid dimensions differ")
        K = spectrum.max_degree
        limit = grid.n // 4 if grid.dim == 2 else min(spectral.MAX_SPHERE_DEGREE, grid.n_phi // 4)
        if K > limit:
            raise ValidationError(f"degree {K} exceeds grid limit {limit}")
        self.dim = grid.dim
        self.spectrum = spectrum
        self.grid = grid
        self._compute()
        a0 = self.a0
        self.tol = tol * max(abs(a0), 1e-300)
        if validate:
            self.validate()

    @classmethod
    def from_spectrum(cls, spectrum, grid=None, validate=True):
        return cls(spectrum, grid or default_grid(spectrum.dim), validate=validate)

    @classmethod
    def from_samples(cls, samples, grid, max_degree=None, validate=True):
        """Fit a support body to support-function samples on ``grid``."""
        spec = spectral.analyze(samples, grid, max_degree=max_degree)
        return cls(spec, grid, validate=validate)

    def _compute(self):
        g, sp = self.grid, self.spectrum
        if self.dim == 2:
            self.h = sp.synthesize(g)
            self.dh = sp.synthesize(g, 1)
            self.d2h = sp.synthesize(g, 2)
            self.s1 = self.h + self.d2h
            self.s2 = None
            self.radii = self.s1[:, None]
            self.gradient = np.column_stack([-np.sin(g.theta), np.cos(g.theta)]) * self.dh[:, None]
            self.min_slack = float(self.s1.min())
            worst = int(np.argmin(self.s1))
            self.worst_direction = float(g.theta[worst])
            return
        tr = spectral.sphere_transform(g, sp.max_degree)
        C, S = sp.cos, sp.sin
        f = tr.synthesize(C, S)
        ft = tr.synthesize(C, S, dtheta=1)
        fp = tr.synthesize(C, S, dphi=1)
        ftt = tr.synthesize(C, S, dtheta=2)
        ftp = tr.synthesize(C, S, dtheta=1, dphi=1)
        fpp = tr.synthesize(C, S, dphi=2)
        st, ct = np.sin(g.theta), np.cos(g.theta)
        cot = ct / st
        a = ftt + f
        b = (ftp - cot * fp) / st
        d = fpp / st**2 + cot * ft + f
        half_tr = 0.5 * (a + d)
        disc = np.sqrt(0.25 * (a - d) ** 2 + b * b)
        self.h = f
        self.radii = np.column_stack([half_tr - disc, half_tr + disc])
        self.s1 = half_tr
        self.s2 = a * d - b * b
        phi = g.phi
        e_t = np.column_stack([ct * np.cos(phi), ct * np.sin(phi), -st])
        e_p = np.column_stack([-np.sin(phi), np.cos(phi), np.zeros_like(phi)])
        self.gradient = ft[:, None] * e_t + (fp / st)[:, None] * e_p
        self.min_slack = float(self.radii[:, 0].min())
        worst = int(np.argmin(self.radii[:, 0]))
        self.worst_direction = (float(g.theta[worst]), float(g.phi[worst]))

    @property
    def a0(self):
        """Constant term of the support function (mean of h)."""
        if self.dim == 2:
            return float(self.spectrum.cos[0] / _SQRT_2PI)
        return float(self.spectrum.cos[0, 0] / _SQRT_4PI)

    @property
    def coeffs(self):
        """Amplitude map in the user-facing convention."""
        return spectrum_to_amplitudes(self.spectrum)

    @property
    def max_degree(self):
        return self.spectrum.max_degree

    @property
    def is_convex(self):
        return self.min_slack > -self.tol

    def validate(self):
        if not self.is_convex:
            raise NotConvex(self.min_slack, self.worst_direction)
        i = int(np.argmin(self.h))
        if self.h[i] <= 0.0:
            if self.dim == 2:
                direction = float(self.grid.theta[i])
            else:
                direction = (float(self.grid.theta[i]), float(self.grid.phi[i]))
            raise NonPositiveSupport(direction, self.h[i])
        return self

    def boundary(self):
        """Boundary points ``grad h + h omega`` at the grid directions."""
        return self.gradient + self.h[:, None] * self.grid.points

    def support(self, directions):
        """Exact support function at arbitrary directions.

        ``directions`` are angles (2-D) or an array of ``(theta, phi)`` pairs (3-D).
        """
        sp = self.spectrum
        if self.dim == 2:
            t = np.asarray(directions, dtype=float)
            k = np.arange(1, sp.max_degree + 1)
            kt = t[..., None] * k
            return (
                sp.cos[0] / _SQRT_2PI
                + (np.cos(kt) @ sp.cos[1:] + np.sin(kt) @ sp.sin[1:]) / _SQRT_PI
            )
        d = np.asarray(directions, dtype=float)
        return spectral.sh_evaluate(sp.cos, sp.sin, d[..., 0], d[..., 1])

    def __repr__(self):
        return f"SupportBody(dim={self.dim}, degree={self.max_degree}, grid={self.grid.shape})"


def make_support_body(dim, coeffs, grid_resolution=None, validate=True):
    """Build and validate a support body from an amplitude map.

    Parameters
    ----------
    dim : int
        2 or 3.
    coeffs : dict
        Amplitudes, see the module docstring for the key conventions.
    grid_resolution : int, optional
        Number of angles (2-D, a power of two) or Gauss-Legendre latitudes (3-D).

    Examples
    --------
    >>> b = make_support_body(2, {0: 1.0, (3, "cos"): 0.1})
    >>> round(b.min_slack, 12)
    0.2
    """
    if dim == 2:
        if grid_resolution is not None:
            n = int(grid_resolution)
            if n < 8 or n & (n - 1):
                raise ValidationError("2-D grid resolution must be a power of two")
        spec = _parse_coeffs_2d(coeffs)
    elif dim == 3:
        spec = _parse_coeffs_3d(coeffs)
    else:
        raise ValidationError("dim must be 2 or 3")
    return SupportBody(spec, default_grid(dim, grid_resolution), validate=validate)


def make_ball(dim=2, r=1.0, center=None, grid_resolution=None):
    """Ball of radius ``r`` as a support body."""
    if r <= 0:
        raise ValidationError("radius must be positive")
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    if c.shape != (dim,):
        raise ValidationError("center has the wrong dimension")
    if dim == 2:
        coeffs = {0: r, (1, "cos"): c[0], (1, "sin"): c[1]}
    else:
        # omega_x, omega_y, omega_z in the unit-mean-square basis
        k = 1.0 / math.sqrt(3.0)
        coeffs = {(0, 0): r, (1, 1): c[0] * k, (1, -1): c[1] * k, (1, 0): c[2] * k}
    return make_support_body(dim, coeffs, grid_resolution)


# ---------------------------------------------------------------------------
# polygons


class Polygon2D:
    """Convex polygon with counter-clockwise vertices."""

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValidationError("need at least three 2-D vertices")
        if not np.all(np.isfinite(v)):
            raise ValidationError("non-finite vertex")
        e = np.roll(v, -1, axis=0) - v
        diam = float(np.max(np.linalg.norm(v[:, None] - v[None], axis=-1)))
        if np.min(np.linalg.norm(e, axis=1)) <= 1e-12 * diam:
            raise ValidationError("repeated vertex")
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross < -1e-14 * diam**2):
            raise ValidationError("vertices are not convex in counter-clockwise order")
        self.vertices = v
        self.vertices.setflags(write=False)
        self.dim = 2
        if self.area <= 0:
            raise ValidationError("polygon has non-positive area")

    @classmethod
    def from_points(cls, points):
        """Convex hull of a point cloud."""
        from scipy.spatial import ConvexHull

        pts = np.asarray(points, dtype=float)
        hull = ConvexHull(pts)
        return cls(pts[hull.vertices])  # scipy returns 2-D hulls counter-clockwise

    @property
    def edges(self):
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def edge_lengths(self):
        return np.linalg.norm(self.edges, axis=1)

    @property
    def perimeter(self):
        return float(self.edge_lengths.sum())

    @property
    def area(self):
        x, y = self.vertices.T
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @property
    def diameter(self):
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None] - v[None], axis=-1)))

    @property
    def exterior_angles(self):
        """Turning angle at each vertex (the curvature atoms)."""
        e = self.edges
        prev = np.roll(e, 1, axis=0)
        cross = prev[:, 0] * e[:, 1] - prev[:, 1] * e[:, 0]
        dot = np.einsum("ij,ij->i", prev, e)
        return np.arctan2(cross, dot)

    def support(self, theta):
        t = np.asarray(theta, dtype=float)
        w = np.stack([np.cos(t), np.sin(t)], axis=-1)
        return np.max(w @ self.vertices.T, axis=-1)

    def __repr__(self):
        return f"Polygon2D({len(self.vertices)} vertices)"


def polygon_support_samples(polygon, grid=None):
    """Exact support values ``max_v <v, omega>`` at the grid angles."""
    grid = grid or default_grid(2)
    return polygon.support(grid.theta)


# ---------------------------------------------------------------------------
# radial graphs


class RadialBody:
    """Star-shaped body ``{r omega : 0 <= r <= rho(omega)}`` with band-limited rho.

    Parameters
    ----------
    spectrum : HarmonicSpectrum
        Orthonormal expansion of ``rho``.
    grid : DirectionGrid, optional
    """

    def __init__(self, spectrum, grid=None):
        grid = grid or default_grid(spectrum.dim)
        self.dim = spectrum.dim
        self.grid = grid
        self.spectrum = spectrum
        self.rho = spectrum.synthesize(grid)
        if np.min(self.rho) <= 0:
            raise ValidationError("radial function must be positive")
        self.grad_rho = spectrum.gradient_samples(grid)
        if self.dim == 2:
            self.drho = spectrum.synthesize(grid, 1)
            self.d2rho = spectrum.synthesize(grid, 2)

    @property
    def points(self):
        return self.rho[:, None] * self.grid.points

    @property
    def area_element(self):
        """Boundary measure per unit solid angle."""
        g2 = np.einsum("ij,ij->i", self.grad_rho, self.grad_rho)
        return self.rho ** (self.dim - 2) * np.sqrt(self.rho**2 + g2)

    def __repr__(self):
        return f"RadialBody(dim={self.dim}, degree={self.spectrum.max_degree})"


class StarBody2D(RadialBody):
    """Planar star-shaped region from radial samples on a uniform angle grid.

    Accepts either ``N`` samples or ``N + 1`` with the last repeating the first.
    Derivatives are spectral, so samples should resolve rho.
    """

    def __init__(self, rho):
        r = np.asarray(rho, dtype=float).ravel()
        if r.size >= 2 and r.size % 2 == 1 and r[0] == r[-1]:
            r = r[:-1]
        if r.size < 8:
            raise ValidationError("need at least 8 radial samples")
        if np.any(r <= 0) or not np.all(np.isfinite(r)):
            raise ValidationError("radial samples must be positive and finite")
        grid = spectral.DirectionGrid(2, r.size)
        c, s = spectral._circle_analyze_full(r)
        K = (r.size - 1) // 2
        super().__init__(HarmonicSpectrum(2, c[: K + 1], s[: K + 1]), grid)
        self.rho = r


# ---------------------------------------------------------------------------
# cylinder


@dataclass(frozen=True)
class Cylinder3D:
    """Solid cylinder of radius ``eps`` and height ``L`` about ``center``."""

    eps: float
    L: float
    center: tuple = field(default=(0.0, 0.0, 0.0))
    dim: int = field(default=3, init=False)

    def __post_init__(self):
        if not (self.eps > 0 and self.L > 0):
            raise ValidationError("cylinder needs eps > 0 and L > 0")
        if len(self.center) != 3:
            raise ValidationError("cylinder center must be 3-D")


# ---------------------------------------------------------------------------
# views and transforms


@dataclass
class BoundarySamples:
    points: np.ndarray
    normals: np.ndarray
    radii: np.ndarray


def boundary_points(body):
    """Boundary points, outward normals and principal radii on the body's grid."""
    if isinstance(body, SupportBody):
        return BoundarySamples(body.boundary(), body.grid.points.copy(), body.radii.copy())
    if isinstance(body, Polygon2D):
        v = body.vertices
        e = body.edges
        n = np.column_stack([e[:, 1], -e[:, 0]]) / body.edge_lengths[:, None]
        return BoundarySamples(v.copy(), n, np.zeros((len(v), 1)))
    raise TypeError(f"no boundary sampling for {type(body).__name__}")


def transform(body, translation=None, scale=1.0):
    """Translate by ``translation`` then dilate by ``scale`` about the origin.

    The support function maps as ``h -> scale * (h + <translation, omega>)``.
    """
    if not scale > 0:
        raise ValidationError("scale must be positive")
    x0 = np.zeros(body.dim) if translation is None else np.asarray(translation, dtype=float)
    if isinstance(body, Polygon2D):
        return Polygon2D(scale * (body.vertices + x0))
    if isinstance(body, SupportBody):
        sp = body.spectrum
        c, s = sp.cos.copy(), sp.sin.copy()
        if sp.max_degree == 0:
            # room for the degree-one (translation) terms
            pad = ((0, 1),) if body.dim == 2 else ((0, 1), (0, 1))
            c, s = np.pad(c, pad), np.pad(s, pad)
        if body.dim == 2:
            c[1] += x0[0] * _SQRT_PI
            s[1] += x0[1] * _SQRT_PI
        else:
            k = _SQRT_4PI / math.sqrt(3.0)
            c[1, 1] += x0[0] * k
            s[1, 1] += x0[1] * k
            c[1, 0] += x0[2] * k
        new = HarmonicSpectrum(body.dim, scale * c, scale * s)
        return SupportBody(new, body.grid, validate=False).validate()
    if isinstance(body, Cylinder3D):
        c = scale * (np.asarray(body.center) + x0)
        return Cylinder3D(scale * body.eps, scale * body.L, tuple(float(t) for t in c))
    if isinstance(body, RadialBody):
        if np.any(x0 != 0):
            raise ValidationError("radial bodies support dilation only")
        return RadialBody(body.spectrum.scaled(scale), body.grid)
    raise TypeError(f"cannot transform {type(body).__name__}")


# ---------------------------------------------------------------------------
# JSON


def body_to_json(body):
    """Canonical JSON-ready dict in the input schema."""
    if isinstance(body, SupportBody):
        amps = body.coeffs
        if body.dim == 2:
            K = body.max_degree
            return {
                "type": "support",
                "dim": 2,
                "a0": amps.get(0, 0.0),
                "cos": [amps.get((k, "cos"), 0.0) for k in range(1, K + 1)],
                "sin": [amps.get((k, "sin"), 0.0) for k in range(1, K + 1)],
            }
        return {
            "type": "support",
            "dim": 3,
            "coeffs": [[l, m, v] for (l, m), v in sorted(amps.items())],
        }
    if isinstance(body, Polygon2D):
        return {"type": "polygon", "vertices": body.vertices.tolist()}
    if isinstance(body, StarBody2D):
        return {"type": "star", "rho": body.rho.tolist()}
    if isinstance(body, Cylinder3D):
        return {"type": "cylinder", "eps": body.eps, "L": body.L, "center": list(body.center)}
    raise TypeError(f"cannot serialise {type(body).__name__}")


def body_from_json(data, grid_resolution=None):
    """Build a body from the JSON schema (dict or JSON text)."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, dict) or "type" not in data:
        raise ValidationError("body JSON must be an object with a 'type' field")
    kind = data["type"]
    try:
        if kind == "support":
            dim = int(data.get("dim", 2))
            if dim == 2:
                coeffs = {0: data.get("a0", 0.0)}
                for k, v in enumerate(data.get("cos", []), start=1):
                    coeffs[(k, "cos")] = v
                for k, v in enumerate(data.get("sin", []), start=1):
                    coeffs[(k, "sin")] = v
            else:
                coeffs = {(0, 0): data.get("a0", 0.0)}
                for l, m, v in data.get("coeffs", []):
                    coeffs[(int(l), int(m))] = coeffs.get((int(l), int(m)), 0.0) + v
            return make_support_body(dim, coeffs, grid_resolution)
        if kind == "polygon":
            return Polygon2D(data["vertices"])
        if kind == "star":
            return StarBody2D(data["rho"])
        if kind == "cylinder":
            return Cylinder3D(float(data["eps"]), float(data["L"]), tuple(data.get("center", (0, 0, 0))))
        if kind == "ball":
            dim = int(data.get("dim", 2))
            return make_ball(dim, float(data.get("r", 1.0)), data.get("center"), grid_resolution)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed {kind!r} body: {exc}") from None
    raise ValidationError(f"unknown body type {kind!r}")


def fingerprint(body):
    """SHA-256 of the canonical JSON serialisation (first 16 hex digits)."""
    text = json.dumps(body_to_json(body), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]
