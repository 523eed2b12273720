"""Harmonic analysis on the circle and on the 2-sphere.

All coefficient arrays in this module refer to *orthonormal* real bases:

* S^1: ``1/sqrt(2 pi)``, ``cos(k t)/sqrt(pi)``, ``sin(k t)/sqrt(pi)``;
* S^2: real spherical harmonics ``Y_{l,m}`` built from fully normalised
  associated Legendre functions, ``sqrt(2) p_l^m cos(m phi)`` for ``m > 0``
  and ``sqrt(2) p_l^m sin(m phi)`` for the sine family.

Sphere grids are Gauss-Legendre in ``cos(theta)`` times uniform longitudes,
so band-limited products are integrated exactly.
"""

import functools
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import AliasingSuspected, OutOfDomain, ZeroMeanViolated

DEFAULT_CIRCLE_N = 2048
DEFAULT_SPHERE_SHAPE = (64, 128)
MAX_SPHERE_DEGREE = 24
ALIASING_THRESHOLD = 1e-6

__all__ = [
    "DirectionGrid",
    "HarmonicSpectrum",
    "InterpCheck",
    "SphereTransform",
    "analyze",
    "circle_grid",
    "default_grid",
    "f_function",
    "f_inverse",
    "g_function",
    "interp_check",
    "legendre_tables",
    "sobolev_norms",
    "sphere_grid",
    "sphere_transform",
]


class DirectionGrid:
    """Quadrature grid of unit directions.

    ``dim == 2``: ``n`` uniform angles on ``[0, 2 pi)``.
    ``dim == 3``: ``n`` Gauss-Legendre latitudes times ``n_phi`` uniform
    longitudes, flattened latitude-major.
    """

    def __init__(self, dim, n, n_phi=None):
        if dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        self.dim = dim
        if dim == 2:
            if n < 8:
                raise ValueError("circle grid needs at least 8 nodes")
            self.n = int(n)
            self.shape = (self.n,)
            self.theta = 2.0 * np.pi * np.arange(self.n) / self.n
            self.weights = np.full(self.n, 2.0 * np.pi / self.n)
            self.points = np.column_stack([np.cos(self.theta), np.sin(self.theta)])
        else:
            n_phi = 2 * n if n_phi is None else int(n_phi)
            self.n, self.n_phi = int(n), n_phi
            self.shape = (self.n, n_phi)
            x, w = np.polynomial.legendre.leggauss(self.n)
            # north to south, so theta increases
            self.lat_x = x[::-1].copy()
            self.lat_weights = w[::-1].copy()
            self.lat_theta = np.arccos(self.lat_x)
            self.phi_nodes = 2.0 * np.pi * np.arange(n_phi) / n_phi
            T, Pn = np.meshgrid(self.lat_theta, self.phi_nodes, indexing="ij")
            self.theta = T.ravel()
            self.phi = Pn.ravel()
            W = np.outer(self.lat_weights, np.full(n_phi, 2.0 * np.pi / n_phi))
            self.weights = W.ravel()
            st = np.sin(self.theta)
            self.points = np.column_stack(
                [st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)]
            )
        for arr in (self.theta, self.weights, self.points):
            arr.setflags(write=False)

    @property
    def size(self):
        return self.weights.size

    @property
    def surface_measure(self):
        return 2.0 * np.pi if self.dim == 2 else 4.0 * np.pi

    def integrate(self, values):
        """Quadrature of samples (last axis runs over grid nodes)."""
        return np.asarray(values) @ self.weights

    def integrate_coarse(self, values):
        """Same quadrature on the half grid (every other angle or longitude).

        The difference to :meth:`integrate` is the a-posteriori error estimate
        used throughout the package.
        """
        values = np.asarray(values)
        if self.dim == 2:
            return values[..., ::2] @ (2.0 * self.weights[::2])
        v = values.reshape(values.shape[:-1] + self.shape)[..., ::2]
        w = 2.0 * self.weights.reshape(self.shape)[:, ::2]
        return np.sum(v * w, axis=(-2, -1))

    def integrate_with_error(self, values):
        full = self.integrate(values)
        return full, abs(full - self.integrate_coarse(values))

    def __repr__(self):
        return f"DirectionGrid(dim={self.dim}, shape={self.shape})"


@functools.lru_cache(maxsize=16)
def circle_grid(n=None):
    if n is None:
        n = int(os.environ.get("ISO_GRID_N", DEFAULT_CIRCLE_N))
    return DirectionGrid(2, n)


@functools.lru_cache(maxsize=8)
def sphere_grid(n_lat=DEFAULT_SPHERE_SHAPE[0], n_phi=DEFAULT_SPHERE_SHAPE[1]):
    return DirectionGrid(3, n_lat, n_phi)


def default_grid(dim, resolution=None):
    if dim == 2:
        return circle_grid(resolution)
    if resolution is None:
        return sphere_grid()
    return sphere_grid(int(resolution), 2 * int(resolution))


# ---------------------------------------------------------------------------
# Legendre machinery


def legendre_tables(x, lmax, derivs=2):
    """Fully normalised associated Legendre functions and theta-derivatives.

    Returns a tuple of ``derivs + 1`` arrays of shape ``x.shape + (lmax+1, lmax+1)``
    indexed ``[..., l, m]`` (zero where ``m > l``).  Normalisation makes
    ``sqrt(2) p_l^m(cos t) cos(m phi)`` orthonormal on S^2 (no ``sqrt(2)`` for m = 0).
    Derivatives are taken with respect to the polar angle and require
    ``|x| < 1``.
    """
    x = np.asarray(x, dtype=float)
    L = int(lmax)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    P = np.zeros(x.shape + (L + 1, L + 1))
    P[..., 0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, L + 1):
        P[..., m, m] = math.sqrt((2 * m + 1) / (2 * m)) * s * P[..., m - 1, m - 1]
    for m in range(0, L):
        P[..., m + 1, m] = math.sqrt(2 * m + 3) * x * P[..., m, m]
    for l in range(2, L + 1):
        m = np.arange(0, l - 1)
        a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
        P[..., l, : l - 1] = a * (x[..., None] * P[..., l - 1, : l - 1] - b * P[..., l - 2, : l - 1])
    if derivs == 0:
        return (P,)
    l = np.arange(L + 1)[:, None].astype(float)
    m = np.arange(L + 1)[None, :].astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.sqrt(np.where(m <= l, (2 * l + 1) / np.maximum(2 * l - 1, 1) * (l * l - m * m), 0.0))
    Plm1 = np.zeros_like(P)
    Plm1[..., 1:, :] = P[..., :-1, :]
    xs = x[..., None, None]
    ss = s[..., None, None]
    dP = (l * xs * P - c * Plm1) / ss
    if derivs == 1:
        return P, dP
    d2P = -(xs / ss) * dP - (l * (l + 1) - m * m / ss**2) * P
    return P, dP, d2P


def _m_scale(L):
    sc = np.full(L + 1, math.sqrt(2.0))
    sc[0] = 1.0
    return sc


class SphereTransform:
    """Synthesis/analysis between real SH coefficients and a sphere grid."""

    def __init__(self, grid, lmax):
        if grid.dim != 3:
            raise ValueError("SphereTransform needs a sphere grid")
        self.grid = grid
        self.lmax = L = int(lmax)
        P, dP, d2P = legendre_tables(grid.lat_x, L, derivs=2)
        sc = _m_scale(L)
        self._tables = tuple(T * sc for T in (P, dP, d2P))
        m = np.arange(L + 1)
        self._m = m.astype(float)
        self._cos = np.cos(np.outer(m, grid.phi_nodes))
        self._sin = np.sin(np.outer(m, grid.phi_nodes))

    def synthesize(self, C, S, dtheta=0, dphi=0):
        """Grid samples (flattened) of the field or one of its partial derivatives."""
        T = self._tables[dtheta]
        Ac = np.einsum("ilm,lm->im", T, C)
        As = np.einsum("ilm,lm->im", T, S)
        for _ in range(dphi):
            Ac, As = self._m * As, -self._m * Ac
        return (Ac @ self._cos + As @ self._sin).ravel()

    def analyze(self, values):
        f = np.asarray(values, dtype=float).reshape(self.grid.shape)
        dphi = 2.0 * np.pi / self.grid.n_phi
        Fc = f @ self._cos.T * dphi
        Fs = f @ self._sin.T * dphi
        w = self.grid.lat_weights
        P = self._tables[0]
        C = np.einsum("i,ilm,im->lm", w, P, Fc)
        S = np.einsum("i,ilm,im->lm", w, P, Fs)
        S[:, 0] = 0.0
        return C, S


@functools.lru_cache(maxsize=16)
def sphere_transform(grid, lmax):
    return SphereTransform(grid, lmax)


def sh_evaluate(C, S, theta, phi):
    """Evaluate an orthonormal real SH expansion at arbitrary directions."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    L = C.shape[0] - 1
    (P,) = legendre_tables(np.cos(theta), L, derivs=0)
    P = P * _m_scale(L)
    m = np.arange(L + 1)
    cm = np.cos(phi[..., None] * m)
    sm = np.sin(phi[..., None] * m)
    return np.einsum("...lm,lm,...m->...", P, C, cm) + np.einsum("...lm,lm,...m->...", P, S, sm)


# ---------------------------------------------------------------------------
# spectra


@dataclass
class HarmonicSpectrum:
    """Coefficients in an orthonormal real harmonic basis.

    For ``dim == 2`` the arrays have shape ``(K+1,)``: ``cos[k]`` and ``sin[k]``
    multiply ``cos(k t)/sqrt(pi)`` and ``sin(k t)/sqrt(pi)`` (``cos[0]`` multiplies
    ``1/sqrt(2 pi)``, ``sin[0]`` is unused).  For ``dim == 3`` they have shape
    ``(L+1, L+1)`` indexed ``[l, m]``.
    """

    dim: int
    cos: np.ndarray
    sin: np.ndarray

    @property
    def max_degree(self):
        return self.cos.shape[0] - 1

    def degrees(self):
        return np.arange(self.max_degree + 1)

    def eigenvalues(self):
        """Laplace-Beltrami eigenvalues ``k(n+k-2)`` per degree."""
        k = self.degrees()
        return k * (self.dim + k - 2)

    def degree_energy(self):
        """Sum of squared coefficients per degree."""
        if self.dim == 2:
            return self.cos**2 + self.sin**2
        return np.sum(self.cos**2 + self.sin**2, axis=1)

    @property
    def mean_coefficient(self):
        return float(self.cos[0] if self.dim == 2 else self.cos[0, 0])

    def without_degrees(self, degrees):
        c, s = self.cos.copy(), self.sin.copy()
        for k in degrees:
            if k <= self.max_degree:
                c[k] = 0.0
                s[k] = 0.0
        return HarmonicSpectrum(self.dim, c, s)

    def scaled(self, factor):
        return HarmonicSpectrum(self.dim, self.cos * factor, self.sin * factor)

    def synthesize(self, grid, derivative=0):
        """Samples on ``grid``; for dim 2, ``derivative`` is the order of d/dt."""
        if grid.dim != self.dim:
            raise ValueError("grid dimension mismatch")
        if self.dim == 2:
            return _circle_synth(self.cos, self.sin, grid.n, derivative)
        if derivative:
            raise ValueError("use gradient_samples for sphere derivatives")
        tr = sphere_transform(grid, self.max_degree)
        return tr.synthesize(self.cos, self.sin)

    def gradient_samples(self, grid):
        """Tangential gradient on the grid as an array (npts, dim)."""
        if self.dim == 2:
            d = _circle_synth(self.cos, self.sin, grid.n, 1)
            return np.column_stack([-np.sin(grid.theta) * d, np.cos(grid.theta) * d])
        tr = sphere_transform(grid, self.max_degree)
        ft = tr.synthesize(self.cos, self.sin, dtheta=1)
        fp = tr.synthesize(self.cos, self.sin, dphi=1) / np.sin(grid.theta)
        t, p = grid.theta, grid.phi
        e_t = np.column_stack([np.cos(t) * np.cos(p), np.cos(t) * np.sin(p), -np.sin(t)])
        e_p = np.column_stack([-np.sin(p), np.cos(p), np.zeros_like(p)])
        return ft[:, None] * e_t + fp[:, None] * e_p

    def to_dict(self):
        out = {}
        if self.dim == 2:
            for k in range(self.max_degree + 1):
                if self.cos[k]:
                    out[(k, "cos")] = float(self.cos[k])
                if k and self.sin[k]:
                    out[(k, "sin")] = float(self.sin[k])
        else:
            L = self.max_degree
            for l in range(L + 1):
                for m in range(l + 1):
                    if self.cos[l, m]:
                        out[(l, m)] = float(self.cos[l, m])
                    if m and self.sin[l, m]:
                        out[(l, -m)] = float(self.sin[l, m])
        return out


def _circle_synth(cos, sin, n, derivative=0):
    """Samples of an orthonormal Fourier expansion on n uniform angles."""
    K = cos.shape[0] - 1
    if 2 * K >= n:
        raise ValueError("grid too coarse for the requested degree")
    Z = np.zeros(n // 2 + 1, dtype=complex)
    Z[0] = n * cos[0] / math.sqrt(2.0 * math.pi)
    k = np.arange(1, K + 1)
    Z[1 : K + 1] = 0.5 * n * (cos[1:] - 1j * sin[1:]) / math.sqrt(math.pi)
    if derivative:
        Z = Z * (1j * np.arange(Z.size)) ** derivative
    return np.fft.irfft(Z, n)


def _circle_analyze_full(samples):
    f = np.asarray(samples, dtype=float)
    n = f.size
    Z = np.fft.rfft(f)
    c = np.empty(Z.size)
    s = np.empty(Z.size)
    c[0] = Z[0].real / n * math.sqrt(2.0 * math.pi)
    s[0] = 0.0
    c[1:] = 2.0 * Z[1:].real / n * math.sqrt(math.pi)
    s[1:] = -2.0 * Z[1:].imag / n * math.sqrt(math.pi)
    if n % 2 == 0:
        # Nyquist mode is cos only and carries half weight
        c[-1] *= 0.5
        s[-1] = 0.0
    return c, s


def analyze(samples, grid, max_degree=None, strict=True):
    """Project grid samples onto the orthonormal harmonic basis.

    Raises :class:`AliasingSuspected` (when ``strict``) if more than a 1e-6
    fraction of the energy lies outside the returned band.
    """
    samples = np.asarray(samples, dtype=float)
    if grid.dim == 2:
        N = grid.n
        K = N // 4 if max_degree is None else int(max_degree)
        if N < 4 * K:
            raise ValueError(f"{N} samples cannot resolve degree {K}")
        c, s = _circle_analyze_full(samples)
        spec = HarmonicSpectrum(2, c[: K + 1].copy(), s[: K + 1].copy())
        total = np.sum(c**2 + s**2)
        tail = np.sum(c[K + 1 :] ** 2 + s[K + 1 :] ** 2)
    else:
        L = min(MAX_SPHERE_DEGREE, grid.n_phi // 4) if max_degree is None else int(max_degree)
        if grid.n_phi < 4 * L or grid.n < 2 * L:
            raise ValueError(f"grid {grid.shape} cannot resolve degree {L}")
        tr = sphere_transform(grid, L)
        C, S = tr.analyze(samples)
        spec = HarmonicSpectrum(3, C, S)
        total = grid.integrate(samples**2)
        tail = grid.integrate((samples - tr.synthesize(C, S)) ** 2)
    if strict and total > 0 and tail / total > ALIASING_THRESHOLD:
        raise AliasingSuspected(tail / total)
    return spec


def sobolev_norms(spec):
    """L^2 norm and gradient L^2 norm, using the exact eigenvalue weights."""
    e = spec.degree_energy()
    return math.sqrt(float(e.sum())), math.sqrt(float(np.dot(spec.eigenvalues(), e)))


@dataclass
class InterpCheck:
    lhs: float
    rhs: float
    holds: bool
    note: str = ""


_LOG_FORM_NOTE = (
    "n=3 branch evaluated literally: 4*|grad v|_2^2 * log(8e*|grad v|_inf^(n-1) / |grad v|_2^2); "
    "the exponent n-1 on the sup norm is read as a square"
)


def interp_check(spec, sup_norm=None, sup_grad_norm=None, grid=None):
    """Evaluate both sides of the sup-norm interpolation bound for zero-mean v.

    ``lhs = |v|_inf^(n-1)``; ``rhs = pi |grad v|_2`` for n = 2 and the
    logarithmic form for n = 3.  Sup norms are measured on ``grid`` when
    they are not supplied.
    """
    n = spec.dim
    _, grad2 = sobolev_norms(spec)
    scale = max(1.0, math.sqrt(float(spec.degree_energy().sum())))
    if abs(spec.mean_coefficient) > 1e-12 * scale:
        raise ZeroMeanViolated(f"mean coefficient {spec.mean_coefficient:.3g} is not zero")
    if sup_norm is None or sup_grad_norm is None:
        grid = grid or default_grid(n)
        if sup_norm is None:
            sup_norm = float(np.max(np.abs(spec.synthesize(grid))))
        if sup_grad_norm is None:
            g = spec.gradient_samples(grid)
            sup_grad_norm = float(np.max(np.linalg.norm(g, axis=1)))
    lhs = sup_norm ** (n - 1)
    if grad2 == 0.0:
        return InterpCheck(lhs, 0.0, lhs <= 0.0)
    if n == 2:
        rhs = math.pi * grad2
        return InterpCheck(lhs, rhs, lhs <= rhs)
    rhs = 4.0 * grad2**2 * math.log(8.0 * math.e * sup_grad_norm ** (n - 1) / grad2**2)
    return InterpCheck(lhs, rhs, lhs <= rhs, _LOG_FORM_NOTE)


# ---------------------------------------------------------------------------
# quantitative-rate functions

F_DOMAIN_END = math.exp(-1.0)
F_SUP = math.sqrt(F_DOMAIN_END)


def f_function(t):
    """``sqrt(t log(1/t))`` on ``0 < t < 1/e``."""
    t = float(t)
    if not 0.0 < t <= F_DOMAIN_END:
        raise OutOfDomain(f"t = {t} outside (0, 1/e]")
    return math.sqrt(t * math.log(1.0 / t))


def f_inverse(y):
    """Inverse of :func:`f_function` on the branch where it increases."""
    y = float(y)
    if y == 0.0:
        return 0.0
    if not 0.0 < y < F_SUP:
        raise OutOfDomain(f"y = {y} outside (0, {F_SUP})")
    return optimize.bisect(
        lambda t: t * math.log(1.0 / t) - y * y, 1e-300, F_DOMAIN_END, xtol=1e-300, rtol=1e-15,
        maxiter=2000,
    )


def g_function(s, n):
    """Rate function of the quantitative curvature bounds."""
    s = float(s)
    if s < 0:
        raise OutOfDomain("s must be non-negative")
    if n == 2:
        return s * s
    if n == 3:
        return f_inverse(s * s)
    return s ** ((n + 1) / 2.0)
