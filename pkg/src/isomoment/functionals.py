"""Composite functionals, distances and inequality deficits.

``script_H`` is the normalised infimum ``(1/n) inf_x0 int |x - x0|^2 dmu^G``;
:func:`script_H_unnormalized` drops the ``1/n``.  Every deficit record uses
the sign convention *positive means the inequality holds*.
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from .bodies import Cylinder3D, Polygon2D, RadialBody, SupportBody, fingerprint
from .errors import NonConverged, OpenCurve, SelfIntersection, ValidationError
from .measures import (
    ball_volume,
    boundary_momentum,
    centroid,
    curvature_centroid,
    gauss_weighted_momentum,
    measure_report,
    min_boundary_momentum,
)
from .spectral import default_grid

__all__ = [
    "AsymmetryResult",
    "DeficitRecord",
    "F_ball",
    "F_functional",
    "F_printed_constant",
    "G_beta",
    "I_beta",
    "asymmetry",
    "beta_critical",
    "check_momentum_bound",
    "check_theorem1",
    "hausdorff_distance",
    "matching_radius",
    "script_H",
    "script_H_search",
    "script_H_unnormalized",
    "theorem1_certificate",
]

CSV_FIELDS = ("inequality_id", "beta", "n", "lhs", "rhs", "deficit", "err_bound", "fingerprint", "seed")


def beta_critical(n):
    """Upper threshold ``(n-1)(1 + n/(n+1))`` of the maximality regime."""
    return (n - 1) * (1.0 + n / (n + 1.0))


@dataclass
class DeficitRecord:
    """One inequality evaluation; ``deficit >= 0`` means the inequality holds."""

    inequality_id: str
    beta: float
    n: int
    lhs: float
    rhs: float
    deficit: float
    err_bound: float
    fingerprint: str
    seed: int = None
    certificate: float = None
    flags: tuple = ()
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.deficit):
            raise ValueError("deficit must be finite")
        if not self.err_bound >= 0:
            raise ValueError("error bound must be non-negative")

    @property
    def violated(self):
        """Negative beyond the error bound and a 1e-12 relative roundoff floor."""
        if "regime-mismatch" in self.flags:
            return False
        floor = 1e-12 * max(abs(self.lhs), abs(self.rhs), 1.0)
        return self.deficit < -(self.err_bound + floor)

    def csv_row(self):
        def fmt(x):
            if x is None:
                return ""
            if isinstance(x, float):
                return "%.17g" % x
            return str(x)

        return [fmt(getattr(self, k)) for k in CSV_FIELDS]

    def to_json(self):
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d

    def to_json_text(self):
        return json.dumps(self.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# H, G_beta, I_beta


def _gauss_energy_recentred(body):
    """``sum_{k != 1} (1 + k(n+k-2)) a_k^2`` -- the minimum over centres."""
    sp = body.spectrum
    e = sp.degree_energy()
    e[1] = 0.0
    return float(np.dot(1.0 + sp.eigenvalues(), e))


def script_H_unnormalized(body, return_error=False):
    """``inf_x0 int |x - x0|^2 dmu^G``, attained at the curvature centroid."""
    if isinstance(body, Polygon2D):
        c = curvature_centroid(body)
        val, err = gauss_weighted_momentum(body, c).value, 0.0
    elif isinstance(body, SupportBody):
        val = _gauss_energy_recentred(body)
        err = gauss_weighted_momentum(body, curvature_centroid(body), check=False).difference
    else:
        raise TypeError(f"script_H needs a convex body, got {type(body).__name__}")
    return (val, err) if return_error else val


def script_H(body, return_error=False):
    """Normalised ``(1/n) inf_x0 int |x - x0|^2 dmu^G``.

    Examples
    --------
    >>> from isomoment.bodies import make_support_body
    >>> round(script_H(make_support_body(2, {0: 1.0, (3, "cos"): 0.1})) / math.pi, 12)
    1.05
    """
    val, err = script_H_unnormalized(body, return_error=True)
    n = body.dim
    return (val / n, err / n) if return_error else val / n


def script_H_search(body):
    """Cross-check of :func:`script_H` by direct numerical minimisation over centres."""
    c0 = np.zeros(body.dim)

    def obj(x):
        return gauss_weighted_momentum(body, x, check=False).quadrature

    res = optimize.minimize(obj, c0, method="BFGS", options={"gtol": 1e-12})
    return float(res.fun) / body.dim, res.x


def _lower_quermass(body):
    """``(W_{n-2}, W_{n-1}, error)`` of a body."""
    rep = measure_report(body)
    n = body.dim
    err = rep.errors.get(f"W{n - 2}", 0.0) + rep.errors.get(f"W{n - 1}", 0.0)
    return rep.quermass[n - 2], rep.quermass[n - 1], err


def G_beta(body, beta):
    """``H(E) + beta W_{n-2}(E)``."""
    if beta < 0:
        raise ValidationError("beta must be non-negative")
    Wa, _, _ = _lower_quermass(body)
    return script_H(body) + beta * Wa


def I_beta(body, beta):
    """``(1 + beta)/omega_n - G_beta / W_{n-1}^2``; zero on balls."""
    Wa, Wb, _ = _lower_quermass(body)
    if beta < 0:
        raise ValidationError("beta must be non-negative")
    return (1.0 + beta) / ball_volume(body.dim) - (script_H(body) + beta * Wa) / Wb**2


def theorem1_certificate(body, beta):
    """Spectral form of ``n (G_beta - (1+beta) W_{n-1}^2 / omega_n)``.

    ``sum_{k>=2} [(1+beta) + (1 - beta/(n-1)) k(n+k-2)] a_k^2`` in the orthonormal
    basis; degree one drops out because the functional is translation invariant.
    """
    sp = body.spectrum
    n = body.dim
    lam = sp.eigenvalues()
    w = (1.0 + beta) + (1.0 - beta / (n - 1.0)) * lam
    e = sp.degree_energy()
    return float(np.dot(w[2:], e[2:]))


def check_theorem1(body, beta, seed=None):
    """Evaluate the sharp lower (``beta <= n-1``) or upper (``beta >= beta(n)``) bound.

    ``lhs = G_beta``, ``rhs = (1 + beta) W_{n-1}^2 / omega_n``.  Between the two
    regimes the record is informational and flagged ``regime-mismatch``.
    """
    n = body.dim
    Wa, Wb, err_w = _lower_quermass(body)
    Hval, err_h = script_H(body, return_error=True)
    lhs = Hval + beta * Wa
    rhs = (1.0 + beta) * Wb**2 / ball_volume(n)
    err = err_h + beta * err_w + 2.0 * (1.0 + beta) * Wb * err_w / ball_volume(n)
    flags = ()
    if beta <= n - 1 + 1e-15:
        ineq, deficit = "thm1-lower", lhs - rhs
    elif beta >= beta_critical(n) - 1e-15:
        ineq, deficit = "thm1-upper", rhs - lhs
    else:
        ineq, deficit, flags = "thm1-gap", lhs - rhs, ("regime-mismatch",)
    cert = theorem1_certificate(body, beta) if isinstance(body, SupportBody) else None
    return DeficitRecord(
        inequality_id=ineq,
        beta=float(beta),
        n=n,
        lhs=float(lhs),
        rhs=float(rhs),
        deficit=float(deficit),
        err_bound=float(err),
        fingerprint=fingerprint(body),
        seed=seed,
        certificate=cert,
        flags=flags,
    )


# ---------------------------------------------------------------------------
# momentum functional F


def F_ball(n):
    """``F`` evaluated directly on a ball: ``omega^((n-2)(n+1)) / (n omega)^(n^2-2)``."""
    w = ball_volume(n)
    return w ** ((n - 2) * (n + 1)) / (n * w) ** (n * n - 2)


def F_printed_constant(n):
    """``1/(n omega_n)^(n^2-2)``; agrees with :func:`F_ball` only for n = 2."""
    return 1.0 / (n * ball_volume(n)) ** (n * n - 2)


def F_functional(body, return_parts=False):
    """Scale and translation invariant ``|E|^((n-2)(n+1)) inf M / P^(n^2-1)``."""
    n = body.dim
    rep = measure_report(body)
    M = min_boundary_momentum(body)
    val = rep.volume ** ((n - 2) * (n + 1)) * M / rep.perimeter ** (n * n - 1)
    if return_parts:
        return val, {"volume": rep.volume, "perimeter": rep.perimeter, "momentum": M}
    return val


# ---------------------------------------------------------------------------
# support evaluation helpers


def _support_callable(body):
    if isinstance(body, (SupportBody, Polygon2D)):
        return body.support
    if isinstance(body, Cylinder3D):
        c = np.asarray(body.center, dtype=float)

        def h(d):
            d = np.asarray(d, dtype=float)
            t, p = d[..., 0], d[..., 1]
            w = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], -1)
            return body.eps * np.sin(t) + 0.5 * body.L * np.abs(np.cos(t)) + w @ c

        return h
    raise TypeError(f"no support function for {type(body).__name__}")


def _directions(dim, grid):
    if dim == 2:
        return grid.theta, grid.points
    return np.column_stack([grid.theta, grid.phi]), grid.points


def _unit(dim, d):
    d = np.asarray(d, dtype=float)
    if dim == 2:
        return np.stack([np.cos(d), np.sin(d)], -1)
    t, p = d[..., 0], d[..., 1]
    return np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], -1)


def _pick_grid(*bods):
    for b in bods:
        if isinstance(b, SupportBody):
            return b.grid
    return default_grid(bods[0].dim)


def _local_maxima(vals, dim, grid, count):
    """Indices of the largest grid-local maxima of ``vals``."""
    if dim == 2:
        is_max = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
        idx = np.flatnonzero(is_max)
    else:
        V = vals.reshape(grid.shape)
        is_max = np.ones_like(V, dtype=bool)
        for ax, sh in ((1, 1), (1, -1)):
            is_max &= V >= np.roll(V, sh, axis=ax)
        up = np.vstack([V[:1] * 0 - np.inf, V[:-1]])
        down = np.vstack([V[1:], V[-1:] * 0 - np.inf])
        is_max &= (V >= up) & (V >= down)
        idx = np.flatnonzero(is_max.ravel())
    idx = idx[np.argsort(vals[idx])[::-1]]
    return idx[:count]


def _refine_max_circle(fun, start, spacing):
    res = optimize.minimize_scalar(
        lambda t: -fun(np.array([t]))[0],
        bounds=(start - spacing, start + spacing),
        method="bounded",
        options={"xatol": 1e-13},
    )
    return float(res.x), -float(res.fun)


def _refine_max_sphere(fun, starts, spacing, rounds=8, m=9):
    """Zooming patch search in (theta, phi) around several starts at once."""
    centers = np.array(starts, dtype=float).reshape(-1, 2)
    k = len(centers)
    wt = np.full(k, spacing)
    wp = np.minimum(np.pi, spacing / np.maximum(np.sin(centers[:, 0]), spacing))
    o = np.linspace(-1.0, 1.0, m)
    ot, op = (a.ravel() for a in np.meshgrid(o, o, indexing="ij"))
    best = fun(centers)
    for _ in range(rounds):
        th = np.clip(centers[:, :1] + ot * wt[:, None], 0.0, np.pi)
        ph = centers[:, 1:] + op * wp[:, None]
        pts = np.stack([th, ph], -1)
        vals = fun(pts.reshape(-1, 2)).reshape(k, -1)
        j = np.argmax(vals, axis=1)
        better = vals[np.arange(k), j] > best
        centers[better] = pts[np.arange(k), j][better]
        best = np.maximum(best, vals[np.arange(k), j])
        wt /= 4.0
        wp /= 4.0
    return centers, best


def _refined_sup(fun, dim, grid, dirs, count=6):
    """Sup of ``fun`` over the sphere: grid max refined at the top local maxima."""
    vals = fun(dirs)
    best_i = int(np.argmax(vals))
    best = (dirs[best_i], float(vals[best_i]))
    spacing = 2.0 * np.pi / grid.n if dim == 2 else np.pi / grid.n
    # entries past the grid are earlier maximisers or polygon kinks
    cand = list(_local_maxima(vals[: grid.size], dim, grid, count))
    if best_i not in cand:
        cand.append(best_i)
    if dim == 2:
        found = []
        for i in cand:
            d, v = _refine_max_circle(fun, dirs[i], spacing)
            found.append(d)
            if v > best[1]:
                best = (d, v)
        return best, found
    centers, vals_c = _refine_max_sphere(fun, dirs[cand], spacing)
    j = int(np.argmax(vals_c))
    if vals_c[j] > best[1]:
        best = (centers[j].copy(), float(vals_c[j]))
    return best, list(centers)


def hausdorff_distance(A, B, grid=None):
    """``max_omega |h_A - h_B|`` with local refinement around the grid maxima."""
    if A.dim != B.dim:
        raise ValidationError("bodies live in different dimensions")
    dim = A.dim
    grid = grid or _pick_grid(A, B)
    hA, hB = _support_callable(A), _support_callable(B)
    dirs, _ = _directions(dim, grid)

    def fun(d):
        return np.abs(hA(d) - hB(d))

    (_, val), _ = _refined_sup(fun, dim, grid, dirs)
    return float(val)


# ---------------------------------------------------------------------------
# asymmetry


@dataclass
class AsymmetryResult:
    value: float
    center: np.ndarray
    radius: float
    mode: str
    gap: float = 0.0

    def to_json(self):
        return {
            "value": self.value,
            "center": [float(c) for c in self.center],
            "radius": self.radius,
            "mode": self.mode,
            "gap": self.gap,
        }


def matching_radius(body, mode="perimeter"):
    rep = measure_report(body)
    n = body.dim
    if mode == "perimeter":
        return (rep.perimeter / (n * ball_volume(n))) ** (1.0 / (n - 1))
    if mode == "mean-width":
        return rep.quermass[n - 1] / ball_volume(n)
    raise ValueError("mode must be 'perimeter' or 'mean-width'")


def _chebyshev_lp(hvals, U, r):
    """min_{x,t} t  s.t. |h_j - r - <x, u_j>| <= t."""
    from scipy.optimize import linprog

    m, dim = U.shape
    c = np.zeros(dim + 1)
    c[-1] = 1.0
    ones = np.ones((m, 1))
    A = np.vstack([np.hstack([-U, -ones]), np.hstack([U, -ones])])
    b = np.concatenate([r - hvals, hvals - r])
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * dim + [(0, None)], method="highs")
    if res.status != 0:
        raise NonConverged(float("nan"), float("inf"))
    return res.x[:dim], float(res.x[-1])


def asymmetry(body, mode="perimeter", grid=None, tol=1e-6, max_rounds=30):
    """Scale-free distance to the best ball of matching perimeter or mean width.

    ``(1/r) min_x max_omega |h(omega) - r - <x, omega>|``.  The inner problem is
    a linear Chebyshev fit; it is solved on a direction set that is enlarged
    by the refined maximisers of the current residual until the certified gap
    (continuum max minus discrete optimum) drops below ``tol * r``.
    """
    dim = body.dim
    grid = grid or _pick_grid(body)
    r = matching_radius(body, mode)
    hfun = _support_callable(body)
    gdirs, _ = _directions(dim, grid)
    # the LP starts from a coarse subset; the exchange loop adds maximisers
    if dim == 2:
        adirs = gdirs[:: max(1, grid.n // 256)]
    else:
        sub = gdirs.reshape(grid.shape + (2,))
        adirs = sub[:: max(1, grid.n // 16), :: max(1, grid.n_phi // 16)].reshape(-1, 2)
    if isinstance(body, Polygon2D):
        e = body.edges
        kinks = np.arctan2(-e[:, 0], e[:, 1])
        gdirs = np.concatenate([gdirs, kinks])
        adirs = np.concatenate([adirs, kinks])
    h_grid, u_grid = hfun(gdirs), _unit(dim, gdirs)
    gap = np.inf
    for _ in range(max_rounds):
        x, t = _chebyshev_lp(hfun(adirs), _unit(dim, adirs), r)

        def resid(d, x=x):
            if d is gdirs:
                return np.abs(h_grid - r - u_grid @ x)
            return np.abs(hfun(d) - r - _unit(dim, d) @ x)

        (dbest, vbest), found = _refined_sup(resid, dim, grid, gdirs)
        gap = max(vbest - t, 0.0)
        if gap <= 0.1 * tol * r:
            break
        new = np.array(found + [dbest])
        adirs = np.concatenate([adirs, new]) if dim == 2 else np.vstack([adirs, new])
    if gap > tol * r:
        raise NonConverged(vbest / r, gap / r)
    return AsymmetryResult(float(vbest / r), np.asarray(x), float(r), mode, float(gap / r))


# ---------------------------------------------------------------------------
# boundary momentum bound in the plane


def _as_components(curves):
    if isinstance(curves, (Polygon2D, SupportBody, RadialBody)):
        return [curves]
    if isinstance(curves, np.ndarray) and curves.ndim == 2:
        return [curves]
    return list(curves)


def _closed_polyline(comp):
    if isinstance(comp, Polygon2D):
        return comp.vertices
    pts = np.asarray(comp, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
        raise ValidationError("a curve is an (N, 2) array of points")
    scale = np.ptp(pts, axis=0).max()
    if np.linalg.norm(pts[0] - pts[-1]) > 1e-12 * scale:
        raise OpenCurve("curve must repeat its first point at the end")
    return pts[:-1]


def _segments_cross(P):
    """Best-effort test for proper crossings between non-adjacent segments."""
    m = len(P)
    if m > 4096:
        return False
    A = P
    B = np.roll(P, -1, axis=0)

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (
            r[..., 0] - p[..., 0]
        )

    for i in range(m):
        j = np.arange(i + 2, m)
        if i == 0:
            j = j[j != m - 1]
        if j.size == 0:
            continue
        d1 = orient(A[i], B[i], A[j])
        d2 = orient(A[i], B[i], B[j])
        d3 = orient(A[j], B[j], A[i])
        d4 = orient(A[j], B[j], B[i])
        if np.any((d1 * d2 < 0) & (d3 * d4 < 0)):
            return True
    return False


def _polyline_moments(P):
    """Length, first moment and momentum about 0 of a closed polyline."""
    d = np.roll(P, -1, axis=0) - P
    L = np.linalg.norm(d, axis=1)
    first = L @ (P + 0.5 * d)
    mom = float(np.sum(L * (np.sum(P * P, 1) + np.sum(P * d, 1) + np.sum(d * d, 1) / 3.0)))
    return float(L.sum()), first, mom


def _arclength_resample(P, m=1024):
    Q = np.vstack([P, P[:1]])
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(Q, axis=0), axis=1))])
    t = np.linspace(0.0, s[-1], m, endpoint=False)
    return np.column_stack([np.interp(t, s, Q[:, 0]), np.interp(t, s, Q[:, 1])]), s[-1]


def _min_distance(P, Q):
    """Smallest vertex-to-segment distance between two closed polylines."""

    def vs(P, Q):
        A, B = Q, np.roll(Q, -1, axis=0)
        d = B - A
        t = np.clip(np.einsum("ijk,jk->ij", P[:, None] - A[None], d) / np.sum(d * d, 1), 0, 1)
        proj = A[None] + t[..., None] * d[None]
        return np.min(np.linalg.norm(P[:, None] - proj, axis=-1))

    return min(vs(P, Q), vs(Q, P))


def check_momentum_bound(curves, seed=None, resample=1024):
    """``P^3/(2 pi)^2 - inf_x0 M(x0)`` for a closed curve or a union of curves.

    Components may be polygons, closed point arrays (first point repeated at
    the end), planar support bodies or planar radial graphs.  Unions whose
    components are a positive distance apart are decomposable and carry the
    ``decomposable`` flag; for them a negative deficit is the expected outcome.
    The record's ``extra`` holds an arclength-Fourier cross-check of the
    momentum for single polyline components.
    """
    comps = _as_components(curves)
    if not comps:
        raise ValidationError("no curves supplied")
    P_tot, first, mom = 0.0, np.zeros(2), 0.0
    polylines = []
    extra = {}
    for c in comps:
        if isinstance(c, (SupportBody, RadialBody)):
            if c.dim != 2:
                raise ValidationError("momentum bound is planar")
            rep = measure_report(c)
            cc = centroid(c)
            m0 = boundary_momentum(c)
            P_tot += rep.perimeter
            first = first + rep.perimeter * cc
            mom += m0
            polylines.append(c.boundary() if isinstance(c, SupportBody) else c.points)
            continue
        P = _closed_polyline(c)
        if not isinstance(c, Polygon2D) and _segments_cross(P):
            raise SelfIntersection("curve crosses itself")
        L, f, m = _polyline_moments(P)
        P_tot += L
        first = first + f
        mom += m
        polylines.append(P)
    bary = first / P_tot
    inf_m = mom - P_tot * float(bary @ bary)
    bound = P_tot**3 / (2.0 * np.pi) ** 2
    flags = ()
    if len(polylines) > 1:
        scale = P_tot
        dmin = min(
            _min_distance(polylines[i], polylines[j])
            for i in range(len(polylines))
            for j in range(i + 1, len(polylines))
        )
        extra["component_distance"] = float(dmin)
        if dmin > 1e-12 * scale:
            flags = ("decomposable", "expected-negative")
    elif not isinstance(comps[0], (SupportBody, RadialBody)):
        X, L = _arclength_resample(polylines[0], resample)
        Z = np.fft.fft(X[:, 0] + 1j * X[:, 1]) / len(X)
        extra["fourier_momentum"] = float(L * np.sum(np.abs(Z[1:]) ** 2))
    scale_err = 1e-13 * max(bound, inf_m)
    return DeficitRecord(
        inequality_id="momentum-bound",
        beta=None,
        n=2,
        lhs=float(inf_m),
        rhs=float(bound),
        deficit=float(bound - inf_m),
        err_bound=float(scale_err),
        fingerprint=_curve_fingerprint(comps),
        seed=seed,
        flags=flags,
        extra=extra,
    )


def _curve_fingerprint(comps):
    h = hashlib.sha256()
    for c in comps:
        if isinstance(c, RadialBody):
            h.update(np.ascontiguousarray(c.rho).tobytes())
        elif isinstance(c, (Polygon2D, SupportBody)):
            h.update(fingerprint(c).encode())
        else:
            h.update(np.ascontiguousarray(np.asarray(c, dtype=float)).tobytes())
    return h.hexdigest()[:16]


