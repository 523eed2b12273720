"""Shape optimisation over support-function coefficients.

All objectives are made scale invariant (constrained quantities are
normalised by scaling), so the search runs over the shape coefficients of
degree >= 2 with ``a0 = 1`` fixed; degree one is a translation and is left
out.  Results are numerical evidence only.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .bodies import SupportBody
from .errors import Stalled, ValidationError
from .functionals import F_ball, F_functional, script_H, script_H_unnormalized
from .harness import GeneratorSpec, fuglede_momentum_coefficient, random_convex_body
from .measures import ball_volume, measure_report
from .spectral import HarmonicSpectrum, default_grid

__all__ = ["OptimizationTrace", "certify_local_max_ball", "extremize", "objective_function"]

OBJECTIVES = ("F", "G_beta", "neg_G_beta", "script_H")


@dataclass
class OptimizationTrace:
    iterates: list = field(default_factory=list)
    values: list = field(default_factory=list)
    slacks: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    reason: str = ""
    note: str = "numerical evidence only; not a proof of optimality"

    def to_jsonl(self):
        lines = []
        for i, (x, v, s, h) in enumerate(zip(self.iterates, self.values, self.slacks, self.steps)):
            lines.append(
                json.dumps(
                    {"iter": i, "coeffs": [float(c) for c in x], "value": v, "slack": s, "step": h},
                    sort_keys=True,
                )
            )
        lines.append(json.dumps({"reason": self.reason, "note": self.note}, sort_keys=True))
        return "\n".join(lines) + "\n"


class _Param:
    """Maps a flat vector of degree >= 2 amplitudes to orthonormal spectra."""

    def __init__(self, n, K):
        self.n, self.K = n, K
        if n == 2:
            self.index = [(k, j) for k in range(2, K + 1) for j in (0, 1)]
            self.scale = math.sqrt(math.pi)
        else:
            self.index = [(l, m) for l in range(2, K + 1) for m in range(-l, l + 1)]
            self.scale = math.sqrt(4 * math.pi)

    @property
    def size(self):
        return len(self.index)

    def spectrum(self, x):
        n, K = self.n, self.K
        if n == 2:
            c, s = np.zeros(K + 1), np.zeros(K + 1)
            c[0] = math.sqrt(2 * math.pi)
            for (k, j), v in zip(self.index, x):
                (c if j == 0 else s)[k] = v * self.scale
        else:
            c, s = np.zeros((K + 1, K + 1)), np.zeros((K + 1, K + 1))
            c[0, 0] = self.scale
            for (l, m), v in zip(self.index, x):
                if m >= 0:
                    c[l, m] = v * self.scale
                else:
                    s[l, -m] = v * self.scale
        return HarmonicSpectrum(n, c, s)

    def from_spectrum(self, sp):
        out = np.zeros(self.size)
        for i, (a, b) in enumerate(self.index):
            if self.n == 2:
                if a <= sp.max_degree:
                    out[i] = (sp.cos if b == 0 else sp.sin)[a] / self.scale
            elif a <= sp.max_degree:
                out[i] = (sp.cos[a, b] if b >= 0 else sp.sin[a, -b]) / self.scale
        return out


def objective_function(name, n, beta=None, constraint_value=None):
    """Scale-invariant objective ``f(body)`` to be maximised.

    ``script_H`` returns the unnormalised infimum rescaled to perimeter
    ``constraint_value`` (default: perimeter of the unit ball);
    ``G_beta``/``neg_G_beta`` return ``+-G_beta`` rescaled to unit ``W_{n-1}``.
    """
    if name not in OBJECTIVES:
        raise ValidationError(f"unknown objective {name!r}")
    if name == "F":
        return F_functional
    if name == "script_H":
        target = constraint_value or n * ball_volume(n)

        def f(body):
            P = measure_report(body).perimeter
            return script_H_unnormalized(body) * (target / P) ** 2

        return f
    if beta is None:
        raise ValidationError("G_beta objectives need beta")
    sign = 1.0 if name == "G_beta" else -1.0

    def g(body):
        rep = measure_report(body)
        val = script_H(body) + beta * rep.quermass[n - 2]
        return sign * val / rep.quermass[n - 1] ** 2

    return g


def _radii_min(param, grid, x):
    body = SupportBody(param.spectrum(x), grid, validate=False)
    return body, body.min_slack


def _retract(param, grid, x, min_slack):
    """Shrink ``x`` toward the ball until the radii are at least ``min_slack``.

    Radii of ``1 + s u`` are ``1 + s mu``, so the largest admissible ``s`` is
    closed form; the result never has larger coefficients than ``x``.
    """
    body, slack = _radii_min(param, grid, x)
    if slack >= min_slack:
        return x, body, slack, False
    zero = param.spectrum(np.zeros_like(x))
    sp = body.spectrum
    u = HarmonicSpectrum(sp.dim, sp.cos - zero.cos, sp.sin - zero.sin)
    mu = SupportBody(u, grid, validate=False).min_slack
    s = (1.0 - min_slack) / -mu * (1 - 1e-12)
    x = x * min(1.0, s)
    body, slack = _radii_min(param, grid, x)
    return x, body, slack, True


def _project(z, x, radii, N, min_slack):
    """Euclidean projection of ``z`` onto the radii constraints linearised at ``x``.

    Solved as a least-distance problem through NNLS (Lawson-Hanson).
    """
    b = min_slack - radii - N.T @ (z - x)
    work = np.zeros(b.size, dtype=bool)
    y = z
    excess = b
    # grow the working set from the worst violation in each violated run of nodes
    while True:
        viol = excess > 1e-12
        if not viol.any():
            return y
        peak = viol & (excess >= np.roll(excess, 1)) & (excess >= np.roll(excess, -1))
        if not peak.any():
            peak = viol
        work |= peak
        E = np.vstack([N[:, work], b[None, work]])
        rhs = np.zeros(E.shape[0])
        rhs[-1] = 1.0
        u, _ = nnls(E, rhs, maxiter=50 * E.shape[1])
        r = E @ u - rhs
        if abs(r[-1]) < 1e-14:
            return x
        y = z - r[:-1] / r[-1]
        excess = np.where(work, 0.0, b - N.T @ (y - z))


def extremize(
    objective,
    n=2,
    K=6,
    seed=0,
    beta=None,
    constraint_value=None,
    grid_resolution=256,
    max_iter=10000,
    min_slack=0.01,
    fd_step=1e-6,
    grad_tol=1e-8,
    degeneracy=1e-4,
    start=None,
    raise_on_stall=True,
):
    """Projected finite-difference gradient ascent.

    Each iteration takes central differences of the objective and of the
    principal radii, projects the trial point ``x + step g/|g|`` onto the
    radii constraints (linearised, ``radius >= min_slack``), backtracks along
    the projected segment until the objective increases, and finally shrinks
    the shape coefficients toward the ball if the true radii still dip below
    ``min_slack``.  Stops on a vanishing projected step (``"gradient"``), an
    exhausted line search (``"step"``), ``max_iter``, or (``script_H``) when
    ``W0/W1^2`` falls below ``degeneracy``.

    The random start is a spectral body of seed ``seed``; pass ``start`` (a
    vector of degree >= 2 amplitudes in the order of ``_Param.index``) to
    override it.

    Returns ``(body, trace)``.
    """
    f = objective_function(objective, n, beta, constraint_value)
    grid = default_grid(n, grid_resolution)
    limit = grid.n // 4 if n == 2 else min(24, grid.n_phi // 4)
    if K > limit:
        raise ValidationError(f"K = {K} exceeds grid limit {limit}")
    param = _Param(n, K)
    if start is None:
        gen = GeneratorSpec(kind="spectral", dim=n, decay=0.5, max_degree=K, translate=False,
                            slack=0.5, grid=grid_resolution)
        x = param.from_spectrum(random_convex_body(gen, seed).spectrum)
    else:
        x = np.asarray(start, dtype=float).copy()
    x, body, slack, _ = _retract(param, grid, x, min_slack)
    val = f(body)
    trace = OptimizationTrace()
    trace.iterates.append(x.copy())
    trace.values.append(float(val))
    trace.slacks.append(float(slack))
    trace.steps.append(0.0)
    step = 1.0
    cancelled = 0

    def probe(y):
        b = SupportBody(param.spectrum(y), grid, validate=False)
        return f(b), b.radii[:, 0]

    for _ in range(max_iter):
        g = np.empty_like(x)
        N = np.empty((x.size, grid.size))
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = fd_step
            fp, rp = probe(x + e)
            fm, rm = probe(x - e)
            g[i] = (fp - fm) / (2 * fd_step)
            N[i] = (rp - rm) / (2 * fd_step)
        radii = body.radii[:, 0]
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            trace.reason = "gradient"
            break
        # one projection per trial step, then backtrack along the feasible segment
        accepted = stationary = False
        while step > 1e-12 and not accepted:
            d = _project(x + step * g / gn, x, radii, N, min_slack) - x
            dn = float(np.linalg.norm(d))
            if dn / step < grad_tol:
                stationary = True
                break
            t = 1.0
            while t * dn > 1e-15:
                y, b_new, s_new, projected = _retract(param, grid, x + t * d, min_slack)
                v_new = f(b_new)
                if v_new > val:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                step *= 0.1
        if not accepted:
            trace.reason = "gradient" if stationary else "step"
            break
        step = min(step * (2.0 if t == 1.0 else 0.5), 1.0)
        cancelled = cancelled + 1 if projected and v_new - val < 1e-15 * abs(val) else 0
        x, body, slack, val = y, b_new, s_new, v_new
        trace.iterates.append(x.copy())
        trace.values.append(float(val))
        trace.slacks.append(float(slack))
        trace.steps.append(t * dn)
        if cancelled >= 50:
            trace.reason = "stalled"
            if raise_on_stall:
                raise Stalled(slack)
            break
        if objective == "script_H":
            rep = measure_report(body)
            if rep.quermass[0] / rep.quermass[1] ** 2 < degeneracy:
                trace.reason = "degenerate"
                break
    else:
        trace.reason = "max_iter"
    return body, trace


def _unit_amplitude(n, k):
    """Orthonormal spectrum of ``cos(k t)`` (n = 2) or the unit-mean-square ``Y_{k,0}``."""
    if n == 2:
        c, s = np.zeros(k + 1), np.zeros(k + 1)
        c[k] = math.sqrt(math.pi)
    else:
        c, s = np.zeros((k + 1, k + 1)), np.zeros((k + 1, k + 1))
        c[k, 0] = math.sqrt(4 * math.pi)
    return HarmonicSpectrum(n, c, s)


def certify_local_max_ball(objective, n=2, degrees=(2, 3, 4), beta=None, ts=(1e-3, 2e-3)):
    """Fitted second-order coefficients at the ball along ``h = 1 + t u_k``.

    ``u_k`` is ``cos(k t)`` in the plane and the zonal harmonic of unit mean
    square on the sphere.  For ``F`` the reported ``fitted`` value is the
    ``t^2`` coefficient of ``F(E) - F(B)`` rescaled by ``(n w)^(n^2-1) / w^((n-2)(n+1))``,
    predicted ``(A - B k(n+k-2)) |u|^2``; for ``G_beta`` it is the ``t^2``
    coefficient of ``n (G_beta(E) - G_beta(B))``, predicted
    ``[(1 + beta) + (1 - beta/(n-1)) k(n+k-2)] |u|^2``.
    """
    if objective not in ("F", "G_beta"):
        raise ValidationError("certify supports F and G_beta")
    if objective == "G_beta" and beta is None:
        raise ValidationError("G_beta needs beta")
    grid = default_grid(n)
    w = ball_volume(n)
    one = math.sqrt(2 * math.pi) if n == 2 else math.sqrt(4 * math.pi)
    rows = []
    for k in degrees:
        u = _unit_amplitude(n, k)
        norm2 = float(u.degree_energy().sum())
        lam = k * (n + k - 2)

        def body_at(t):
            sp = u.scaled(t)
            if n == 2:
                sp.cos[0] = one
            else:
                sp.cos[0, 0] = one
            return SupportBody(sp, grid)

        if objective == "F":

            def q(t):
                return F_functional(body_at(t)) - F_ball(n)

            factor = (n * w) ** (n * n - 1) / w ** ((n - 2) * (n + 1))
            pred = fuglede_momentum_coefficient(n, k) * norm2
        else:

            def q(t):
                b = body_at(t)
                return n * (script_H(b) + beta * measure_report(b).quermass[n - 2])

            factor = 1.0
            pred = ((1 + beta) + (1 - beta / (n - 1)) * lam) * norm2
        mid = q(0.0) if objective == "G_beta" else 0.0
        c = np.array([0.5 * (q(t) + q(-t)) - mid for t in ts]) / np.array(ts) ** 2
        # Richardson removes the t^4 term
        fitted = float((4 * c[0] - c[1]) / 3) * factor
        sign_ok = (np.sign(fitted) == np.sign(pred)) or (abs(pred) < 1e-12 and abs(fitted) < 1e-6)
        rows.append({"k": k, "fitted": fitted, "predicted": pred, "sign_ok": bool(sign_ok)})
    return rows
