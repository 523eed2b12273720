"""Randomised verification campaigns, parameter sweeps and power-law fits."""

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bodies import Polygon2D, RadialBody, SupportBody, body_from_json
from .errors import GenerationFailed, PoorFit, ValidationError
from .families import (
    corollary_gap,
    ellipse,
    k0_mode_body,
    perturbed_ball,
    rhombus_H_exact,
)
from .functionals import (
    CSV_FIELDS,
    F_ball,
    F_functional,
    I_beta,
    asymmetry,
    beta_critical,
    check_momentum_bound,
    check_theorem1,
)
from .measures import ball_volume, measure_report, min_boundary_momentum
from .spectral import HarmonicSpectrum, default_grid, g_function

__all__ = [
    "CampaignConfig",
    "CampaignResult",
    "FitResult",
    "GeneratorSpec",
    "fit_power_law",
    "fuglede_F_coefficient",
    "fuglede_momentum_coefficient",
    "quantitative_ratios",
    "random_convex_body",
    "run_inequality_campaign",
    "sweep_and_fit",
    "threshold_scan",
]

MAX_ATTEMPTS = 100
INEQUALITIES = ("thm1", "momentum-bound", "thm-quantitative")


@dataclass
class GeneratorSpec:
    """Random body generator.

    kind
        ``"polygon"`` (hull of uniform points in the unit disk), ``"spectral"``
        (support-function coefficients with geometric decay) or
        ``"smooth-curve"`` (positive radial function, not necessarily convex).
    """

    kind: str = "spectral"
    dim: int = 2
    decay: float = 0.5
    max_degree: int = 8
    vertices: tuple = (3, 12)
    slack: float = 0.05
    amplitude: float = 1.0
    translate: bool = True
    grid: int = None

    def __post_init__(self):
        if self.kind not in ("polygon", "spectral", "smooth-curve"):
            raise ValidationError(f"unknown generator kind {self.kind!r}")
        if self.kind != "spectral" and self.dim != 2:
            raise ValidationError(f"{self.kind} generator is planar")
        self.vertices = tuple(self.vertices)


def _random_spectrum(rng, dim, K, decay, amplitude):
    if dim == 2:
        c = np.zeros(K + 1)
        s = np.zeros(K + 1)
        w = amplitude * decay ** np.arange(1, K + 1)
        c[1:] = rng.uniform(-1, 1, K) * w
        s[1:] = rng.uniform(-1, 1, K) * w
        return HarmonicSpectrum(2, c, s)
    c = np.zeros((K + 1, K + 1))
    s = np.zeros((K + 1, K + 1))
    for l in range(1, K + 1):
        w = amplitude * decay**l
        c[l, : l + 1] = rng.uniform(-1, 1, l + 1) * w
        s[l, 1 : l + 1] = rng.uniform(-1, 1, l) * w
    return HarmonicSpectrum(dim, c, s)


def _shape_part(spec):
    """Split into (degree >= 2 part, degree 1 part)."""
    hi = spec.without_degrees([1])
    lo = HarmonicSpectrum(spec.dim, spec.cos - hi.cos, spec.sin - hi.sin)
    return hi, lo


def random_convex_body(spec, seed):
    """Draw one body; identical ``(spec, seed)`` gives an identical body.

    Spectral bodies start from ``a0 = 1`` plus ``U(-1, 1) * decay^k`` amplitudes.
    The principal radii are affine in a common scale ``s`` of the degree >= 2
    part, so the largest ``s <= 1`` meeting the slack target is computed in
    closed form.  The translation part is then capped at half the inradius
    bound so the origin stays interior.
    """
    if isinstance(spec, dict):
        spec = GeneratorSpec(**spec)
    rng = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        try:
            if spec.kind == "polygon":
                lo, hi = spec.vertices
                m = int(rng.integers(lo, hi + 1))
                r = np.sqrt(rng.uniform(0, 1, m))
                t = rng.uniform(0, 2 * np.pi, m)
                return Polygon2D.from_points(np.column_stack([r * np.cos(t), r * np.sin(t)]))
            grid = default_grid(spec.dim, spec.grid)
            raw = _random_spectrum(rng, spec.dim, spec.max_degree, spec.decay, spec.amplitude)
            if spec.kind == "smooth-curve":
                return _random_radial(raw, grid, spec.slack)
            return _random_support(raw, grid, spec)
        except ValidationError:
            continue
    raise GenerationFailed(f"no valid body after {MAX_ATTEMPTS} attempts")


def _with_constant(spec, value):
    c = spec.cos.copy()
    one = math.sqrt(2 * math.pi) if spec.dim == 2 else math.sqrt(4 * math.pi)
    if spec.dim == 2:
        c[0] = value * one
    else:
        c[0, 0] = value * one
    return HarmonicSpectrum(spec.dim, c, spec.sin.copy())


def _random_support(raw, grid, spec):
    hi, lo = _shape_part(raw)
    unit = SupportBody(hi, grid, validate=False)
    # radii of 1 + s*u are 1 + s*mu with mu the radii of u
    mu = float(unit.radii[:, 0].min())
    s = 1.0 if mu >= 0 else min(1.0, (1.0 - spec.slack) / -mu)
    shape = _with_constant(hi.scaled(s), 1.0)
    if not spec.translate:
        return SupportBody(shape, grid)
    base = SupportBody(shape, grid, validate=False)
    hmin = float(base.h.min())
    if spec.dim == 2:
        x = np.array([lo.cos[1], lo.sin[1]]) / math.sqrt(math.pi)
    else:
        x = np.array([lo.cos[1, 1], lo.sin[1, 1], lo.cos[1, 0]]) * math.sqrt(3 / (4 * math.pi))
    nx = float(np.linalg.norm(x))
    if nx > 0.5 * hmin:
        lo = lo.scaled(0.5 * hmin / nx)
    full = HarmonicSpectrum(raw.dim, shape.cos + lo.cos, shape.sin + lo.sin)
    return SupportBody(full, grid)


def _random_radial(raw, grid, floor):
    hi = raw.without_degrees([0])
    vals = hi.synthesize(grid)
    m = float(vals.min())
    s = 1.0 if m >= -(1 - floor) else (1 - floor) / -m
    return RadialBody(_with_constant(hi.scaled(s), 1.0), grid)


# ---------------------------------------------------------------------------
# campaigns


@dataclass
class CampaignConfig:
    """Inequality campaign description.

    ``inequality_id`` is ``"thm1"`` (both regimes of the curvature inequality,
    one record per ``beta``), ``"momentum-bound"`` or ``"thm-quantitative"``
    (``I_beta`` at ``beta(n) + 1`` against the mean-width asymmetry, with the
    ratio ``I_beta / g(A)^(5/2)`` in ``extra``).

    ``inputs`` lists explicit bodies in the JSON body schema, evaluated after
    the random ones.  For ``"momentum-bound"`` an entry may be a list of
    bodies (a union of curves) or ``{"curve": [[x, y], ...]}``.
    """

    inequality_id: str = "thm1"
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    samples: int = 100
    seed: int = 0
    betas: tuple = (0.0,)
    tolerance: float = 0.0
    workers: int = 1
    inputs: list = field(default_factory=list)

    def __post_init__(self):
        if isinstance(self.generator, dict):
            self.generator = GeneratorSpec(**self.generator)
        if self.samples < 0 or (self.samples == 0 and not self.inputs):
            raise ValidationError("need at least one random sample or explicit input")
        if self.inequality_id not in INEQUALITIES:
            raise ValidationError(f"unknown inequality {self.inequality_id!r}")
        self.betas = tuple(float(b) for b in self.betas)

    @classmethod
    def from_json(cls, data):
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValidationError(f"bad campaign config: {exc}") from None

    def to_json(self):
        d = asdict(self)
        d["generator"]["vertices"] = list(d["generator"]["vertices"])
        d["betas"] = list(self.betas)
        d["inputs"] = list(self.inputs)
        return d


@dataclass
class CampaignResult:
    records: list
    summary: dict

    def csv_text(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.records:
            w.writerow(r.csv_row())
        return buf.getvalue()

    def summary_json(self):
        return json.dumps(self.summary, sort_keys=True, indent=2)


def _quantitative_record(body, seed):
    n = body.dim
    beta = beta_critical(n) + 1.0
    rec = check_theorem1(body, beta, seed=seed)
    a = asymmetry(body, "mean-width").value
    rec.inequality_id = "thm-quantitative"
    rec.extra["asymmetry"] = a
    g = g_function(a, n) ** 2.5
    rec.extra["ratio"] = rec.deficit / g if g > 0 else None
    return rec


def _check(config, body, seed):
    if config.inequality_id == "momentum-bound":
        return [check_momentum_bound(body, seed=seed)]
    if config.inequality_id == "thm-quantitative":
        return [_quantitative_record(body, seed)]
    return [check_theorem1(body, b, seed=seed) for b in config.betas]


def _evaluate(args):
    config, i = args
    seed = config.seed + i
    return _check(config, random_convex_body(config.generator, seed), seed)


def _input_body(item):
    if isinstance(item, list):
        return [_input_body(x) for x in item]
    if isinstance(item, dict) and "curve" in item:
        return np.asarray(item["curve"], dtype=float)
    return body_from_json(item)


def run_inequality_campaign(config):
    """Evaluate the configured inequality on ``config.samples`` random bodies.

    Body ``i`` uses seed ``config.seed + i``; records are kept in seed order so
    the CSV is identical for any worker count.  Explicit ``inputs`` follow with
    an empty seed.
    """
    if isinstance(config, dict):
        config = CampaignConfig(**config)
    jobs = [(config, i) for i in range(config.samples)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as ex:
            chunks = list(ex.map(_evaluate, jobs, chunksize=32))
    else:
        chunks = [_evaluate(j) for j in jobs]
    for item in config.inputs:
        chunks.append(_check(config, _input_body(item), None))
    records = [r for c in chunks for r in c]
    summary = summarize(records, config.tolerance)
    if config.inequality_id == "thm-quantitative":
        ratios = [r.extra["ratio"] for r in records if r.extra.get("ratio") is not None]
        summary["ratio_infimum"] = min(ratios) if ratios else None
    return CampaignResult(records, summary)


def summarize(records, tolerance=0.0):
    viol = [r for r in records if r.violated and r.deficit < -tolerance]
    active = [r for r in records if "regime-mismatch" not in r.flags]
    worst = min(active, key=lambda r: r.deficit) if active else None
    mism = 0.0
    for r in records:
        if r.certificate is not None:
            raw = r.n * (r.lhs - r.rhs)
            scale = max(abs(r.lhs), abs(r.rhs), 1.0) * r.n
            mism = max(mism, abs(r.certificate - raw) / scale)
    return {
        "records": len(records),
        "violations": len(viol),
        "expected_negative": sum(1 for r in viol if "expected-negative" in r.flags),
        "min_deficit": None if worst is None else worst.deficit,
        "argmin_fingerprint": None if worst is None else worst.fingerprint,
        "argmin_seed": None if worst is None else worst.seed,
        "max_certificate_mismatch": mism,
    }


# ---------------------------------------------------------------------------
# sweeps and fits


@dataclass
class FitResult:
    """Least-squares fit of ``log|value| = log|c| + p log(param)``."""

    c: float
    p: float
    r2: float
    target: float = None
    rel_error: float = None
    params: list = field(default_factory=list)
    values: list = field(default_factory=list)
    model: str = "c*x^p"

    def to_json(self):
        return asdict(self)


def fit_power_law(params, values, target=None, points=4, min_r2=0.999):
    """Fit ``c x^p`` on the ``points`` smallest parameters; raises PoorFit below ``min_r2``."""
    x = np.asarray(params, dtype=float)
    y = np.asarray(values, dtype=float)
    if len(x) < 4:
        raise ValidationError("need at least four parameter values")
    order = np.argsort(x)[:points]
    x, y = x[order], y[order]
    sign = np.sign(y)
    if np.any(sign == 0) or np.any(sign != sign[0]):
        raise ValidationError("values must be non-zero with one sign")
    lx, ly = np.log(x), np.log(np.abs(y))
    p, logc = np.polyfit(lx, ly, 1)
    pred = logc + p * lx
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    c = float(sign[0] * math.exp(logc))
    rel = None if target is None else abs(c - target) / abs(target)
    res = FitResult(c, float(p), min(max(r2, 0.0), 1.0), target, rel, x.tolist(), y.tolist())
    if r2 < min_r2:
        raise PoorFit(res)
    return res


def fuglede_momentum_coefficient(n, k):
    """Second-order coefficient of ``M - P^(n^2-1)/(n w)^(n^2-2)`` per unit ``|u|_2^2``
    for ``u`` a degree-``k`` harmonic: ``A_n - B_n k(n+k-2)``."""
    A = (n + 1) * (1 + (n - 1) ** 2) / 2.0
    B = (n * n - 2) / 2.0
    return A - B * k * (n + k - 2)


def fuglede_F_coefficient(n, k):
    """Predicted ``(F(B) - F(E)) / t^2`` for ``u = t Y_k`` with orthonormal ``Y_k``."""
    w = ball_volume(n)
    return -(w ** ((n - 2) * (n + 1))) * fuglede_momentum_coefficient(n, k) / (n * w) ** (n * n - 1)


def _unit_harmonic(n, k):
    if n == 2:
        return {(k, "cos"): 1.0 / math.sqrt(math.pi)}
    return {(k, min(1, k)): 1.0 / math.sqrt(4 * math.pi)}


def sweep_and_fit(family, params, beta=0.0, n=2, k=2, quantity="F", points=4, min_r2=0.999):
    """Evaluate a family over ``params`` and fit a power law.

    family
        ``"ellipse"``: corollary-form gap at ``beta`` against ``eps``, target
        ``pi (5 - 3 beta)``.
        ``"perturbed-ball"``: ``quantity="F"`` gives ``F(B) - F(E)`` for
        ``u = t Y_k`` (orthonormal) with the spectral prediction as target;
        ``quantity="momentum"`` gives ``M - P^3/(4 pi^2)`` for ``u = t cos(k t)``
        (n = 2) with target ``pi (3 - k^2)``.  Both are symmetrised in ``t``.
        ``"rhombus"``: ``pi l^2/8 - H`` at ``l = 1`` against ``alpha``.
    """
    params = [float(p) for p in params]
    if family == "ellipse":
        vals = [corollary_gap(ellipse(e), beta) for e in params]
        target = math.pi * (5 - 3 * beta)
    elif family == "perturbed-ball":
        if quantity == "F":
            u = _unit_harmonic(n, k)
            base = F_ball(n)

            def value(t):
                return base - F_functional(perturbed_ball(n, u, t))

            target = fuglede_F_coefficient(n, k)
        elif quantity == "momentum":
            if n != 2:
                raise ValidationError("momentum sweep is planar")
            u = {(k, "cos"): 1.0}

            def value(t):
                b = perturbed_ball(2, u, t)
                P = measure_report(b).perimeter
                return min_boundary_momentum(b) - P**3 / (4 * math.pi**2)

            target = math.pi * fuglede_momentum_coefficient(2, k)
        else:
            raise ValidationError(f"unknown quantity {quantity!r}")
        vals = [0.5 * (value(t) + value(-t)) for t in params]
    elif family == "rhombus":
        vals = [math.pi / 8 - rhombus_H_exact(1.0, a) for a in params]
        target = math.pi / 8
    else:
        raise ValidationError(f"unknown family {family!r}")
    return fit_power_law(params, vals, target, points=points, min_r2=min_r2)


def threshold_scan(betas, eps=0.05, generator=None, samples=200, seed=0):
    """Per-``beta`` sign data of the two sharpness constructions and of random bodies.

    Each row holds the ellipse gap (positive: ``I_beta < 0``), the k0-mode gap
    for ``beta > 1`` (negative: ``I_beta > 0``) and counts of positive and
    negative ``I_beta`` over random bodies.  Values inside ``(1, 5/3)`` are data
    only; whether other bodies change sign there is open.
    """
    gen = generator or GeneratorSpec(kind="spectral", dim=2, decay=0.5, max_degree=8)
    bodies = [random_convex_body(gen, seed + i) for i in range(samples)]
    ell = ellipse(eps)
    rows = []
    for b in betas:
        row = {"beta": float(b), "ellipse_gap": corollary_gap(ell, b)}
        if b > 1:
            body, k0 = k0_mode_body(b, eps)
            row["k0"] = k0
            row["k0_gap"] = corollary_gap(body, b)
        vals = np.array([I_beta(x, b) for x in bodies])
        row["I_positive"] = int(np.sum(vals > 0))
        row["I_negative"] = int(np.sum(vals < 0))
        row["I_min"] = float(vals.min())
        row["I_max"] = float(vals.max())
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# quantitative ratios


def quantitative_ratios(n, samples=500, seed=0, amplitude=0.02, max_degree=4):
    """Stability ratios on random near-ball bodies.

    Returns a dict of arrays: ``curvature`` is ``I_beta / g(A~)^(5/2)`` at
    ``beta = beta(n) + 1`` with the mean-width asymmetry; ``momentum`` is
    ``(F(B) - F(E)) / g(A)`` with the perimeter asymmetry; for ``n = 2``
    ``planar`` is ``(1/(4 pi^2) - inf M / P^3) / A^2``.
    """
    grid_res = None if n == 2 else 16
    gen = GeneratorSpec(
        kind="spectral", dim=n, decay=0.7, max_degree=max_degree, amplitude=amplitude, grid=grid_res
    )
    beta = beta_critical(n) + 1.0
    out = {"curvature": [], "momentum": [], "asym_perimeter": [], "asym_mean_width": []}
    if n == 2:
        out["planar"] = []
    for i in range(samples):
        body = random_convex_body(gen, seed + i)
        a_p = asymmetry(body, "perimeter").value
        a_w = asymmetry(body, "mean-width").value if n > 2 else a_p
        out["asym_perimeter"].append(a_p)
        out["asym_mean_width"].append(a_w)
        out["curvature"].append(I_beta(body, beta) / g_function(a_w, n) ** 2.5)
        dF = F_ball(n) - F_functional(body)
        out["momentum"].append(dF / g_function(a_p, n))
        if n == 2:
            out["planar"].append(dF / a_p**2)
    return {k: np.array(v) for k, v in out.items()}
