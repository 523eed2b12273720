"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 validation failure, 3 inequality
violations found, 4 numerical failure.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import errors
from .bodies import (
    Cylinder3D,
    Polygon2D,
    SupportBody,
    body_from_json,
    body_to_json,
    fingerprint,
    make_ball,
)
from .families import (
    cylinder,
    cylinder_reference,
    ellipse,
    ellipse_reference,
    perturbed_ball,
    rhombus,
    rhombus_H_exact,
)
from .functionals import F_ball, F_functional, G_beta, I_beta, asymmetry, script_H, script_H_unnormalized
from .harness import (
    CampaignConfig,
    fuglede_F_coefficient,
    random_convex_body,
    run_inequality_campaign,
    sweep_and_fit,
)
from .measures import (
    ball_volume,
    boundary_momentum,
    centroid,
    curvature_centroid,
    cylinder_momentum_quadrature,
    gauss_weighted_momentum,
    measure_report,
    min_boundary_momentum,
)
from .optimizer import OBJECTIVES, extremize
from .svg import scatter_svg

EXIT_USAGE, EXIT_VALIDATION, EXIT_VIOLATION, EXIT_NUMERIC = 1, 2, 3, 4

EXAMPLES = ("ball", "cylinder", "ellipse", "perturbed-ball", "rhombus")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dump(obj):
    return json.dumps(_plain(obj), sort_keys=True, indent=2)


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float):
        # drop NaN and negative zero so equal inputs print identically
        return x + 0.0 if math.isfinite(x) else None
    return x


def _load_json(text_or_path):
    """Inline JSON or a path to a JSON file."""
    s = text_or_path.strip()
    if s.startswith("{") or s.startswith("["):
        return json.loads(s)
    with open(text_or_path, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# compute


def compute_report(body, betas=()):
    """All applicable quantities of ``body`` as a JSON-ready dict."""
    n = body.dim
    rep = measure_report(body)
    out = {
        "fingerprint": fingerprint(body),
        "n": n,
        "measures": rep.to_json(),
        "centroid": centroid(body),
        "momentum_origin": boundary_momentum(body),
        "momentum_min": min_boundary_momentum(body),
        "F": F_functional(body),
        "F_ball": F_ball(n),
    }
    convex = isinstance(body, (SupportBody, Polygon2D, Cylinder3D))
    if convex:
        out["asymmetry"] = {m: asymmetry(body, m).to_json() for m in ("perimeter", "mean-width")}
    if isinstance(body, (SupportBody, Polygon2D)):
        out["curvature_centroid"] = curvature_centroid(body)
        out["H"] = script_H(body)
        out["G_beta"] = {repr(float(b)): G_beta(body, b) for b in betas}
        out["I_beta"] = {repr(float(b)): I_beta(body, b) for b in betas}
    return out


def _cmd_compute(args):
    body = body_from_json(_load_json(args.body), args.grid)
    print(_dump(compute_report(body, args.beta)))
    return 0


# ---------------------------------------------------------------------------
# verify


def _plot_campaign(config, result, path):
    xs, ys, hot = [], [], []
    cache = {}
    for r in result.records:
        if r.seed is None:
            continue
        if r.seed not in cache:
            body = random_convex_body(config.generator, r.seed)
            try:
                cache[r.seed] = asymmetry(body).value
            except (errors.IsoMomentError, TypeError):
                cache[r.seed] = float("nan")
        if r.violated:
            hot.append(len(xs))
        xs.append(cache[r.seed])
        ys.append(r.deficit)
    svg = scatter_svg(xs, ys, title=f"{config.inequality_id}: deficit vs asymmetry",
                      xlabel="asymmetry", ylabel="deficit", highlight=hot)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)


def _cmd_verify(args):
    data = _load_json(args.config)
    if args.workers is not None:
        data["workers"] = args.workers
    if args.tolerance is not None:
        data["tolerance"] = args.tolerance
    config = CampaignConfig.from_json(data)
    result = run_inequality_campaign(config)
    if args.format == "json":
        print(_dump({"records": [r.to_json() for r in result.records], "summary": result.summary}))
    else:
        sys.stdout.write(result.csv_text())
        sys.stderr.write(result.summary_json() + "\n")
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(result.summary_json() + "\n")
    if args.plot:
        _plot_campaign(config, result, args.plot)
    return EXIT_VIOLATION if result.summary["violations"] > 0 else 0


# ---------------------------------------------------------------------------
# sweep


def _cmd_sweep(args):
    fit = sweep_and_fit(args.family, args.param_list, beta=args.beta, n=args.n, k=args.k,
                        quantity=args.quantity, points=args.points, min_r2=args.min_r2)
    print(_dump({"family": args.family, "beta": args.beta, "fit": fit.to_json()}))
    return 0


# ---------------------------------------------------------------------------
# optimize


def _cmd_optimize(args):
    body, trace = extremize(args.objective, n=args.n, K=args.K, seed=args.seed, beta=args.beta,
                            constraint_value=args.constraint, grid_resolution=args.grid,
                            max_iter=args.max_iter, min_slack=args.min_slack)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace.to_jsonl())
    out = {
        "objective": args.objective,
        "value": trace.values[-1],
        "iterations": len(trace.values) - 1,
        "reason": trace.reason,
        "min_slack": trace.slacks[-1],
        "asymmetry": asymmetry(body).value,
        "body": body_to_json(body),
        "note": trace.note,
    }
    print(_dump(out))
    return 0


# ---------------------------------------------------------------------------
# examples


def example_report(name, eps=None, l=4.0, alpha=math.pi / 2, n=2, r=1.0, t=0.01, k=2):
    """Reference values next to computed ones for a named family member."""
    if name == "ellipse":
        eps = 0.05 if eps is None else eps
        body = ellipse(eps)
        rep = measure_report(body)
        ref = ellipse_reference(eps)
        computed = {
            "perimeter": rep.perimeter,
            "area": rep.volume,
            "mean_curvature_momentum": gauss_weighted_momentum(body).value,
        }
        reference = {key: ref[key] for key in computed}
        params = {"eps": eps}
    elif name == "rhombus":
        body = rhombus(l, alpha)
        reference = {"H": rhombus_H_exact(l, alpha), "sup_bound": math.pi * l * l / 8}
        computed = {"H": script_H_unnormalized(body), "perimeter": body.perimeter}
        params = {"l": l, "alpha": alpha}
    elif name == "cylinder":
        eps = 0.1 if eps is None else eps
        body = cylinder(eps)
        ref = cylinder_reference(eps)
        reference = {
            "perimeter": ref.perimeter,
            "lateral": ref.lateral,
            "caps": ref.caps,
            "lateral_printed": ref.lateral_printed,
            "caps_printed": ref.caps_printed,
            "total": ref.total,
            "growth": math.pi / (6 * eps * eps),
            "growth_printed": 2 * math.pi / (3 * eps * eps),
        }
        computed = {
            "perimeter": measure_report(body).perimeter,
            "total": boundary_momentum(body),
            "total_quadrature": cylinder_momentum_quadrature(eps, ref.L),
        }
        params = {"eps": eps}
    elif name == "perturbed-ball":
        u = {(k, "cos"): 1.0 / math.sqrt(math.pi)} if n == 2 else {(k, 0): 1.0 / math.sqrt(4 * math.pi)}
        body = perturbed_ball(n, u, t)
        reference = {"F_ball": F_ball(n), "F_second_order": F_ball(n) - fuglede_F_coefficient(n, k) * t * t}
        computed = {"F": F_functional(body), "volume": measure_report(body).volume, "radius": body.r}
        params = {"n": n, "t": t, "k": k}
    elif name == "ball":
        body = make_ball(n, r)
        w = ball_volume(n)
        reference = {f"W{i}": w * r ** (n - i) for i in range(n + 1)}
        rep = measure_report(body)
        computed = {f"W{i}": rep.quermass[i] for i in range(n + 1)}
        computed["F"] = F_functional(body)
        reference["F"] = F_ball(n)
        params = {"n": n, "r": r}
    else:
        raise errors.UnknownExample(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    # radial graphs have no body schema
    body_json = None if name == "perturbed-ball" else body_to_json(body)
    return {"name": name, "params": params, "body": body_json, "reference": reference, "computed": computed}


def _cmd_examples(args):
    kw = {key: getattr(args, key) for key in ("eps", "l", "alpha", "n", "r", "t", "k")}
    print(_dump(example_report(args.name, **kw)))
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="isomoment", description="Curvature-weighted isoperimetric checks.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="report all functionals of one body")
    c.add_argument("--body", required=True, help="body JSON file or inline JSON")
    c.add_argument("--beta", type=float, nargs="*", default=[], help="beta values for G_beta and I_beta")
    c.add_argument("--grid", type=int, default=None, help="grid resolution for spectral bodies")
    c.set_defaults(func=_cmd_compute)

    v = sub.add_parser("verify", help="run a randomised inequality campaign")
    v.add_argument("--config", required=True, help="campaign JSON file or inline JSON")
    v.add_argument("--plot", default=None, help="write an SVG of deficit vs asymmetry")
    v.add_argument("--format", choices=("csv", "json"), default="csv")
    v.add_argument("--summary", default=None, help="write the summary JSON here")
    v.add_argument("--workers", type=int, default=None)
    v.add_argument("--tolerance", type=float, default=None)
    v.set_defaults(func=_cmd_verify)

    s = sub.add_parser("sweep", help="sweep a family and fit a power law")
    s.add_argument("--family", required=True, choices=("ellipse", "perturbed-ball", "rhombus"))
    s.add_argument("--param-list", type=float, nargs="+", required=True)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--quantity", choices=("F", "momentum"), default="F")
    s.add_argument("--points", type=int, default=4)
    s.add_argument("--min-r2", type=float, default=0.999)
    s.set_defaults(func=_cmd_sweep)

    o = sub.add_parser("optimize", help="shape optimisation over support coefficients")
    o.add_argument("--objective", required=True, choices=OBJECTIVES)
    o.add_argument("--n", type=int, default=2)
    o.add_argument("--K", type=int, default=6)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--beta", type=float, default=None)
    o.add_argument("--constraint", type=float, default=None, help="perimeter for script_H")
    o.add_argument("--grid", type=int, default=256)
    o.add_argument("--max-iter", type=int, default=10000)
    o.add_argument("--min-slack", type=float, default=0.01)
    o.add_argument("--trace", default=None, help="write the JSON-lines trace here")
    o.set_defaults(func=_cmd_optimize)

    e = sub.add_parser("examples", help="named family member with reference values")
    e.add_argument("name")
    e.add_argument("--eps", type=float, default=None)
    e.add_argument("--l", type=float, default=4.0)
    e.add_argument("--alpha", type=float, default=math.pi / 2)
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--r", type=float, default=1.0)
    e.add_argument("--t", type=float, default=0.01)
    e.add_argument("--k", type=int, default=2)
    e.set_defaults(func=_cmd_examples)
    return p


def _fail(code, exc):
    msg = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": msg}, sort_keys=True) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except errors.UnknownExample as exc:
        return _fail(EXIT_USAGE, exc)
    except (errors.ValidationError, json.JSONDecodeError, OSError) as exc:
        return _fail(EXIT_VALIDATION, exc)
    except errors.IsoMomentError as exc:
        return _fail(EXIT_NUMERIC, exc)


if __name__ == "__main__":
    sys.exit(main())
