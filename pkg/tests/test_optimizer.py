import json
import math

import numpy as np
import pytest

from isomoment.bodies import make_ball, make_support_body
from isomoment.errors import ValidationError
from isomoment.functionals import F_ball, asymmetry
from isomoment.optimizer import (
    _Param,
    _retract,
    certify_local_max_ball,
    extremize,
    objective_function,
)
from isomoment.spectral import default_grid


def test_certify_F_planar():
    rows = certify_local_max_ball("F", n=2)
    for r in rows:
        # (A - B k^2) with A = 3, B = 1 and |cos k t|^2 = pi
        assert r["predicted"] == pytest.approx((3 - r["k"] ** 2) * math.pi)
        assert r["fitted"] == pytest.approx(r["predicted"], rel=1e-4)
        assert r["sign_ok"]


def test_certify_G_beta_upper_regime():
    rows = certify_local_max_ball("G_beta", n=2, beta=2.0)
    for r in rows:
        assert r["predicted"] == pytest.approx((3 - r["k"] ** 2) * math.pi)
        assert r["fitted"] == pytest.approx(r["predicted"], rel=1e-6)
        assert r["predicted"] < 0


def test_certify_F_sphere():
    rows = certify_local_max_ball("F", n=3, degrees=(2, 3))
    for r in rows:
        lam = r["k"] * (r["k"] + 1)
        assert r["predicted"] == pytest.approx((10 - 3.5 * lam) * 4 * math.pi)
        assert r["fitted"] == pytest.approx(r["predicted"], rel=1e-3)


def test_certify_rejects_other_objectives():
    with pytest.raises(ValidationError):
        certify_local_max_ball("script_H")
    with pytest.raises(ValidationError):
        certify_local_max_ball("G_beta")


def test_objectives_are_scale_invariant():
    b = make_support_body(2, {0: 1.0, (2, "cos"): 0.05, (3, "sin"): 0.02})
    from isomoment.bodies import transform

    big = transform(b, scale=2.5)
    for name, kw in [("F", {}), ("G_beta", {"beta": 2.0}), ("script_H", {})]:
        f = objective_function(name, 2, **kw)
        assert f(big) == pytest.approx(f(b), rel=1e-12)
    assert objective_function("G_beta", 2, beta=2.0)(make_ball(2)) == pytest.approx(3 / math.pi)
    with pytest.raises(ValidationError):
        objective_function("volume", 2)
    with pytest.raises(ValidationError):
        objective_function("G_beta", 2)


def test_retract_only_shrinks():
    param = _Param(2, 4)
    grid = default_grid(2, 256)
    x = np.zeros(param.size)
    x[:2] = [0.3, -0.2]
    y, body, slack, moved = _retract(param, grid, x, 0.01)
    assert moved
    assert slack >= 0.01 - 1e-12
    assert np.all(np.abs(y) <= np.abs(x))
    z, _, _, moved2 = _retract(param, grid, y, 0.01)
    assert not moved2 and np.array_equal(z, y)


def test_F_ascent_reaches_disk():
    body, trace = extremize("F", n=2, K=5, seed=3, max_iter=300)
    assert trace.values[-1] == pytest.approx(F_ball(2), abs=1e-5)
    assert np.all(np.diff(trace.values) >= -1e-15)
    assert asymmetry(body).value < 1e-3
    assert min(trace.slacks) >= 0.01 - 1e-12


def test_G_beta_descent_to_disk():
    _, trace = extremize("G_beta", n=2, K=4, seed=1, beta=2.0, max_iter=200)
    assert trace.values[-1] == pytest.approx(3 / math.pi, rel=1e-6)


def test_script_H_increases_above_disk():
    _, trace = extremize("script_H", n=2, K=8, seed=0, max_iter=10)
    assert trace.values[-1] > trace.values[0]
    # the disk value at perimeter 2 pi is 2 pi
    assert trace.values[-1] > 2 * math.pi


def test_trace_jsonl():
    _, trace = extremize("F", n=2, K=3, seed=0, max_iter=5)
    lines = trace.to_jsonl().splitlines()
    assert len(lines) == len(trace.values) + 1
    first = json.loads(lines[0])
    assert set(first) == {"iter", "coeffs", "value", "slack", "step"}
    assert json.loads(lines[-1])["reason"] == trace.reason


def test_extremize_rejects_large_K():
    with pytest.raises(ValidationError):
        extremize("F", n=2, K=100, grid_resolution=256)


def test_extremize_is_deterministic():
    _, a = extremize("F", n=2, K=3, seed=5, max_iter=20)
    _, b = extremize("F", n=2, K=3, seed=5, max_iter=20)
    assert a.to_jsonl() == b.to_jsonl()
