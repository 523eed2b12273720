import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from isomoment.errors import PerturbationTooLarge, ValidationError
from isomoment.families import (
    corollary_gap,
    cylinder,
    cylinder_reference,
    ellipse,
    ellipse_reference,
    k0_mode_body,
    perturbed_ball,
    rhombus,
    rhombus_f,
    rhombus_H_exact,
)
from isomoment.functionals import script_H_unnormalized
from isomoment.measures import (
    ball_volume,
    boundary_momentum,
    centroid,
    cylinder_momentum_quadrature,
    measure_report,
)


def _ellipse_gap_by_quadrature(eps, beta):
    a, b = 1 + eps, 1 - eps

    def sq(t):
        q = a * a * math.cos(t) ** 2 + b * b * math.sin(t) ** 2
        return (a**4 * math.cos(t) ** 2 + b**4 * math.sin(t) ** 2) / q

    mom = integrate.quad(sq, 0, 2 * math.pi, epsabs=0, epsrel=1e-13)[0]
    per = 4 * a * special.ellipe(1 - (b / a) ** 2)
    return mom + 2 * beta * math.pi * a * b - (1 + beta) * per**2 / (2 * math.pi)


def test_ellipse_measures_and_expansions():
    eps = 0.03
    rep = measure_report(ellipse(eps))
    ref = ellipse_reference(eps)
    assert rep.volume == pytest.approx(ref["area"], rel=1e-14)
    assert rep.perimeter == pytest.approx(ref["perimeter"], abs=1e-6)
    assert ellipse(0.0).h == pytest.approx(np.ones(ellipse(0.0).grid.n), abs=1e-15)
    with pytest.raises(ValidationError):
        ellipse(0.5)


@pytest.mark.parametrize("beta", [0.0, 1.0, 1.5])
def test_corollary_gap_matches_quadrature(beta):
    for eps in (0.01, 0.04):
        gap = corollary_gap(ellipse(eps), beta)
        assert gap == pytest.approx(_ellipse_gap_by_quadrature(eps, beta), abs=1e-11)
        assert gap / eps**2 == pytest.approx(math.pi * (5 - 3 * beta), rel=0.02)


def test_k0_mode_construction():
    body, k0 = k0_mode_body(1.1, 0.05)
    assert k0 == 5
    d = 0.05 / 25
    expected = math.pi * d * d * (2.1 - 0.1 * 25)
    assert corollary_gap(body, 1.1) == pytest.approx(expected, rel=1e-9)
    assert corollary_gap(body, 1.1) < 0
    assert k0_mode_body(3.0, 0.05)[1] == 2
    with pytest.raises(ValidationError):
        k0_mode_body(1.0, 0.05)


def _rhombus_H_from_vertices(poly):
    v = poly.vertices
    ang = poly.exterior_angles
    c = (ang[:, None] * v).sum(0) / ang.sum()
    return float(np.sum(ang * np.sum((v - c) ** 2, 1)))


def test_rhombus_exact_vs_atoms():
    l = 2 * math.pi
    for alpha in np.linspace(0.05, 3.0, 12):
        r = rhombus(l, alpha)
        ref = _rhombus_H_from_vertices(r)
        assert rhombus_H_exact(l, alpha) == pytest.approx(ref, rel=1e-13)
        assert script_H_unnormalized(r) == pytest.approx(ref, rel=1e-13)


def test_rhombus_f_limits():
    assert rhombus_f(1e-9) == pytest.approx(math.pi, rel=1e-8)
    assert rhombus_f(math.pi - 1e-9) == pytest.approx(math.pi, rel=1e-8)
    assert rhombus_f(math.pi / 2) == pytest.approx(math.pi / 2)
    with pytest.raises(ValidationError):
        rhombus(1.0, math.pi)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, math.pi - 1e-3))
def test_rhombus_below_sup(alpha):
    assert rhombus_f(alpha) < math.pi


@pytest.mark.parametrize("eps", [0.1, 0.05, 0.01])
def test_cylinder_reference(eps):
    ref = cylinder_reference(eps)
    assert ref.perimeter == pytest.approx(2 * math.pi, rel=1e-14)
    assert ref.L == pytest.approx(1 / eps - eps)
    assert ref.total == pytest.approx(cylinder_momentum_quadrature(eps, ref.L), rel=1e-12)
    assert boundary_momentum(cylinder(eps)) == pytest.approx(ref.total, rel=1e-14)
    # the older forms differ from the centred integrals
    assert ref.lateral_printed == pytest.approx(4 * ref.lateral, rel=eps**2 * 4)
    assert ref.caps_printed < ref.caps


def test_cylinder_growth():
    eps = 0.01
    ref = cylinder_reference(eps)
    assert ref.total * eps**2 == pytest.approx(math.pi / 6, rel=1e-3)
    with pytest.raises(ValidationError):
        cylinder(1.0)


@pytest.mark.parametrize("n", [2, 3])
def test_perturbed_ball_normalisation(n):
    u = {(3, "cos"): 1.0} if n == 2 else {(3, 1): 1.0}
    b = perturbed_ball(n, u, 0.01)
    assert measure_report(b).volume == pytest.approx(ball_volume(n), rel=1e-13)
    assert np.linalg.norm(centroid(b)) < 1e-10
    assert b.passes >= 3
    assert abs(b.r - 1) < 1e-3


def test_perturbed_ball_rejections():
    with pytest.raises(PerturbationTooLarge):
        perturbed_ball(2, {(2, "cos"): 1.0}, 0.2)
    with pytest.raises(ValidationError):
        perturbed_ball(2, {0: 1.0}, 0.01)
