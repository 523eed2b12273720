import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from isomoment.bodies import (
    Cylinder3D,
    Polygon2D,
    StarBody2D,
    SupportBody,
    body_from_json,
    body_to_json,
    boundary_points,
    fingerprint,
    make_ball,
    make_support_body,
    transform,
)
from isomoment.errors import NonPositiveSupport, NotConvex, ValidationError
from isomoment.families import rhombus
from isomoment.measures import measure_report
from isomoment.spectral import circle_grid

SQUARE = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]


def test_unit_disk_support_is_one():
    b = make_support_body(2, {0: 1.0})
    assert np.allclose(b.h, 1.0, atol=1e-15)
    assert np.allclose(np.linalg.norm(b.boundary(), axis=1), 1.0, atol=1e-14)
    assert np.allclose(b.s1, 1.0, atol=1e-13)


def test_cos3_body_slack():
    b = make_support_body(2, {0: 1.0, (3, "cos"): 0.1})
    assert b.min_slack == pytest.approx(0.2, abs=1e-12)
    x = b.boundary()[0]
    assert x == pytest.approx([1.1, 0.0], abs=1e-12)
    assert b.s1[0] == pytest.approx(0.2, abs=1e-12)


def test_not_convex_reports_slack():
    with pytest.raises(NotConvex) as err:
        make_support_body(2, {0: 1.0, (3, "cos"): 0.2})
    assert err.value.min_slack == pytest.approx(-0.6, abs=1e-12)


def test_origin_outside_is_rejected():
    with pytest.raises(NonPositiveSupport):
        make_support_body(2, {0: 1.0, (1, "cos"): 1.5})


def test_degree_one_is_translation():
    b = make_support_body(2, {0: 1.0, (1, "cos"): 0.3})
    pts = b.boundary()
    assert np.allclose(np.linalg.norm(pts - [0.3, 0.0], axis=1), 1.0, atol=1e-13)


def test_support_at_arbitrary_angles():
    b = make_support_body(2, {0: 1.0, (2, "sin"): 0.05, (3, "cos"): 0.1})
    t = np.array([0.1, 1.3, 4.0])
    ref = 1.0 + 0.05 * np.sin(2 * t) + 0.1 * np.cos(3 * t)
    assert np.allclose(b.support(t), ref, atol=1e-14)


def test_sphere_ball_with_center():
    c = np.array([0.2, -0.1, 0.3])
    b = make_ball(3, 1.5, center=c, grid_resolution=16)
    pts = b.boundary()
    assert np.allclose(np.linalg.norm(pts - c, axis=1), 1.5, atol=1e-12)
    assert np.allclose(b.radii, 1.5, atol=1e-12)


def test_sphere_body_volume_matches_hull():
    coeffs = {(0, 0): 1.0, (2, 0): 0.08, (3, 2): 0.03, (2, -1): 0.04}
    rep = measure_report(make_support_body(3, coeffs, 32))
    # an inscribed polytope on a fine grid
    hull = ConvexHull(make_support_body(3, coeffs, 128).boundary())
    assert hull.volume < rep.volume
    assert rep.volume == pytest.approx(hull.volume, rel=1e-3)
    assert rep.perimeter == pytest.approx(hull.area, rel=1e-3)


def test_square_support():
    sq = Polygon2D(SQUARE)
    assert sq.support(0.0) == pytest.approx(0.5)
    assert sq.support(math.pi / 4) == pytest.approx(math.sqrt(2) / 2)
    assert sq.perimeter == pytest.approx(4.0)
    assert sq.area == pytest.approx(1.0)
    assert np.allclose(sq.exterior_angles, math.pi / 2)


def test_polygon_validation():
    with pytest.raises(ValidationError):
        Polygon2D(SQUARE[::-1])
    with pytest.raises(ValidationError):
        Polygon2D([[0, 0], [1, 0], [0.2, 0.2], [0, 1]])
    with pytest.raises(ValidationError):
        Polygon2D([[0, 0], [1, 0], [2, 0]])


def test_from_points_hull_is_ccw():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(40, 2))
    poly = Polygon2D.from_points(pts)
    assert poly.area == pytest.approx(ConvexHull(pts).volume, rel=1e-12)


def test_rhombus_diagonal_support():
    l, a = 3.0, 0.7
    r = rhombus(l, a)
    assert r.support(0.0) == pytest.approx(l / 4 * math.cos(a / 2), rel=1e-14)
    assert r.support(math.pi / 2) == pytest.approx(l / 4 * math.sin(a / 2), rel=1e-14)
    assert r.perimeter == pytest.approx(l, rel=1e-14)


def test_transform_translation_and_scale():
    d = make_support_body(2, {0: 1.0})
    moved = transform(d, translation=[0.3, 0.0])
    assert moved.coeffs[(1, "cos")] == pytest.approx(0.3, abs=1e-15)
    b = make_support_body(2, {0: 1.0, (2, "cos"): 0.1})
    big = transform(b, scale=2.0)
    assert measure_report(big).perimeter == pytest.approx(2 * measure_report(b).perimeter, rel=1e-14)
    sq = transform(Polygon2D(SQUARE), scale=3.0)
    assert measure_report(sq).quermass[2] == pytest.approx(math.pi, rel=1e-14)


def test_transform_cylinder():
    c = transform(Cylinder3D(0.1, 2.0), translation=(1.0, 0.0, 0.0), scale=2.0)
    assert c.eps == pytest.approx(0.2) and c.L == pytest.approx(4.0)
    assert c.center == (2.0, 0.0, 0.0)


def test_json_roundtrip_2d_and_3d():
    b2 = make_support_body(2, {0: 1.0, (2, "cos"): 0.1, (3, "sin"): -0.02})
    again = body_from_json(json.dumps(body_to_json(b2)))
    assert np.allclose(again.h, b2.h, atol=1e-15)
    assert fingerprint(again) == fingerprint(b2)
    b3 = make_support_body(3, {(0, 0): 1.0, (2, 1): 0.05, (2, -2): 0.03}, 16)
    again3 = body_from_json(body_to_json(b3), grid_resolution=16)
    assert np.allclose(again3.h, b3.h, atol=1e-14)
    sq = body_from_json({"type": "polygon", "vertices": SQUARE})
    assert fingerprint(sq) == fingerprint(Polygon2D(SQUARE))


def test_json_errors():
    with pytest.raises(ValidationError):
        body_from_json({"type": "blob"})
    with pytest.raises(ValidationError):
        body_from_json({"type": "polygon"})
    with pytest.raises(ValidationError):
        body_from_json([1, 2])


def test_star_body_accepts_closed_samples():
    g = circle_grid(64)
    rho = 1.0 + 0.1 * np.cos(3 * g.theta)
    a = StarBody2D(rho)
    b = StarBody2D(np.append(rho, rho[0]))
    assert np.allclose(a.rho, b.rho)
    assert np.allclose(a.drho, -0.3 * np.sin(3 * g.theta), atol=1e-13)


def test_boundary_points_of_square():
    bp = boundary_points(Polygon2D(SQUARE))
    assert bp.points.shape == (4, 2)
    assert np.allclose(np.linalg.norm(bp.normals, axis=1), 1.0)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0.0, 0.06),
    st.floats(0.0, 0.03),
    st.floats(-1.0, 1.0),
    st.floats(-1.0, 1.0),
)
def test_translation_leaves_shape_invariant(a2, a3, tx, ty):
    b = make_support_body(2, {0: 1.0, (2, "cos"): a2, (3, "sin"): a3}, 256)
    m = transform(b, translation=[tx, ty]) if 1.0 - math.hypot(tx, ty) > 0.2 else b
    assert np.allclose(m.s1, b.s1, atol=1e-12)
    assert measure_report(m).volume == pytest.approx(measure_report(b).volume, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=5, max_size=30, unique=True))
def test_polygon_support_matches_vertex_max(points):
    pts = np.array(points)
    try:
        hull = ConvexHull(pts)
    except Exception:
        return
    if hull.volume < 1e-6:
        return
    poly = Polygon2D.from_points(pts)
    t = np.linspace(0, 2 * np.pi, 37)
    ref = np.max(pts @ np.vstack([np.cos(t), np.sin(t)]), axis=0)
    assert np.allclose(poly.support(t), ref, atol=1e-12)


def test_support_body_grid_limit():
    with pytest.raises(ValidationError):
        make_support_body(2, {0: 1.0, (20, "cos"): 0.001}, grid_resolution=64)
    assert isinstance(make_ball(2), SupportBody)
