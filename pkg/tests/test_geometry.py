import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tilesub import (Angle, GeometryError, Polygon, RigidMotion, Vec2,
                     apply_motion, canon_angle, circular_distance,
                     intersection_area, point_in_polygon, polygon_area)
from tilesub.geometry import classify_points, triangulate

UNIT_SQUARE = Polygon.from_coords([(0, 0), (1, 0), (1, 1), (0, 1)])
L_TROMINO = Polygon.from_coords([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])

finite_angle = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
small_coord = st.floats(-100.0, 100.0, allow_nan=False, allow_infinity=False)


# ---------------------------------------------------------------------------
# angles


def test_canon_angle_basics():
    assert canon_angle(0.0) == 0.0
    assert canon_angle(2 * math.pi) == 0.0
    assert canon_angle(-2 * math.pi) == 0.0
    assert canon_angle(math.pi) == math.pi
    assert abs(canon_angle(-0.1) - (2 * math.pi - 0.1)) < 1e-15


@given(finite_angle)
def test_canon_angle_range_and_idempotence(a):
    c = canon_angle(a)
    assert 0.0 <= c < 2 * math.pi
    assert canon_angle(c) == c


@given(finite_angle, st.integers(-5, 5))
def test_canon_angle_period(a, k):
    lhs = canon_angle(a + 2 * math.pi * k)
    rhs = canon_angle(a)
    assert circular_distance(lhs, rhs) < 1e-9


@given(finite_angle, finite_angle)
def test_circular_distance_symmetric_and_bounded(a, b):
    d = circular_distance(a, b)
    assert d == circular_distance(b, a)
    assert 0.0 <= d <= math.pi + 1e-12


def test_angle_equality_tolerance():
    assert Angle(0.0) == Angle(2 * math.pi - 1e-12)
    assert Angle(1.0) == Angle(1.0 + 1e-10)
    assert Angle(1.0) != Angle(1.001)


# ---------------------------------------------------------------------------
# vectors and motions


def test_vec2_arithmetic():
    v = Vec2(3.0, 4.0)
    assert v.norm() == 5.0
    assert (v + Vec2(1, -1)).as_tuple() == (4.0, 3.0)
    assert (v - v).norm() == 0.0
    assert (v * 2.0).as_tuple() == (6.0, 8.0)
    assert v.dot(Vec2(-4, 3)) == 0.0


def test_vec2_rotated_quarter_turn():
    v = Vec2(1.0, 0.0).rotated(math.pi / 2)
    assert abs(v.x) < 1e-15 and abs(v.y - 1.0) < 1e-15


def test_vec2_rejects_nonfinite():
    with pytest.raises(GeometryError):
        Vec2(float("nan"), 0.0)


@given(small_coord, small_coord, small_coord, small_coord, finite_angle)
def test_motion_is_isometry(x1, y1, x2, y2, theta):
    m = RigidMotion(Angle(theta), Vec2(1.5, -2.5))
    a, b = Vec2(x1, y1), Vec2(x2, y2)
    before = (a - b).norm()
    after = (m(a) - m(b)).norm()
    assert after == pytest.approx(before, abs=1e-9 * (1 + before))


@given(small_coord, small_coord, finite_angle)
def test_motion_inverse_roundtrip(x, y, theta):
    m = RigidMotion(Angle(theta), Vec2(0.25, 7.0))
    p = Vec2(x, y)
    q = m.inverse()(m(p))
    assert (q - p).norm() < 1e-9


@given(finite_angle, finite_angle, small_coord, small_coord)
def test_motion_composition_matches_sequential_application(t1, t2, x, y):
    m1 = RigidMotion(Angle(t1), Vec2(1.0, 2.0))
    m2 = RigidMotion(Angle(t2), Vec2(-3.0, 0.5))
    p = Vec2(x, y)
    composed = m1.compose(m2)(p)
    sequential = m1(m2(p))
    assert (composed - sequential).norm() < 1e-9


def test_identity_motion():
    p = Vec2(2.0, -1.0)
    assert (RigidMotion.identity()(p) - p).norm() == 0.0


# ---------------------------------------------------------------------------
# polygons


def test_polygon_rejects_clockwise():
    with pytest.raises(GeometryError):
        Polygon.from_coords([(0, 0), (0, 1), (1, 1), (1, 0)])


def test_polygon_rejects_too_few_vertices():
    with pytest.raises(GeometryError):
        Polygon.from_coords([(0, 0), (1, 0)])


def test_polygon_rejects_self_intersection():
    with pytest.raises(GeometryError):
        Polygon.from_coords([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_polygon_area_oracles():
    assert polygon_area(UNIT_SQUARE) == 1.0
    tri = Polygon.from_coords([(0, 0), (4, 0), (0, 3)])
    assert polygon_area(tri) == 6.0
    assert polygon_area(L_TROMINO) == 3.0


def test_polygon_scaled_area():
    assert polygon_area(UNIT_SQUARE.scaled(2.5)) == pytest.approx(6.25, rel=1e-15)


def test_polygon_diameter():
    assert UNIT_SQUARE.diameter() == pytest.approx(math.sqrt(2.0), rel=1e-15)


def test_point_classification():
    assert point_in_polygon(Vec2(0.5, 0.5), UNIT_SQUARE) == "inside"
    assert point_in_polygon(Vec2(0.0, 0.5), UNIT_SQUARE) == "boundary"
    assert point_in_polygon(Vec2(1.0, 1.0), UNIT_SQUARE) == "boundary"
    assert point_in_polygon(Vec2(2.0, 2.0), UNIT_SQUARE) == "outside"
    # reflex corner of the L: outside the region but on the boundary lines
    assert point_in_polygon(Vec2(1.5, 1.5), L_TROMINO) == "outside"
    assert point_in_polygon(Vec2(0.5, 1.5), L_TROMINO) == "inside"


def test_classify_points_matches_scalar():
    rng = np.random.default_rng(7)
    pts = rng.uniform(-0.5, 1.5, size=(400, 2))
    codes = classify_points(pts, L_TROMINO)
    names = {0: "outside", 1: "boundary", 2: "inside"}
    for (x, y), code in zip(pts, codes):
        assert names[int(code)] == point_in_polygon(Vec2(x, y), L_TROMINO)


def test_triangulation_preserves_area():
    def tri_area(t):
        return 0.5 * abs((t[1, 0] - t[0, 0]) * (t[2, 1] - t[0, 1])
                         - (t[2, 0] - t[0, 0]) * (t[1, 1] - t[0, 1]))

    for poly in (UNIT_SQUARE, L_TROMINO,
                 Polygon.from_coords([(0, 0), (3, 0), (3, 1), (2, 1),
                                      (2, 2), (0, 2)])):
        tris = triangulate(poly)
        assert all(t.shape == (3, 2) for t in tris)
        assert sum(tri_area(t) for t in tris) == pytest.approx(
            polygon_area(poly), rel=1e-12)


# ---------------------------------------------------------------------------
# intersection areas


def test_intersection_identical():
    assert intersection_area(UNIT_SQUARE, UNIT_SQUARE) == pytest.approx(1.0, rel=1e-12)


def test_intersection_disjoint():
    far = Polygon.from_coords([(5, 5), (6, 5), (6, 6), (5, 6)])
    assert intersection_area(UNIT_SQUARE, far) == 0.0


def test_intersection_shifted_squares():
    half = Polygon.from_coords([(0.5, 0), (1.5, 0), (1.5, 1), (0.5, 1)])
    quarter = Polygon.from_coords([(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)])
    assert intersection_area(UNIT_SQUARE, half) == pytest.approx(0.5, rel=1e-12)
    assert intersection_area(UNIT_SQUARE, quarter) == pytest.approx(0.25, rel=1e-12)


def test_intersection_rotated_square_is_octagon():
    # unit square vs itself rotated 45 degrees about its center: the overlap
    # is a regular octagon with area 2(sqrt(2) - 1)
    c = Vec2(0.5, 0.5)
    rot = RigidMotion(Angle(math.pi / 4), Vec2(0, 0))
    moved = [rot(Vec2(x, y) - c) + c for x, y in UNIT_SQUARE.array]
    rotated = Polygon.from_coords([p.as_tuple() for p in moved])
    got = intersection_area(UNIT_SQUARE, rotated)
    assert got == pytest.approx(2.0 * (math.sqrt(2.0) - 1.0), rel=1e-9)


def test_intersection_nonconvex_oracle():
    square = Polygon.from_coords([(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)])
    assert intersection_area(L_TROMINO, square) == pytest.approx(0.75, rel=1e-12)


def test_intersection_symmetry():
    rng = np.random.default_rng(11)
    for _ in range(10):
        dx, dy = rng.uniform(-0.8, 0.8, size=2)
        other = Polygon.from_coords([(dx, dy), (dx + 1, dy),
                                     (dx + 1, dy + 1), (dx, dy + 1)])
        a = intersection_area(UNIT_SQUARE, other)
        b = intersection_area(other, UNIT_SQUARE)
        assert a == pytest.approx(b, abs=1e-12)


def test_intersection_matches_monte_carlo():
    # shifted unit squares have known overlap (1-|dx|)(1-|dy|); Monte Carlo
    # stands in as the independent estimator and must agree within 3 sigma
    rng = np.random.default_rng(23)
    for _ in range(5):
        dx, dy = rng.uniform(-0.9, 0.9, size=2)
        other = Polygon.from_coords([(dx, dy), (dx + 1, dy),
                                     (dx + 1, dy + 1), (dx, dy + 1)])
        exact = max(0.0, 1 - abs(dx)) * max(0.0, 1 - abs(dy))
        got = intersection_area(UNIT_SQUARE, other)
        assert got == pytest.approx(exact, abs=1e-12)
        n = 200_000
        pts = rng.uniform(0, 1, size=(n, 2))
        hit = ((pts[:, 0] >= dx) & (pts[:, 0] <= dx + 1)
               & (pts[:, 1] >= dy) & (pts[:, 1] <= dy + 1)).mean()
        sigma = math.sqrt(max(exact * (1 - exact), 1e-12) / n)
        assert abs(hit - got) <= 3.0 * sigma + 1e-9


def test_apply_motion_polygon():
    m = RigidMotion(Angle(math.pi / 2), Vec2(3.0, 0.0))
    moved = apply_motion(m, UNIT_SQUARE)
    assert polygon_area(moved) == pytest.approx(1.0, rel=1e-12)
    xs = moved.array[:, 0]
    assert xs.min() == pytest.approx(2.0, abs=1e-12)
