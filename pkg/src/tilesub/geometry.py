"""Planar primitives: vectors, canonical angles, rigid motions, simple polygons.

Everything here is double precision with two global tolerances: EPS_GEO for
coordinate comparisons (absolute, the plane is used at prototile scale) and
EPS_ANG for circular angle comparisons.  All values are immutable and all
operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import GeometryError

TWO_PI = 2.0 * math.pi

EPS_GEO = 1e-9
EPS_ANG = 1e-9

# point_in_polygon classifications
INSIDE = "inside"
BOUNDARY = "boundary"
OUTSIDE = "outside"


def canon_angle(theta: float) -> float:
    """Reduce an angle in radians to the canonical interval [0, 2*pi)."""
    if not math.isfinite(theta):
        raise GeometryError(f"angle must be finite, got {theta!r}")
    r = math.fmod(theta, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:  # fmod can round up to exactly 2*pi
        r = 0.0
    return r


def canon_angle_array(theta: np.ndarray) -> np.ndarray:
    """Vectorized canon_angle."""
    r = np.mod(theta, TWO_PI)
    r[r >= TWO_PI] = 0.0
    return r


def circular_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle, in [0, pi]."""
    d = abs(canon_angle(a) - canon_angle(b))
    return min(d, TWO_PI - d)


def circular_distance_array(a: np.ndarray, b: float) -> np.ndarray:
    d = np.abs(canon_angle_array(np.asarray(a, dtype=float).copy()) - canon_angle(b))
    return np.minimum(d, TWO_PI - d)


def angles_equal(a: float, b: float, eps: float = EPS_ANG) -> bool:
    return circular_distance(a, b) < eps


@dataclass(frozen=True)
class Vec2:
    """Point or displacement in the plane."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"coordinates must be finite, got ({self.x!r}, {self.y!r})")

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def rotated(self, theta: float) -> "Vec2":
        c, s = math.cos(theta), math.sin(theta)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True, eq=False)
class Angle:
    """Orientation on the circle, stored canonically in [0, 2*pi).

    Equality is circular with tolerance EPS_ANG, so Angle is unhashable on
    purpose: use .radians as a dict key if one is ever needed.
    """

    radians: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "radians", canon_angle(float(self.radians)))

    def __add__(self, other: "Angle | float") -> "Angle":
        r = other.radians if isinstance(other, Angle) else float(other)
        return Angle(self.radians + r)

    def __sub__(self, other: "Angle | float") -> "Angle":
        r = other.radians if isinstance(other, Angle) else float(other)
        return Angle(self.radians - r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Angle):
            return NotImplemented
        return circular_distance(self.radians, other.radians) < EPS_ANG

    def distance(self, other: "Angle") -> float:
        return circular_distance(self.radians, other.radians)


@dataclass(frozen=True)
class RigidMotion:
    """Proper rigid motion x -> R(rotation) x + translation.

    Reflections are deliberately not representable; mirror-image shapes are
    modelled as separate prototiles upstream.
    """

    rotation: Angle
    translation: Vec2

    @staticmethod
    def identity() -> "RigidMotion":
        return RigidMotion(Angle(0.0), Vec2(0.0, 0.0))

    def __call__(self, p: Vec2) -> Vec2:
        return p.rotated(self.rotation.radians) + self.translation

    def compose(self, other: "RigidMotion") -> "RigidMotion":
        """Motion equal to applying `other` first, then self."""
        return RigidMotion(
            self.rotation + other.rotation,
            other.translation.rotated(self.rotation.radians) + self.translation,
        )

    def inverse(self) -> "RigidMotion":
        inv_rot = -self.rotation.radians
        return RigidMotion(Angle(inv_rot), (-self.translation).rotated(inv_rot))


def _signed_area(arr: np.ndarray) -> float:
    x, y = arr[:, 0], arr[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _segments_too_close(p: np.ndarray, q: np.ndarray, r: np.ndarray, s: np.ndarray,
                        eps: float) -> bool:
    """True if segments pq and rs intersect or pass within eps of each other."""
    d1 = _cross(p[0], p[1], q[0], q[1], r[0], r[1])
    d2 = _cross(p[0], p[1], q[0], q[1], s[0], s[1])
    d3 = _cross(r[0], r[1], s[0], s[1], p[0], p[1])
    d4 = _cross(r[0], r[1], s[0], s[1], q[0], q[1])
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    for a, seg in ((p, (r, s)), (q, (r, s)), (r, (p, q)), (s, (p, q))):
        if _point_segment_distance(a[0], a[1], seg[0], seg[1]) < eps:
            return True
    return False


def _point_segment_distance(px: float, py: float, a: np.ndarray, b: np.ndarray) -> float:
    abx, aby = b[0] - a[0], b[1] - a[1]
    apx, apy = px - a[0], py - a[1]
    denom = abx * abx + aby * aby
    t = 0.0 if denom == 0.0 else max(0.0, min(1.0, (apx * abx + apy * aby) / denom))
    dx, dy = apx - t * abx, apy - t * aby
    return math.hypot(dx, dy)


class Polygon:
    """Simple polygon with vertices in counterclockwise order.

    Construction validates: at least three vertices, strictly positive signed
    area, and simplicity (non-adjacent edges never intersect nor come within
    EPS_GEO of each other).
    """

    __slots__ = ("vertices", "_array", "_diameter")

    def __init__(self, vertices: Sequence[Vec2]):
        verts = tuple(vertices)
        if len(verts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        arr = np.array([(v.x, v.y) for v in verts], dtype=float)
        if _signed_area(arr) <= 0.0:
            raise GeometryError("polygon vertices must be in counterclockwise order")
        n = len(verts)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue  # adjacent edges share a vertex by design
                if _segments_too_close(arr[i], arr[(i + 1) % n], arr[j], arr[(j + 1) % n],
                                       EPS_GEO):
                    raise GeometryError(f"polygon is not simple (edges {i} and {j} cross)")
        self.vertices = verts
        self._array = arr
        self._array.setflags(write=False)
        self._diameter: float | None = None

    @classmethod
    def from_coords(cls, coords: Iterable[Sequence[float]]) -> "Polygon":
        return cls([Vec2(float(c[0]), float(c[1])) for c in coords])

    @property
    def array(self) -> np.ndarray:
        """Vertex coordinates as a read-only (n, 2) float array."""
        return self._array

    def __len__(self) -> int:
        return len(self.vertices)

    def area(self) -> float:
        return _signed_area(self._array)

    def diameter(self) -> float:
        if self._diameter is None:
            a = self._array
            d2 = ((a[:, None, :] - a[None, :, :]) ** 2).sum(axis=2)
            self._diameter = float(np.sqrt(d2.max()))
        return self._diameter

    def scaled(self, factor: float) -> "Polygon":
        if factor <= 0:
            raise GeometryError("scale factor must be positive")
        return Polygon([v * factor for v in self.vertices])

    def __repr__(self) -> str:
        pts = ", ".join(f"({v.x:g},{v.y:g})" for v in self.vertices)
        return f"Polygon[{pts}]"


def polygon_area(p: Polygon) -> float:
    """Shoelace area; positive because construction enforces CCW order."""
    return p.area()


def apply_motion(m: RigidMotion, p: Polygon) -> Polygon:
    """Image of a polygon under a proper rigid motion (orientation preserved)."""
    return Polygon([m(v) for v in p.vertices])


def point_in_polygon(q: Vec2, p: Polygon) -> str:
    """Classify a point as 'inside', 'boundary' (within EPS_GEO) or 'outside'."""
    arr = p.array
    n = len(arr)
    for i in range(n):
        if _point_segment_distance(q.x, q.y, arr[i], arr[(i + 1) % n]) < EPS_GEO:
            return BOUNDARY
    return INSIDE if _crossing_parity(q.x, q.y, arr) else OUTSIDE


def _crossing_parity(px: float, py: float, arr: np.ndarray) -> bool:
    inside = False
    n = len(arr)
    for i in range(n):
        ax, ay = arr[i]
        bx, by = arr[(i + 1) % n]
        if (ay > py) != (by > py):
            xint = ax + (py - ay) * (bx - ax) / (by - ay)
            if xint > px:
                inside = not inside
    return inside


def classify_points(points: np.ndarray, p: Polygon, eps: float = EPS_GEO) -> np.ndarray:
    """Vectorized point classification against one polygon.

    Returns an int8 array with 0 = outside, 1 = boundary (within eps of an
    edge), 2 = inside.  Used for bulk coverage sampling.
    """
    pts = np.asarray(points, dtype=float)
    arr = p.array
    n = len(arr)
    px, py = pts[:, 0], pts[:, 1]
    min_d = np.full(len(pts), np.inf)
    inside = np.zeros(len(pts), dtype=bool)
    for i in range(n):
        a, b = arr[i], arr[(i + 1) % n]
        min_d = np.minimum(min_d, _point_segment_distance_bulk(pts, a, b))
        ay, by = a[1], b[1]
        crosses = (ay > py) != (by > py)
        if crosses.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = a[0] + (py - ay) * (b[0] - a[0]) / (by - ay)
            inside ^= crosses & (xint > px)
    codes = np.where(inside, 2, 0).astype(np.int8)
    codes[min_d < eps] = 1
    return codes


def _point_segment_distance_bulk(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = float(ab[0] * ab[0] + ab[1] * ab[1])
    ap = pts - a
    if denom == 0.0:
        return np.hypot(ap[:, 0], ap[:, 1])
    t = np.clip((ap @ ab) / denom, 0.0, 1.0)
    d = ap - t[:, None] * ab
    return np.hypot(d[:, 0], d[:, 1])


def polygon_point_distance(p: Polygon, q: Vec2) -> float:
    """Euclidean distance from q to the closed polygonal region (0 if inside)."""
    arr = p.array
    n = len(arr)
    if _crossing_parity(q.x, q.y, arr):
        return 0.0
    return min(_point_segment_distance(q.x, q.y, arr[i], arr[(i + 1) % n]) for i in range(n))


def polygon_distance_bulk(points: np.ndarray, p: Polygon) -> np.ndarray:
    """Distance from each query point to the closed polygonal region (0 inside)."""
    pts = np.asarray(points, dtype=float)
    arr = p.array
    n = len(arr)
    px, py = pts[:, 0], pts[:, 1]
    min_d = np.full(len(pts), np.inf)
    inside = np.zeros(len(pts), dtype=bool)
    for i in range(n):
        a, b = arr[i], arr[(i + 1) % n]
        min_d = np.minimum(min_d, _point_segment_distance_bulk(pts, a, b))
        ay, by = a[1], b[1]
        crosses = (ay > py) != (by > py)
        if crosses.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = a[0] + (py - ay) * (b[0] - a[0]) / (by - ay)
            inside ^= crosses & (xint > px)
    min_d[inside] = 0.0
    return min_d


def triangulate(p: Polygon) -> list[np.ndarray]:
    """Ear-clipping triangulation; returns a list of (3, 2) vertex arrays.

    Handles non-convex simple polygons (the chair L-tromino is the motivating
    case).  O(n^3) worst case, fine for prototile-sized inputs.
    """
    arr = [p.array[i].copy() for i in range(len(p))]
    tris: list[np.ndarray] = []
    guard = 0
    while len(arr) > 3:
        guard += 1
        if guard > 10000:
            raise GeometryError("ear clipping failed to terminate")
        n = len(arr)
        clipped = False
        for i in range(n):
            a, b, c = arr[(i - 1) % n], arr[i], arr[(i + 1) % n]
            if _cross(a[0], a[1], b[0], b[1], c[0], c[1]) <= EPS_GEO:
                continue  # reflex or degenerate corner, not an ear
            ear = np.array([a, b, c])
            if any(_point_in_triangle(v, ear) for k, v in enumerate(arr)
                   if k not in ((i - 1) % n, i, (i + 1) % n)):
                continue
            tris.append(ear)
            del arr[i]
            clipped = True
            break
        if not clipped:
            raise GeometryError("no ear found; polygon may be degenerate")
    tris.append(np.array(arr))
    return tris


def _point_in_triangle(v: np.ndarray, tri: np.ndarray) -> bool:
    d1 = _cross(tri[0][0], tri[0][1], tri[1][0], tri[1][1], v[0], v[1])
    d2 = _cross(tri[1][0], tri[1][1], tri[2][0], tri[2][1], v[0], v[1])
    d3 = _cross(tri[2][0], tri[2][1], tri[0][0], tri[0][1], v[0], v[1])
    return d1 >= -EPS_GEO and d2 >= -EPS_GEO and d3 >= -EPS_GEO


def _clip_by_convex(subject: np.ndarray, clip: np.ndarray) -> float:
    """Area of subject (CCW) clipped by convex CCW polygon, Sutherland-Hodgman."""
    output = [tuple(v) for v in subject]
    nc = len(clip)
    for i in range(nc):
        if not output:
            return 0.0
        cx, cy = clip[i]
        dx, dy = clip[(i + 1) % nc]
        ex, ey = dx - cx, dy - cy
        input_pts = output
        output = []

        def side(pt: tuple[float, float]) -> float:
            # >= 0 means on the interior side of edge (c, d) of a CCW polygon
            return ex * (pt[1] - cy) - ey * (pt[0] - cx)

        prev = input_pts[-1]
        prev_s = side(prev)
        for cur in input_pts:
            cur_s = side(cur)
            if cur_s >= 0.0:
                if prev_s < 0.0:
                    output.append(_line_intersect(prev, cur, prev_s, cur_s))
                output.append(cur)
            elif prev_s >= 0.0:
                output.append(_line_intersect(prev, cur, prev_s, cur_s))
            prev, prev_s = cur, cur_s
    if len(output) < 3:
        return 0.0
    area = _signed_area(np.array(output))
    return max(area, 0.0)


def _line_intersect(p: tuple[float, float], q: tuple[float, float],
                    sp: float, sq: float) -> tuple[float, float]:
    t = sp / (sp - sq)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def intersection_area(p: Polygon, q: Polygon) -> float:
    """Area of the intersection of two simple polygons.

    Both inputs are triangulated (ear clipping) and each triangle of p is
    clipped against each triangle of q, so non-convex shapes are exact up to
    floating point.  Shared edges contribute zero area.
    """
    total = 0.0
    tris_q = triangulate(q)
    for tp in triangulate(p):
        for tq in tris_q:
            total += _clip_by_convex(tp, tq)
    return total
