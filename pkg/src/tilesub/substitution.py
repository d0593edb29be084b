"""Substitution rules: loading, validation, supertile generation, and frequencies.

A rule carries m prototiles and, for each, an ordered list of child placements
that dissect the inflated prototile.  Patches are stored as parallel numpy
arrays (prototile id, orientation, translation) so substitution and the
statistics downstream stay vectorized.
"""

from __future__ import annotations

import itertools
import json
import math
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CapExceededError,
    GeometryError,
    NotPrimitiveError,
    ParseError,
    RuleError,
    TilesubError,
)
from .geometry import (
    BOUNDARY,
    EPS_ANG,
    EPS_GEO,
    OUTSIDE,
    Angle,
    Polygon,
    RigidMotion,
    Vec2,
    apply_motion,
    canon_angle,
    canon_angle_array,
    classify_points,
    intersection_area,
    point_in_polygon,
    polygon_area,
)

DEFAULT_TILE_CAP = 10**7

COVERAGE_SAMPLES = 10**4

# Quasi-random plane sampler constants (R2 sequence, plastic number based)
_R2_G = 1.3247179572447460
_R2_A1 = 1.0 / _R2_G
_R2_A2 = 1.0 / (_R2_G * _R2_G)


@dataclass(frozen=True)
class Prototile:
    """Reference shape with a control point, in its own frame at orientation 0."""

    id: int
    label: str
    shape: Polygon
    control_point: Vec2
    decoration: str | None = None

    def __post_init__(self) -> None:
        where = point_in_polygon(self.control_point, self.shape)
        if where == OUTSIDE:
            raise RuleError(
                f"prototile {self.id} ({self.label!r}): control point "
                f"({self.control_point.x}, {self.control_point.y}) lies outside the shape")
        object.__setattr__(self, "_control_on_boundary", where == BOUNDARY)

    @property
    def control_on_boundary(self) -> bool:
        return self._control_on_boundary  # type: ignore[attr-defined]


@dataclass(frozen=True)
class TilePlacement:
    """A placed tile: prototile rotated by `orientation`, then translated."""

    prototile_id: int
    orientation: Angle
    translation: Vec2

    def motion(self) -> RigidMotion:
        return RigidMotion(self.orientation, self.translation)

    def realized_shape(self, rule: "SubstitutionRule") -> Polygon:
        return apply_motion(self.motion(), rule.prototiles[self.prototile_id].shape)

    def realized_control(self, rule: "SubstitutionRule") -> Vec2:
        return self.motion()(rule.prototiles[self.prototile_id].control_point)


class SubstitutionRule:
    """Inflate-and-dissect rule: prototiles, factor > 1, per-prototile children.

    Child placements live in the frame of the inflated prototile: the union of
    child shapes must equal the prototile scaled by the inflation factor.
    """

    __slots__ = ("name", "inflation", "prototiles", "children",
                 "_child_ids", "_child_angles", "_child_trans", "_child_counts")

    def __init__(self, name: str, inflation: float,
                 prototiles: Sequence[Prototile],
                 children: Sequence[Sequence[TilePlacement]]):
        if not math.isfinite(inflation) or inflation <= 1.0:
            raise RuleError("lambda must exceed 1")
        if len(prototiles) == 0:
            raise RuleError("rule needs at least one prototile")
        if len(children) != len(prototiles):
            raise RuleError(
                f"children lists ({len(children)}) must match prototile count ({len(prototiles)})")
        m = len(prototiles)
        for p, kids in enumerate(children):
            if len(kids) == 0:
                raise RuleError(f"prototile {p} has no children")
            for c, kid in enumerate(kids):
                if not (0 <= kid.prototile_id < m):
                    raise RuleError(
                        f"child {c} of prototile {p} references prototile "
                        f"{kid.prototile_id}, valid range is 0..{m - 1}")
        self.name = name
        self.inflation = float(inflation)
        self.prototiles = tuple(prototiles)
        self.children = tuple(tuple(kids) for kids in children)
        # flat per-prototile child arrays, used by the vectorized substitution
        self._child_ids = [np.array([k.prototile_id for k in kids], dtype=np.int64)
                           for kids in self.children]
        self._child_angles = [np.array([k.orientation.radians for k in kids], dtype=float)
                              for kids in self.children]
        self._child_trans = [np.array([(k.translation.x, k.translation.y) for k in kids],
                                      dtype=float)
                             for kids in self.children]
        self._child_counts = np.array([len(kids) for kids in self.children], dtype=np.int64)

    @property
    def m(self) -> int:
        return len(self.prototiles)

    def __repr__(self) -> str:
        return (f"SubstitutionRule({self.name!r}, m={self.m}, "
                f"inflation={self.inflation:.6g})")


class Patch:
    """Ordered collection of placed tiles under one rule, numpy-backed.

    `provenance` is (seed prototile id, depth) for generated supertiles and
    None for free patches.
    """

    __slots__ = ("rule", "ids", "angles", "trans", "provenance")

    def __init__(self, rule: SubstitutionRule, ids: np.ndarray, angles: np.ndarray,
                 trans: np.ndarray, provenance: tuple[int, int] | None = None):
        ids = np.asarray(ids, dtype=np.int64)
        angles = canon_angle_array(np.asarray(angles, dtype=float).copy())
        trans = np.asarray(trans, dtype=float)
        if ids.ndim != 1 or angles.shape != ids.shape or trans.shape != (len(ids), 2):
            raise TilesubError("patch arrays have inconsistent shapes")
        if len(ids) and (ids.min() < 0 or ids.max() >= rule.m):
            raise TilesubError("patch references prototile ids outside the rule")
        if not (np.isfinite(angles).all() and np.isfinite(trans).all()):
            raise GeometryError("patch contains non-finite placements")
        for a in (ids, angles, trans):
            a.setflags(write=False)
        self.rule = rule
        self.ids = ids
        self.angles = angles
        self.trans = trans
        self.provenance = provenance

    @classmethod
    def from_placements(cls, rule: SubstitutionRule,
                        placements: Iterable[TilePlacement],
                        provenance: tuple[int, int] | None = None) -> "Patch":
        tiles = list(placements)
        ids = np.array([t.prototile_id for t in tiles], dtype=np.int64)
        angles = np.array([t.orientation.radians for t in tiles], dtype=float)
        trans = np.array([(t.translation.x, t.translation.y) for t in tiles],
                         dtype=float).reshape(len(tiles), 2)
        return cls(rule, ids, angles, trans, provenance)

    def __len__(self) -> int:
        return len(self.ids)

    def placement(self, idx: int) -> TilePlacement:
        return TilePlacement(int(self.ids[idx]), Angle(float(self.angles[idx])),
                             Vec2(float(self.trans[idx, 0]), float(self.trans[idx, 1])))

    def placements(self) -> Iterator[TilePlacement]:
        for i in range(len(self)):
            yield self.placement(i)

    def realized_polygon(self, idx: int) -> Polygon:
        return self.placement(idx).realized_shape(self.rule)

    def control_xy(self) -> np.ndarray:
        """Placed control points, one row per tile: R_phi x_i + t."""
        out = np.empty((len(self), 2), dtype=float)
        c, s = np.cos(self.angles), np.sin(self.angles)
        for p, proto in enumerate(self.rule.prototiles):
            mask = self.ids == p
            if not mask.any():
                continue
            x, y = proto.control_point.x, proto.control_point.y
            out[mask, 0] = c[mask] * x - s[mask] * y
            out[mask, 1] = s[mask] * x + c[mask] * y
        out += self.trans
        return out

    def transformed(self, motion: RigidMotion) -> "Patch":
        """Patch moved rigidly: every tile (i, a, t) becomes (i, a+b, R_b t + u)."""
        b = motion.rotation.radians
        cb, sb = math.cos(b), math.sin(b)
        tr = np.empty_like(self.trans)
        tr[:, 0] = cb * self.trans[:, 0] - sb * self.trans[:, 1] + motion.translation.x
        tr[:, 1] = sb * self.trans[:, 0] + cb * self.trans[:, 1] + motion.translation.y
        return Patch(self.rule, self.ids.copy(), self.angles + b, tr, None)

    def translated(self, shift: Vec2) -> "Patch":
        tr = self.trans + np.array([shift.x, shift.y])
        return Patch(self.rule, self.ids.copy(), self.angles.copy(), tr, None)

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) over all realized tile vertices."""
        if len(self) == 0:
            raise TilesubError("empty patch has no bounding box")
        xmin = ymin = math.inf
        xmax = ymax = -math.inf
        c, s = np.cos(self.angles), np.sin(self.angles)
        for p, proto in enumerate(self.rule.prototiles):
            mask = self.ids == p
            if not mask.any():
                continue
            cm, sm = c[mask], s[mask]
            tx, ty = self.trans[mask, 0], self.trans[mask, 1]
            for vx, vy in proto.shape.array:
                px = cm * vx - sm * vy + tx
                py = sm * vx + cm * vy + ty
                xmin = min(xmin, float(px.min()))
                xmax = max(xmax, float(px.max()))
                ymin = min(ymin, float(py.min()))
                ymax = max(ymax, float(py.max()))
        return (xmin, ymin, xmax, ymax)

    def __repr__(self) -> str:
        prov = "free" if self.provenance is None else self.provenance
        return f"Patch({self.rule.name}, tiles={len(self)}, provenance={prov})"


# ---------------------------------------------------------------------------
# rule loading


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParseError(msg)


def _parse_vec(obj: object, where: str) -> Vec2:
    _require(isinstance(obj, (list, tuple)) and len(obj) == 2,
             f"{where}: expected [x, y], got {obj!r}")
    x, y = obj  # type: ignore[misc]
    _require(isinstance(x, (int, float)) and isinstance(y, (int, float)),
             f"{where}: coordinates must be numbers")
    return Vec2(float(x), float(y))


def load_rule(document: str) -> SubstitutionRule:
    """Parse a rule from JSON text and construct it with geometry validation.

    Structural problems raise ParseError naming the offending field; geometric
    problems (bad winding, control point outside) raise RuleError naming the
    prototile.
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    _require(isinstance(data, dict), "rule document must be a JSON object")
    for key in ("name", "lambda", "prototiles", "children"):
        _require(key in data, f"missing required field {key!r}")
    name = data["name"]
    _require(isinstance(name, str) and name != "", "field 'name' must be a nonempty string")
    lam = data["lambda"]
    _require(isinstance(lam, (int, float)), "field 'lambda' must be a number")
    if not (isinstance(lam, (int, float)) and math.isfinite(lam) and lam > 1.0):
        raise RuleError("lambda must exceed 1")

    raw_protos = data["prototiles"]
    _require(isinstance(raw_protos, list) and raw_protos,
             "field 'prototiles' must be a nonempty array")
    prototiles = []
    for i, rp in enumerate(raw_protos):
        where = f"prototiles[{i}]"
        _require(isinstance(rp, dict), f"{where}: expected an object")
        _require("label" in rp and isinstance(rp["label"], str), f"{where}.label: required string")
        _require("vertices" in rp and isinstance(rp["vertices"], list),
                 f"{where}.vertices: required array")
        _require("control_point" in rp, f"{where}.control_point: required")
        verts = [_parse_vec(v, f"{where}.vertices[{j}]") for j, v in enumerate(rp["vertices"])]
        try:
            shape = Polygon(verts)
        except GeometryError as e:
            raise RuleError(f"prototile {i} ({rp['label']!r}): {e}") from e
        control = _parse_vec(rp["control_point"], f"{where}.control_point")
        deco = rp.get("decoration")
        _require(deco is None or isinstance(deco, str), f"{where}.decoration: must be a string")
        prototiles.append(Prototile(i, rp["label"], shape, control, deco))

    raw_children = data["children"]
    _require(isinstance(raw_children, list), "field 'children' must be an array")
    _require(len(raw_children) == len(prototiles),
             f"'children' has {len(raw_children)} entries for {len(prototiles)} prototiles")
    children: list[list[TilePlacement]] = []
    for p, kids in enumerate(raw_children):
        where = f"children[{p}]"
        _require(isinstance(kids, list) and kids, f"{where}: must be a nonempty array")
        lst = []
        for c, rk in enumerate(kids):
            kwhere = f"{where}[{c}]"
            _require(isinstance(rk, dict), f"{kwhere}: expected an object")
            for key in ("prototile", "angle", "translation"):
                _require(key in rk, f"{kwhere}.{key}: required")
            pid = rk["prototile"]
            _require(isinstance(pid, int) and not isinstance(pid, bool),
                     f"{kwhere}.prototile: must be an integer index")
            ang = rk["angle"]
            _require(isinstance(ang, (int, float)), f"{kwhere}.angle: must be a number")
            lst.append(TilePlacement(pid, Angle(float(ang)),
                                     _parse_vec(rk["translation"], f"{kwhere}.translation")))
        children.append(lst)
    return SubstitutionRule(name, float(lam), prototiles, children)


def load_rule_file(path: str) -> SubstitutionRule:
    with open(path, "r", encoding="utf-8") as f:
        return load_rule(f.read())


def bundled_rule(name: str) -> SubstitutionRule:
    """Load one of the rules shipped with the package: pinwheel, chair, imbalance."""
    ref = resources.files("tilesub").joinpath("rules", f"{name}.json")
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise TilesubError(f"no bundled rule named {name!r}") from None
    return load_rule(text)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class PrototileReport:
    prototile_id: int
    area_residual: float
    max_overlap: float
    overlap_limit: float
    samples_tested: int
    samples_skipped: int
    uncovered: int
    uncovered_example: tuple[float, float] | None

    @property
    def passes(self) -> bool:
        return (self.area_residual < 1e-9
                and self.max_overlap < self.overlap_limit
                and self.uncovered == 0)


@dataclass(frozen=True)
class ValidationReport:
    rule_name: str
    reports: tuple[PrototileReport, ...]
    boundary_controls: tuple[int, ...]

    @property
    def passes(self) -> bool:
        return all(r.passes for r in self.reports)

    def summary(self) -> str:
        lines = [f"rule {self.rule_name}: {'PASS' if self.passes else 'FAIL'}"]
        for r in self.reports:
            lines.append(
                f"  prototile {r.prototile_id}: area residual {r.area_residual:.3e}, "
                f"max overlap {r.max_overlap:.3e} (limit {r.overlap_limit:.3e}), "
                f"coverage {r.samples_tested - r.uncovered}/{r.samples_tested} "
                f"({r.samples_skipped} skipped)"
                + ("" if r.passes else "  <- FAIL"))
        if self.boundary_controls:
            ids = ", ".join(str(i) for i in self.boundary_controls)
            lines.append(f"  note: control point on shape boundary for prototile(s) {ids}")
        return "\n".join(lines)


def _r2_points(n: int, skip: int = 0) -> np.ndarray:
    """Deterministic low-discrepancy points in the unit square (R2 sequence)."""
    idx = np.arange(skip + 1, skip + n + 1, dtype=float)
    return np.stack([np.mod(0.5 + _R2_A1 * idx, 1.0),
                     np.mod(0.5 + _R2_A2 * idx, 1.0)], axis=1)


def validate_rule(rule: SubstitutionRule, seed: int = 0) -> ValidationReport:
    """Check the dissection: areas add up, children do not overlap, union covers.

    Coverage uses 10^4 low-discrepancy sample points inside each inflated
    prototile; samples within EPS_GEO of any child boundary are skipped, every
    other sample must land inside at least one child.  The seed offsets the
    sample sequence so independent runs can probe different points.
    """
    lam = rule.inflation
    reports = []
    for p, proto in enumerate(rule.prototiles):
        parent = proto.shape.scaled(lam)
        parent_area = polygon_area(parent)
        kids = rule.children[p]
        child_polys = [k.realized_shape(rule) for k in kids]
        child_areas = [polygon_area(cp) for cp in child_polys]
        residual = abs(sum(child_areas) - parent_area) / parent_area

        overlap_limit = 1e-9 * min(child_areas)
        max_overlap = 0.0
        for i, j in itertools.combinations(range(len(kids)), 2):
            max_overlap = max(max_overlap, intersection_area(child_polys[i], child_polys[j]))

        # collect COVERAGE_SAMPLES strictly-interior low-discrepancy points
        bbox = parent.array
        lo = bbox.min(axis=0)
        span = bbox.max(axis=0) - lo
        inside_pts = np.empty((0, 2))
        skip = seed * 100 * COVERAGE_SAMPLES
        while len(inside_pts) < COVERAGE_SAMPLES:
            batch = _r2_points(4 * COVERAGE_SAMPLES, skip)
            skip += 4 * COVERAGE_SAMPLES
            pts = lo + batch * span
            keep = classify_points(pts, parent) == 2
            inside_pts = np.concatenate([inside_pts, pts[keep]])
            if skip - seed * 100 * COVERAGE_SAMPLES > 100 * COVERAGE_SAMPLES:
                raise RuleError(
                    f"prototile {p}: could not sample interior points (degenerate shape?)")
        inside_pts = inside_pts[:COVERAGE_SAMPLES]

        codes = np.stack([classify_points(inside_pts, cp) for cp in child_polys])
        near_boundary = (codes == 1).any(axis=0)
        covered = (codes == 2).any(axis=0)
        miss = ~near_boundary & ~covered
        uncovered = int(miss.sum())
        example = None
        if uncovered:
            k = int(np.argmax(miss))
            example = (float(inside_pts[k, 0]), float(inside_pts[k, 1]))
        reports.append(PrototileReport(
            prototile_id=p,
            area_residual=float(residual),
            max_overlap=float(max_overlap),
            overlap_limit=float(overlap_limit),
            samples_tested=int(len(inside_pts)),
            samples_skipped=int(near_boundary.sum()),
            uncovered=uncovered,
            uncovered_example=example,
        ))
    boundary = tuple(p.id for p in rule.prototiles if p.control_on_boundary)
    return ValidationReport(rule.name, tuple(reports), boundary)


# ---------------------------------------------------------------------------
# substitution and supertiles


def substitute(patch: Patch) -> Patch:
    """Replace every tile by its children.

    A tile (i, a, t) yields children (j, a+b, R_a u + lambda*t) for each child
    (j, b, u) of prototile i.  Output order is the concatenation of child
    blocks in patch order, children in rule order; downstream orientation
    statistics depend on this order.
    """
    rule = patch.rule
    n = len(patch)
    if n == 0:
        return Patch(rule, np.empty(0, dtype=np.int64), np.empty(0), np.empty((0, 2)),
                     None)
    counts = rule._child_counts[patch.ids]
    offsets = np.zeros(n, dtype=np.int64)
    np.cumsum(counts[:-1], out=offsets[1:])
    total = int(offsets[-1] + counts[-1])
    out_ids = np.empty(total, dtype=np.int64)
    out_angles = np.empty(total, dtype=float)
    out_trans = np.empty((total, 2), dtype=float)
    lam = rule.inflation
    cos_a, sin_a = np.cos(patch.angles), np.sin(patch.angles)
    for p in range(rule.m):
        sel = np.flatnonzero(patch.ids == p)
        if len(sel) == 0:
            continue
        c, s = cos_a[sel], sin_a[sel]
        base = offsets[sel]
        ptx = lam * patch.trans[sel, 0]
        pty = lam * patch.trans[sel, 1]
        ang = patch.angles[sel]
        for j in range(int(rule._child_counts[p])):
            pos = base + j
            out_ids[pos] = rule._child_ids[p][j]
            out_angles[pos] = ang + rule._child_angles[p][j]
            ux, uy = rule._child_trans[p][j]
            out_trans[pos, 0] = c * ux - s * uy + ptx
            out_trans[pos, 1] = s * ux + c * uy + pty
    return Patch(rule, out_ids, out_angles, out_trans, None)


def predicted_tile_count(rule: SubstitutionRule, i: int, k: int) -> int:
    """Exact tile count of the depth-k supertile of prototile i (integer matvec)."""
    m = rule.m
    M = [[0] * m for _ in range(m)]
    for j, kids in enumerate(rule.children):
        for kid in kids:
            M[kid.prototile_id][j] += 1
    v = [0] * m
    v[i] = 1
    for _ in range(k):
        v = [sum(M[r][c] * v[c] for c in range(m)) for r in range(m)]
    return sum(v)


def supertile(rule: SubstitutionRule, i: int, k: int,
              cap: int = DEFAULT_TILE_CAP) -> Patch:
    """Depth-k supertile of prototile i: k substitutions of the seed placement.

    Refuses before doing any work if the exact predicted tile count exceeds
    `cap`.
    """
    if not (0 <= i < rule.m):
        raise TilesubError(f"prototile id {i} out of range 0..{rule.m - 1}")
    if k < 0:
        raise TilesubError("depth must be >= 0")
    predicted = predicted_tile_count(rule, i, k)
    if predicted > cap:
        raise CapExceededError(predicted, cap)
    patch = Patch(rule, np.array([i], dtype=np.int64), np.zeros(1), np.zeros((1, 2)),
                  provenance=(i, 0))
    for _ in range(k):
        patch = substitute(patch)
    return Patch(rule, patch.ids, patch.angles, patch.trans, provenance=(i, k))


# ---------------------------------------------------------------------------
# matrix, primitivity, Perron-Frobenius data


def substitution_matrix(rule: SubstitutionRule) -> np.ndarray:
    """m x m integer matrix: entry (i, j) counts children of P_j congruent to P_i."""
    m = rule.m
    M = np.zeros((m, m), dtype=np.int64)
    for j, kids in enumerate(rule.children):
        for kid in kids:
            M[kid.prototile_id, j] += 1
    return M


def is_primitive(M: np.ndarray) -> tuple[bool, int | None]:
    """Smallest k with M^k entrywise positive, searched up to the Wielandt bound.

    Powers are taken in the boolean semiring, so entry growth cannot overflow.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise TilesubError("matrix must be square")
    if (M < 0).any():
        raise TilesubError("matrix must be nonnegative")
    m = M.shape[0]
    bound = m * m - 2 * m + 2
    B = M > 0
    P = B.copy()
    for k in range(1, bound + 1):
        if P.all():
            return True, k
        P = (P.astype(np.int64) @ B.astype(np.int64)) > 0
    return False, None


def pf_eigen(M: np.ndarray, tol: float = 1e-13,
             max_iter: int = 10**5) -> tuple[float, np.ndarray]:
    """Dominant eigenvalue and positive unit-sum eigenvector by power iteration.

    Requires a primitive matrix; convergence is declared when successive
    normalized iterates differ by less than `tol` in the 1-norm.
    """
    M = np.asarray(M, dtype=float)
    ok, _ = is_primitive(M)
    if not ok:
        raise NotPrimitiveError("matrix is not primitive; frequencies undefined")
    m = M.shape[0]
    v = np.full(m, 1.0 / m)
    for _ in range(max_iter):
        w = M @ v
        w /= w.sum()
        if np.abs(w - v).sum() < tol:
            v = w
            break
        v = w
    else:
        raise TilesubError("power iteration did not converge")
    eigenvalue = float((M @ v).sum())
    return eigenvalue, v


# ---------------------------------------------------------------------------
# orientation census and translation classes


class _AngleClasses:
    """Per-prototile sorted angle representatives, merged within EPS_ANG circularly."""

    def __init__(self, m: int):
        self._reps: list[list[float]] = [[] for _ in range(m)]

    def canon_rep(self, p: int, angle: float) -> float:
        """Representative for (p, angle), inserting a new class when none is near."""
        a = canon_angle(angle)
        reps = self._reps[p]
        if reps:
            i = bisect_left(reps, a)
            for j in (i - 1, i % len(reps)):
                r = reps[j]
                d = abs(a - r)
                if min(d, 2.0 * math.pi - d) < EPS_ANG:
                    return r
        insort(reps, a)
        return a

    def lookup(self, p: int, angle: float) -> float | None:
        a = canon_angle(angle)
        reps = self._reps[p]
        if not reps:
            return None
        i = bisect_left(reps, a)
        for j in (i - 1, i % len(reps)):
            r = reps[j]
            d = abs(a - r)
            if min(d, 2.0 * math.pi - d) < EPS_ANG:
                return r
        return None

    def classes(self) -> list[tuple[int, float]]:
        return [(p, r) for p, reps in enumerate(self._reps) for r in reps]


@dataclass(frozen=True)
class CensusResult:
    """Distinct (prototile, orientation) classes accumulated over supertile depths."""

    status: str  # "FINITE" or "GROWING"
    counts: tuple[int, ...]  # cumulative distinct-class count after each depth
    classes: tuple[tuple[int, float], ...] | None  # populated when FINITE

    @property
    def finite(self) -> bool:
        return self.status == "FINITE"


def orientation_census(rule: SubstitutionRule, k_max: int = 10,
                       window: int = 3, seed: int = 0) -> CensusResult:
    """Track distinct tile classes over supertiles of increasing depth.

    The per-depth class set is expanded symbolically (a class at depth k+1
    depends only on a class at depth k), so cost is polynomial in the class
    count rather than exponential in depth.  The cumulative set is monotone;
    FINITE is declared when it is unchanged over the trailing `window` depths.
    """
    if k_max < window:
        raise TilesubError("k_max must be at least the stability window")
    if not (0 <= seed < rule.m):
        raise TilesubError(f"seed prototile {seed} out of range")
    classes = _AngleClasses(rule.m)
    current: set[tuple[int, float]] = {(seed, classes.canon_rep(seed, 0.0))}
    cumulative: set[tuple[int, float]] = set()
    counts = []
    for _ in range(k_max):
        nxt: set[tuple[int, float]] = set()
        for (p, a) in current:
            for kid in rule.children[p]:
                q = kid.prototile_id
                nxt.add((q, classes.canon_rep(q, a + kid.orientation.radians)))
        current = nxt
        cumulative |= nxt
        counts.append(len(cumulative))
    if len(set(counts[-window:])) == 1:
        stable = tuple(sorted(cumulative))
        return CensusResult("FINITE", tuple(counts), stable)
    return CensusResult("GROWING", tuple(counts), None)


def expand_translation_classes(
        rule: SubstitutionRule, k_max: int = 10, window: int = 3,
) -> tuple[SubstitutionRule, dict[int, tuple[int, float]]]:
    """Split each prototile into one prototile per occurring orientation.

    The returned rule has every child at orientation 0, so its substitution
    matrix counts translation classes; its PF eigenvector gives per-class
    frequencies.  The class map sends new prototile ids to (old id, angle).
    """
    census = orientation_census(rule, k_max=k_max, window=window)
    if not census.finite:
        raise TilesubError(
            "rule has infinitely many tile orientations; translation classes undefined")
    assert census.classes is not None
    # stability of the census guarantees closure: children of every listed
    # class are themselves listed, so the expanded rule is well-defined
    all_classes = sorted(census.classes)
    index: dict[tuple[int, float], int] = {c: i for i, c in enumerate(all_classes)}
    lookup = _AngleClasses(rule.m)
    for (p, a) in all_classes:
        lookup.canon_rep(p, a)

    new_protos = []
    new_children: list[list[TilePlacement]] = []
    for new_id, (p, alpha) in enumerate(all_classes):
        old = rule.prototiles[p]
        rot = RigidMotion(Angle(alpha), Vec2(0.0, 0.0))
        label = f"{old.label}@{alpha:.6f}"
        new_protos.append(Prototile(new_id, label, apply_motion(rot, old.shape),
                                    rot(old.control_point), old.decoration))
        kids = []
        for kid in rule.children[p]:
            q = kid.prototile_id
            beta = canon_angle(alpha + kid.orientation.radians)
            rep = lookup.lookup(q, beta)
            if rep is None or (q, rep) not in index:
                raise TilesubError(
                    f"class ({q}, {beta:.9f}) missing from census; "
                    "increase k_max or the stability window")
            kids.append(TilePlacement(index[(q, rep)], Angle(0.0),
                                      rot(kid.translation)))
        new_children.append(kids)
    expanded = SubstitutionRule(f"{rule.name}-classes", rule.inflation,
                                new_protos, new_children)
    class_map = {i: c for i, c in enumerate(all_classes)}
    return expanded, class_map


# ---------------------------------------------------------------------------
# empirical frequencies


@dataclass(frozen=True)
class FrequencyEstimate:
    """Finite-radius frequency of one tile class among control points in a ball."""

    value: float
    numerator: int
    denominator: int
    radius: float
    ball_covered: bool  # False when B_r(0) provably exceeds the patch extent

    @property
    def warning(self) -> bool:
        return not self.ball_covered


def empirical_frequency(patch: Patch, prototile_id: int, orientation: Angle | float,
                        r: float) -> FrequencyEstimate:
    """Share of tiles (prototile_id, orientation) among tiles with control in B_r(0).

    Membership convention: a tile is inside the ball iff its placed control
    point is, in the closed ball.  When the ball is provably not covered by
    the patch (it pokes outside the patch bounding box), the estimate carries
    a warning flag; the value is still the ratio over what the patch contains.
    """
    if len(patch) == 0:
        raise TilesubError("empty patch")
    if r < 0:
        raise TilesubError("radius must be >= 0")
    target = orientation.radians if isinstance(orientation, Angle) else canon_angle(orientation)
    pts = patch.control_xy()
    in_ball = np.hypot(pts[:, 0], pts[:, 1]) <= r
    denom = int(in_ball.sum())
    if denom == 0:
        raise TilesubError(f"no control points inside radius {r}")
    d = np.abs(canon_angle_array(patch.angles.copy()) - target)
    ang_ok = np.minimum(d, 2.0 * math.pi - d) < EPS_ANG
    num = int((in_ball & (patch.ids == prototile_id) & ang_ok).sum())
    xmin, ymin, xmax, ymax = patch.bounding_box()
    if xmin <= 0.0 <= xmax and ymin <= 0.0 <= ymax:
        inscribed = min(xmax, -xmin, ymax, -ymin)
    else:
        inscribed = 0.0
    return FrequencyEstimate(num / denom, num, denom, float(r), bool(r <= inscribed))
