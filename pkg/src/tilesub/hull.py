"""A computable metric between finite patches.

Two patches are epsilon-close when small shifts (at most epsilon/2 each) and a
small rotation (at most epsilon) make them agree tile-for-tile on the ball of
radius 1/epsilon; the distance is the infimum of workable epsilon, capped at
1/sqrt(2).  Candidate motions come from aligning near-origin tile pairs, and
the reported value is located by bisection over epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import TilesubError
from .geometry import (
    EPS_ANG,
    EPS_GEO,
    TWO_PI,
    Vec2,
    polygon_distance_bulk,
)
from .substitution import Patch

METRIC_CAP = 1.0 / math.sqrt(2.0)

DEFAULT_EPS_FLOOR = 1e-6

BISECTION_ITERATIONS = 20


@dataclass(frozen=True)
class Witness:
    """Motion certificate: shifts s (on the first patch) and t, rotation alpha."""

    epsilon: float
    alpha: float
    s: Vec2
    t: Vec2


@dataclass(frozen=True)
class PatchDistance:
    """Metric value with optional witness.

    exactness is "exact-on-candidates" when the value is settled within the
    candidate motions (a witness was found, or no candidate could exist), and
    "upper-bound" when candidates existed but none was feasible, leaving the
    enumeration as the binding constraint.
    """

    value: float
    witness: Witness | None
    exactness: str


def _restrict_indices(patch: Patch, center_x: float, center_y: float,
                      radius: float) -> np.ndarray:
    """Tile indices whose realized shape comes within `radius` of the center.

    The distance from a point c to the tile R_a P + t equals the distance
    from R_{-a}(c - t) to P, so each prototile group is tested in its own
    frame with one vectorized polygon-distance pass.
    """
    n = len(patch)
    dist = np.full(n, np.inf)
    c, s = np.cos(patch.angles), np.sin(patch.angles)
    dx = center_x - patch.trans[:, 0]
    dy = center_y - patch.trans[:, 1]
    for p, proto in enumerate(patch.rule.prototiles):
        mask = patch.ids == p
        if not mask.any():
            continue
        qx = c[mask] * dx[mask] + s[mask] * dy[mask]
        qy = -s[mask] * dx[mask] + c[mask] * dy[mask]
        dist[mask] = polygon_distance_bulk(np.stack([qx, qy], axis=1), proto.shape)
    return np.flatnonzero(dist < radius - EPS_GEO)


def ball_restriction(patch: Patch, radius: float) -> Patch:
    """Sub-patch of tiles whose shape intersects the open ball B_radius(0)."""
    if radius <= 0:
        raise TilesubError("radius must be positive")
    idx = _restrict_indices(patch, 0.0, 0.0, radius)
    return Patch(patch.rule, patch.ids[idx], patch.angles[idx], patch.trans[idx],
                 None)


def _covers_origin(patch: Patch) -> bool:
    n = len(patch)
    if n == 0:
        return False
    return len(_restrict_indices(patch, 0.0, 0.0, EPS_GEO * 2.0)) > 0


def _reduce_angle(d: float) -> float:
    """Reduce an angle difference to (-pi, pi]."""
    r = math.fmod(d, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r > math.pi:
        r -= TWO_PI
    return r


def _agree_on_ball(a: Patch, b: Patch, alpha: float, sx: float, sy: float,
                   tx: float, ty: float, radius: float) -> bool:
    """Tile-for-tile equality of B_radius ∩ (a + s) and B_radius ∩ (R_alpha b + t)."""
    ia = _restrict_indices(a, -sx, -sy, radius)
    ca, sa = math.cos(alpha), math.sin(alpha)
    # center for b's restriction: R_{-alpha}(0 - t)
    cbx = -(ca * tx + sa * ty)
    cby = -(-sa * tx + ca * ty)
    ib = _restrict_indices(b, cbx, cby, radius)
    if len(ia) != len(ib):
        return False
    if len(ia) == 0:
        return True
    a_ids = a.ids[ia]
    a_ang = a.angles[ia]
    a_xy = a.trans[ia] + np.array([sx, sy])
    b_ids = b.ids[ib]
    b_ang = np.mod(b.angles[ib] + alpha, TWO_PI)
    b_xy = np.empty((len(ib), 2))
    b_xy[:, 0] = ca * b.trans[ib, 0] - sa * b.trans[ib, 1] + tx
    b_xy[:, 1] = sa * b.trans[ib, 0] + ca * b.trans[ib, 1] + ty
    tree = cKDTree(b_xy)
    used = np.zeros(len(ib), dtype=bool)
    matches = tree.query_ball_point(a_xy, EPS_GEO)
    for row, cands in enumerate(matches):
        hit = -1
        for j in cands:
            if used[j] or b_ids[j] != a_ids[row]:
                continue
            d = abs(a_ang[row] - b_ang[j])
            if min(d, TWO_PI - d) < EPS_ANG:
                hit = j
                break
        if hit < 0:
            return False
        used[hit] = True
    return True


def patch_distance(first: Patch, second: Patch,
                   eps_floor: float = DEFAULT_EPS_FLOOR) -> PatchDistance:
    """Metric distance between two finite patches over the same rule.

    Feasibility of a trial epsilon is decided over candidate motions built by
    aligning same-prototile tile pairs near the origin: the rotation is the
    orientation difference reduced to (-pi, pi], and the relative translation
    is split evenly between the two shifts.  Feasibility is monotone in
    epsilon (larger epsilon relaxes the motion bounds and shrinks the
    agreement ball), so bisection brackets the infimum.
    """
    if first.rule.name != second.rule.name or first.rule.m != second.rule.m:
        raise TilesubError("patches must come from the same rule")
    for name, p in (("first", first), ("second", second)):
        if not _covers_origin(p):
            raise TilesubError(f"{name} patch does not cover the origin")

    cand_radius = max(pt.shape.diameter() for pt in first.rule.prototiles) + 1.0
    near_a = _restrict_indices(first, 0.0, 0.0, cand_radius)
    near_b = _restrict_indices(second, 0.0, 0.0, cand_radius)
    candidates = []
    for u in near_a:
        pu = int(first.ids[u])
        for v in near_b:
            if int(second.ids[v]) != pu:
                continue
            alpha = _reduce_angle(float(first.angles[u]) - float(second.angles[v]))
            ca, sa = math.cos(alpha), math.sin(alpha)
            rvx = ca * second.trans[v, 0] - sa * second.trans[v, 1]
            rvy = sa * second.trans[v, 0] + ca * second.trans[v, 1]
            dx = float(first.trans[u, 0] - rvx)
            dy = float(first.trans[u, 1] - rvy)
            norm = math.hypot(dx, dy)
            candidates.append((norm, abs(alpha), int(u), int(v), alpha, dx, dy))
    candidates.sort()

    if not candidates:
        return PatchDistance(METRIC_CAP, None, "exact-on-candidates")

    def feasible(eps: float) -> Witness | None:
        radius = 1.0 / eps
        for norm, aabs, _, _, alpha, dx, dy in candidates:
            if norm > eps or aabs > eps:
                continue
            sx, sy = -dx / 2.0, -dy / 2.0
            tx, ty = dx / 2.0, dy / 2.0
            if _agree_on_ball(first, second, alpha, sx, sy, tx, ty, radius):
                return Witness(eps, alpha, Vec2(sx, sy), Vec2(tx, ty))
        return None

    w = feasible(eps_floor)
    if w is not None:
        return PatchDistance(eps_floor, w, "exact-on-candidates")
    hi_witness = feasible(METRIC_CAP)
    if hi_witness is None:
        return PatchDistance(METRIC_CAP, None, "upper-bound")
    lo, hi = eps_floor, METRIC_CAP
    for _ in range(BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        w = feasible(mid)
        if w is not None:
            hi, hi_witness = mid, w
        else:
            lo = mid
    return PatchDistance(hi, hi_witness, "exact-on-candidates")


def verify_witness(first: Patch, second: Patch, w: Witness) -> bool:
    """Independent re-check: motion bounds hold and the motioned patches agree."""
    if w.epsilon <= 0:
        return False
    if abs(w.alpha) > w.epsilon + EPS_ANG:
        return False
    if w.s.norm() > w.epsilon / 2.0 + EPS_GEO or w.t.norm() > w.epsilon / 2.0 + EPS_GEO:
        return False
    return _agree_on_ball(first, second, w.alpha, w.s.x, w.s.y, w.t.x, w.t.y,
                          1.0 / w.epsilon)
