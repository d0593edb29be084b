"""Spectral estimators over control-point sets: autocorrelation and diffraction.

The autocorrelation estimator accumulates difference vectors of point pairs
into polar bins with an edge correction (left points restricted to a shrunken
ball), the diffraction estimator evaluates the exponential sum directly on a
k-grid.  Circular-symmetry statistics summarize the angular spread per radial
shell in either picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import TilesubError
from .geometry import TWO_PI, Angle, canon_angle
from .substitution import Patch

_PAIR_CHUNK = 2048
_DIFFRACTION_CHUNK = 8192

DEFAULT_INNER_RADIUS = 1e-6

DEFAULT_OCCUPANCY_FACTOR = 50


@dataclass(frozen=True)
class PointSet:
    """Points in the plane together with a radius R such that all lie in B_R(0)."""

    points: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise TilesubError("points must be an (n, 2) array")
        if not np.isfinite(pts).all():
            raise TilesubError("points must be finite")
        max_norm = float(np.hypot(pts[:, 0], pts[:, 1]).max()) if len(pts) else 0.0
        if self.radius < max_norm - 1e-12:
            raise TilesubError(
                f"declared radius {self.radius} smaller than max point norm {max_norm}")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, pts: np.ndarray) -> "PointSet":
        pts = np.asarray(pts, dtype=float)
        r = float(np.hypot(pts[:, 0], pts[:, 1]).max()) if len(pts) else 0.0
        return cls(pts, r)

    def __len__(self) -> int:
        return len(self.points)

    def rotated(self, beta: float) -> "PointSet":
        c, s = math.cos(beta), math.sin(beta)
        out = np.empty_like(self.points)
        out[:, 0] = c * self.points[:, 0] - s * self.points[:, 1]
        out[:, 1] = s * self.points[:, 0] + c * self.points[:, 1]
        return PointSet(out, self.radius)


def control_points(patch: Patch) -> PointSet:
    """Placed control points of a patch, one per tile."""
    if len(patch) == 0:
        raise TilesubError("empty patch has no control points")
    return PointSet.from_points(patch.control_xy())


def ball_window(ps: PointSet, center: tuple[float, float], radius: float) -> PointSet:
    """Re-centered circular window: points within `radius` of `center`, shifted
    so the window center becomes the origin and R equals the window radius.

    Cutting a window that lies inside the covered region of a patch removes
    the direction bias that the patch boundary would otherwise inject into
    pair statistics.
    """
    if radius <= 0:
        raise TilesubError("window radius must be positive")
    cx, cy = float(center[0]), float(center[1])
    shifted = ps.points - np.array([cx, cy])
    keep = np.hypot(shifted[:, 0], shifted[:, 1]) <= radius
    return PointSet(shifted[keep], float(radius))


def integer_lattice_ball(radius: float) -> PointSet:
    """Z^2 points in the closed ball of given radius; the crystalline baseline."""
    if radius <= 0:
        raise TilesubError("radius must be positive")
    n = int(math.floor(radius))
    ax = np.arange(-n, n + 1)
    gx, gy = np.meshgrid(ax, ax, indexing="ij")
    keep = gx * gx + gy * gy <= radius * radius
    pts = np.stack([gx[keep], gy[keep]], axis=1).astype(float)
    return PointSet(pts, float(radius))


# ---------------------------------------------------------------------------
# autocorrelation


@dataclass(frozen=True)
class PolarHistogram:
    """Difference-vector weights on a polar grid, normalized by the sampled area.

    weights[b, a] holds the (area-normalized) weight of difference vectors v
    with radial_edges[b] <= |v| < radial_edges[b+1] and angle in the a-th of A
    equal sectors.  raw_counts holds the un-normalized pair counts (each
    admitted ordered pair contributes 1, split between a bin and its
    antipode).  The zero vector is excluded; its mass (point density) is
    origin_mass.
    """

    radial_edges: np.ndarray
    angular_bins: int
    weights: np.ndarray
    raw_counts: np.ndarray
    origin_mass: float
    r_max: float
    n_left: int
    n_total: int
    norm_area: float

    def shell_count(self, b: int) -> float:
        return float(self.raw_counts[b].sum())


def autocorrelation(ps: PointSet, r_max: float, radial_bins: int = 10,
                    angular_bins: int = 24,
                    r_edges: np.ndarray | None = None) -> PolarHistogram:
    """Edge-corrected polar histogram of pair difference vectors.

    Ordered pairs (x, y) with 0 < |x - y| < r_max are admitted when the left
    point x lies in B_{R_eff}, R_eff = R - r_max; each admitted pair adds
    half a count at the bin of x - y and half at the antipodal bin, making
    the histogram antipodally symmetric at bin level by construction.
    Weights are counts divided by pi * R_eff^2.
    """
    if len(ps) == 0:
        raise TilesubError("empty point set")
    if r_max <= 0:
        raise TilesubError("r_max must be positive")
    if r_max > ps.radius / 2.0:
        raise TilesubError(
            f"r_max {r_max} exceeds half the source radius {ps.radius / 2.0}")
    if r_edges is None:
        if radial_bins < 1:
            raise TilesubError("radial_bins must be >= 1")
        edges = np.concatenate([[DEFAULT_INNER_RADIUS],
                                np.linspace(r_max / radial_bins, r_max, radial_bins)])
    else:
        edges = np.asarray(r_edges, dtype=float)
        if edges.ndim != 1 or len(edges) < 2 or (np.diff(edges) <= 0).any():
            raise TilesubError("r_edges must be strictly increasing with >= 2 entries")
        if edges[0] <= 0 or edges[-1] > r_max + 1e-12:
            raise TilesubError("r_edges must lie in (0, r_max]")
    if angular_bins < 1:
        raise TilesubError("angular_bins must be >= 1")
    A = int(angular_bins)
    B = len(edges) - 1
    r_eff = ps.radius - r_max
    if r_eff <= 0:
        raise TilesubError("effective radius is not positive")

    pts = ps.points
    norms = np.hypot(pts[:, 0], pts[:, 1])
    left_idx = np.flatnonzero(norms <= r_eff)
    tree = cKDTree(pts)
    sector = TWO_PI / A
    flat = np.zeros(B * A)
    half = A // 2 if A % 2 == 0 else None
    for start in range(0, len(left_idx), _PAIR_CHUNK):
        chunk = left_idx[start:start + _PAIR_CHUNK]
        neighbor_lists = tree.query_ball_point(pts[chunk], r_max)
        lefts = np.repeat(chunk, [len(nb) for nb in neighbor_lists])
        rights = np.concatenate([np.asarray(nb, dtype=np.int64) for nb in neighbor_lists]) \
            if len(lefts) else np.empty(0, dtype=np.int64)
        keep = lefts != rights
        v = pts[lefts[keep]] - pts[rights[keep]]
        r = np.hypot(v[:, 0], v[:, 1])
        b = np.searchsorted(edges, r, side="right") - 1
        ok = (b >= 0) & (b < B) & (r < r_max)
        v, b = v[ok], b[ok]
        theta = np.mod(np.arctan2(v[:, 1], v[:, 0]), TWO_PI)
        a = np.minimum((theta / sector).astype(np.int64), A - 1)
        idx = b * A + a
        flat += np.bincount(idx, minlength=B * A) * 0.5
        if half is not None:
            anti = b * A + (a + half) % A
        else:
            theta_a = np.mod(theta + math.pi, TWO_PI)
            anti = b * A + np.minimum((theta_a / sector).astype(np.int64), A - 1)
        flat += np.bincount(anti, minlength=B * A) * 0.5
    raw = flat.reshape(B, A)
    area = math.pi * r_eff * r_eff
    return PolarHistogram(
        radial_edges=edges,
        angular_bins=A,
        weights=raw / area,
        raw_counts=raw,
        origin_mass=len(left_idx) / area,
        r_max=float(r_max),
        n_left=int(len(left_idx)),
        n_total=len(ps),
        norm_area=area,
    )


@dataclass(frozen=True)
class SymmetryReport:
    """Per-shell angular statistics of a polar histogram.

    cv is the population coefficient of variation (std/mean) over the A
    angular bins of a shell; max_min_ratio is inf when a shell has an empty
    bin.  Shells with fewer than `occupancy_threshold` raw pair counts are
    excluded from the summary maximum.
    """

    shell_edges: np.ndarray
    means: np.ndarray
    cvs: np.ndarray
    max_min_ratios: np.ndarray
    shell_counts: np.ndarray
    qualifies: np.ndarray
    occupancy_threshold: float
    summary_max_cv: float


def circular_symmetry_stat(h: PolarHistogram,
                           occupancy_factor: float = DEFAULT_OCCUPANCY_FACTOR,
                           ) -> SymmetryReport:
    """Coefficient of variation over angular bins, per radial shell."""
    B, A = h.weights.shape
    means = h.weights.mean(axis=1)
    stds = h.weights.std(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cvs = np.where(means > 0, stds / np.where(means > 0, means, 1.0), 0.0)
        mins = h.weights.min(axis=1)
        maxs = h.weights.max(axis=1)
        ratios = np.where(mins > 0, maxs / np.where(mins > 0, mins, 1.0), np.inf)
        ratios = np.where(maxs == 0, 1.0, ratios)
    counts = h.raw_counts.sum(axis=1)
    threshold = occupancy_factor * A
    qualifies = counts >= threshold
    summary = float(cvs[qualifies].max()) if qualifies.any() else math.nan
    return SymmetryReport(
        shell_edges=h.radial_edges,
        means=means,
        cvs=cvs,
        max_min_ratios=ratios,
        shell_counts=counts,
        qualifies=qualifies,
        occupancy_threshold=float(threshold),
        summary_max_cv=summary,
    )


# ---------------------------------------------------------------------------
# diffraction


@dataclass(frozen=True)
class IntensityGrid:
    """Diffraction intensity I(k) = |sum_x exp(-2 pi i <k, x>)|^2 / N on a k-grid.

    values[i, j] is the intensity at k = (ks[i], ks[j]).  With an odd
    resolution the grid contains k = 0 exactly and I(0) = N.
    """

    ks: np.ndarray
    values: np.ndarray
    n_points: int
    k_max: float

    @property
    def resolution(self) -> int:
        return len(self.ks)


def _k_grid(k_max: float, resolution: int) -> np.ndarray:
    # built index-centered so that odd resolutions hit k = 0 exactly
    step = 2.0 * k_max / (resolution - 1)
    return (np.arange(resolution) - (resolution - 1) / 2.0) * step


def diffraction(ps: PointSet, k_max: float, resolution: int) -> IntensityGrid:
    """Direct exponential-sum estimator on a square k-grid (no FFT gridding).

    The sum separates over coordinates: S = Ax^T Ay with Ax[p, i] =
    exp(-2 pi i ks[i] x_p), evaluated in point chunks to bound memory.
    """
    if len(ps) == 0:
        raise TilesubError("empty point set")
    if resolution < 2:
        raise TilesubError("resolution must be >= 2")
    if k_max <= 0:
        raise TilesubError("k_max must be positive")
    ks = _k_grid(k_max, resolution)
    S = np.zeros((resolution, resolution), dtype=complex)
    pts = ps.points
    for start in range(0, len(pts), _DIFFRACTION_CHUNK):
        chunk = pts[start:start + _DIFFRACTION_CHUNK]
        ax = np.exp(-2j * math.pi * np.outer(chunk[:, 0], ks))
        ay = np.exp(-2j * math.pi * np.outer(chunk[:, 1], ks))
        S += ax.T @ ay
    values = (S.real * S.real + S.imag * S.imag) / len(ps)
    # |S| <= N for unit-modulus terms, so I <= N; roundoff at exact Bragg
    # peaks can overshoot by a few ulp and is clipped back to the bound.
    np.minimum(values, float(len(ps)), out=values)
    return IntensityGrid(ks=ks, values=values, n_points=len(ps), k_max=float(k_max))


def intensity_at(ps: PointSet, k_list: np.ndarray) -> np.ndarray:
    """I(k) at arbitrary sample wave vectors (same estimator as the grid)."""
    ks = np.asarray(k_list, dtype=float).reshape(-1, 2)
    phases = ps.points @ ks.T  # (n, nk)
    S = np.exp(-2j * math.pi * phases).sum(axis=0)
    vals = (S.real * S.real + S.imag * S.imag) / len(ps)
    return np.minimum(vals, float(len(ps)))


def rotation_covariance_check(ps: PointSet, beta: float | Angle,
                              k_list: np.ndarray) -> float:
    """Max relative gap |I_{R ps}(R k) - I_{ps}(k)| / max(I_{ps}(k), 1).

    The inner product <R k, R x> equals <k, x> analytically, so this must
    vanish up to floating-point rounding for any point set and rotation.
    """
    b = beta.radians if isinstance(beta, Angle) else canon_angle(float(beta))
    ks = np.asarray(k_list, dtype=float).reshape(-1, 2)
    c, s = math.cos(b), math.sin(b)
    rk = np.stack([c * ks[:, 0] - s * ks[:, 1], s * ks[:, 0] + c * ks[:, 1]], axis=1)
    base = intensity_at(ps, ks)
    rot = intensity_at(ps.rotated(b), rk)
    return float(np.max(np.abs(rot - base) / np.maximum(base, 1.0)))


@dataclass(frozen=True)
class RadialProfile:
    shell_edges: np.ndarray
    means: np.ndarray
    cvs: np.ndarray
    sample_counts: np.ndarray


def radial_profile(grid: IntensityGrid, shells: int, sectors: int = 12) -> RadialProfile:
    """Mean intensity and angular CV per |k| shell, origin cell excluded.

    Within each shell the grid samples are grouped into `sectors` equal
    angular sectors; the CV is std/mean over the sector means (sectors that
    receive no samples in a shell are skipped).
    """
    if shells < 1:
        raise TilesubError("shells must be >= 1")
    if sectors < 1:
        raise TilesubError("sectors must be >= 1")
    kx = grid.ks[:, None] * np.ones_like(grid.ks)[None, :]
    ky = np.ones_like(grid.ks)[:, None] * grid.ks[None, :]
    r = np.hypot(kx, ky).ravel()
    theta = np.mod(np.arctan2(ky, kx), TWO_PI).ravel()
    vals = grid.values.ravel()
    keep = (r > 0) & (r <= grid.k_max)
    r, theta, vals = r[keep], theta[keep], vals[keep]
    edges = np.linspace(0.0, grid.k_max, shells + 1)
    shell_idx = np.minimum(np.searchsorted(edges, r, side="right") - 1, shells - 1)
    sector_idx = np.minimum((theta / (TWO_PI / sectors)).astype(np.int64), sectors - 1)
    means = np.zeros(shells)
    cvs = np.full(shells, np.nan)
    counts = np.zeros(shells, dtype=np.int64)
    for b in range(shells):
        m = shell_idx == b
        counts[b] = int(m.sum())
        if counts[b] == 0:
            continue
        means[b] = float(vals[m].mean())
        sec_sums = np.bincount(sector_idx[m], weights=vals[m], minlength=sectors)
        sec_counts = np.bincount(sector_idx[m], minlength=sectors)
        occupied = sec_counts > 0
        sec_means = sec_sums[occupied] / sec_counts[occupied]
        mu = sec_means.mean()
        cvs[b] = float(sec_means.std() / mu) if mu > 0 else 0.0
    return RadialProfile(shell_edges=edges, means=means, cvs=cvs, sample_counts=counts)
