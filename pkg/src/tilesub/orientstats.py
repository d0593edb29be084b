"""Orientation sequences in hierarchical order and equidistribution diagnostics.

The tiles of a depth-k supertile, enumerated depth-first with children in rule
order, have the property that for every j <= k some prefix is a complete
depth-j supertile.  Discrepancy and Weyl sums measured along those prefixes
quantify how evenly the orientations fill the circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TilesubError
from .geometry import TWO_PI, canon_angle_array
from .substitution import (
    DEFAULT_TILE_CAP,
    Patch,
    SubstitutionRule,
    predicted_tile_count,
    supertile,
)


@dataclass(frozen=True)
class OrientationSequence:
    """Tile orientations of a supertile in depth-first order, with prefix marks.

    marks[j] is the length of the prefix forming a complete depth-j supertile;
    mark_seeds[j] is the prototile that supertile is built from (the depth-j
    node of the leftmost descent chain).  The final mark is the full length.
    """

    angles: np.ndarray
    marks: tuple[int, ...]
    mark_seeds: tuple[int, ...]
    rule_name: str
    seed: int
    depth: int

    def __post_init__(self) -> None:
        if len(self.marks) != self.depth + 1:
            raise TilesubError("expected one prefix mark per depth 0..k")
        if self.marks[-1] != len(self.angles):
            raise TilesubError("last mark must cover the whole sequence")
        if any(a >= b for a, b in zip(self.marks, self.marks[1:])):
            raise TilesubError("marks must be strictly increasing")


def hierarchical_sequence(rule: SubstitutionRule, i: int, k: int,
                          cap: int = DEFAULT_TILE_CAP) -> OrientationSequence:
    """Orientation sequence of the depth-k supertile of prototile i.

    Repeated whole-patch substitution emits tiles in exactly the depth-first
    order (each tile's children stay contiguous and in rule order), so the
    supertile's angle array needs no reordering.  The prefix of length
    1^T M^j e_c is the depth-j supertile of the leftmost descent prototile c.
    """
    patch = supertile(rule, i, k, cap=cap)
    chain = [i]
    for _ in range(k):
        chain.append(rule.children[chain[-1]][0].prototile_id)
    # chain[0] = root prototile at depth k ... chain[k] = leftmost leaf
    seeds = tuple(reversed(chain))  # seeds[j] = prototile of the depth-j prefix
    marks = tuple(predicted_tile_count(rule, seeds[j], j) for j in range(k + 1))
    return OrientationSequence(patch.angles, marks, seeds, rule.name, i, k)


def circle_discrepancy(angles: np.ndarray) -> float:
    """Sup over circular arcs [x, y) of |empirical share - normalized arc length|.

    Exact closed form on the sorted sample: writing u_j for the sorted angles
    divided by 2*pi (j = 0..n-1), the largest excess of count over length is
    max_j((j+1)/n - u_j) + max_j(u_j - j/n) and the largest deficit is
    max_j(u_j - j/n) - min_j(u_j - j/n) + 1/n; the discrepancy is the larger
    of the two.  O(n log n), exact for every n (ties included, where the sup
    is approached by arcs shrinking onto the tied value).
    """
    a = np.asarray(angles, dtype=float)
    if a.ndim != 1 or len(a) == 0:
        raise TilesubError("discrepancy needs a nonempty 1-d angle array")
    n = len(a)
    u = np.sort(canon_angle_array(a.copy())) / TWO_PI
    j = np.arange(n, dtype=float)
    p = u - j / n
    excess = float(((j + 1.0) / n - u).max() + p.max())
    deficit = float(p.max() - p.min() + 1.0 / n)
    return min(max(excess, deficit), 1.0)


def weyl_sums(angles: np.ndarray, m_max: int) -> np.ndarray:
    """|W_m| = |(1/n) sum_j exp(i m a_j)| for m = 1..m_max."""
    a = np.asarray(angles, dtype=float)
    if a.ndim != 1 or len(a) == 0:
        raise TilesubError("Weyl sums need a nonempty 1-d angle array")
    if m_max < 1:
        raise TilesubError("m_max must be >= 1")
    ms = np.arange(1, m_max + 1, dtype=float)
    # sum per harmonic without materializing the (m_max, n) outer product
    out = np.empty(m_max)
    for idx, m in enumerate(ms):
        out[idx] = abs(np.exp(1j * m * a).mean())
    return out


def orientation_histogram(angles: np.ndarray, bins: int) -> np.ndarray:
    """Counts over `bins` equal-width angular bins covering [0, 2*pi)."""
    if bins < 1:
        raise TilesubError("bins must be >= 1")
    a = canon_angle_array(np.asarray(angles, dtype=float).copy())
    counts, _ = np.histogram(a, bins=bins, range=(0.0, TWO_PI))
    return counts


@dataclass(frozen=True)
class EquidistributionReport:
    n: int
    discrepancy: float
    weyl: tuple[float, ...]
    histogram: tuple[int, ...]


def equidistribution_report(angles: np.ndarray, m_max: int = 4,
                            bins: int = 36) -> EquidistributionReport:
    a = np.asarray(angles, dtype=float)
    return EquidistributionReport(
        n=len(a),
        discrepancy=circle_discrepancy(a),
        weyl=tuple(float(w) for w in weyl_sums(a, m_max)),
        histogram=tuple(int(c) for c in orientation_histogram(a, bins)),
    )
