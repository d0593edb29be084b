import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tilesub import (circle_discrepancy, equidistribution_report,
                     hierarchical_sequence, orientation_histogram, weyl_sums)
from tilesub.geometry import canon_angle, circular_distance

TWO_PI = 2.0 * math.pi


def brute_discrepancy(angles: np.ndarray) -> float:
    """Circular star discrepancy over arcs anchored at sample points.

    The supremum over all arcs is attained with endpoints at sample points
    (approached from either side), so scanning closed and open arcs over all
    value pairs is exact.  Membership is counted explicitly, which keeps tied
    values honest.  O(n^3): oracle-only.
    """
    u = np.mod(np.asarray(angles, dtype=float) / TWO_PI, 1.0)
    n = len(u)

    def count(a, b, closed):
        if closed:
            if a <= b:
                return int(((u >= a) & (u <= b)).sum())
            return int(((u >= a) | (u <= b)).sum())
        if a == b:
            return 0
        if a < b:
            return int(((u > a) & (u < b)).sum())
        return int(((u > a) | (u < b)).sum())

    worst = 0.0
    for a in u:
        for b in u:
            length = (b - a) % 1.0
            worst = max(worst,
                        abs(count(a, b, True) / n - length),
                        abs(count(a, b, False) / n - length))
    return min(worst, 1.0)


# ---------------------------------------------------------------------------
# discrepancy


def test_equally_spaced_eight():
    angles = np.arange(8) * TWO_PI / 8
    assert circle_discrepancy(angles) == pytest.approx(0.125, abs=1e-15)


def test_single_point_mass():
    assert circle_discrepancy(np.zeros(1)) == 1.0
    assert circle_discrepancy(np.full(50, 1.3)) >= 0.99


def test_discrepancy_matches_brute_force():
    rng = np.random.default_rng(101)
    for n in (2, 3, 7, 20, 61):
        angles = rng.uniform(0, TWO_PI, size=n)
        assert circle_discrepancy(angles) == pytest.approx(
            brute_discrepancy(angles), abs=1e-12)
    # clustered inputs stress the tie handling
    lumpy = np.concatenate([np.full(5, 0.4), rng.uniform(0, TWO_PI, 10)])
    assert circle_discrepancy(lumpy) == pytest.approx(
        brute_discrepancy(lumpy), abs=1e-12)


@given(st.floats(-10.0, 10.0, allow_nan=False))
def test_discrepancy_rotation_invariant(beta):
    rng = np.random.default_rng(7)
    angles = rng.uniform(0, TWO_PI, size=40)
    base = circle_discrepancy(angles)
    rotated = circle_discrepancy(np.mod(angles + beta, TWO_PI))
    assert rotated == pytest.approx(base, abs=1e-12)


@given(st.integers(1, 200))
def test_discrepancy_bounds(n):
    rng = np.random.default_rng(n)
    angles = rng.uniform(0, TWO_PI, size=n)
    d = circle_discrepancy(angles)
    assert 1.0 / (2.0 * n) <= d <= 1.0


# ---------------------------------------------------------------------------
# Weyl sums


def test_weyl_sums_equally_spaced():
    angles = np.arange(8) * TWO_PI / 8
    w = weyl_sums(angles, 4)
    assert w.shape == (4,)
    assert np.abs(w).max() < 1e-14


def test_weyl_sums_resonance():
    angles = np.arange(3) * TWO_PI / 3 + 0.2
    w = weyl_sums(angles, 3)
    assert abs(w[0]) < 1e-14
    assert abs(w[1]) < 1e-14
    assert w[2] == pytest.approx(1.0, abs=1e-14)


def test_weyl_sums_point_mass():
    w = weyl_sums(np.full(10, 0.77), 4)
    assert np.abs(w - 1.0).max() < 1e-12


def test_weyl_sums_match_direct_formula():
    rng = np.random.default_rng(19)
    angles = rng.uniform(0, TWO_PI, size=100)
    w = weyl_sums(angles, 4)
    for m in range(1, 5):
        re = np.cos(m * angles).mean()
        im = np.sin(m * angles).mean()
        assert w[m - 1] == pytest.approx(math.hypot(re, im), abs=1e-13)


# ---------------------------------------------------------------------------
# hierarchical sequences


def test_marks_and_seeds(pinwheel, chair):
    seq = hierarchical_sequence(pinwheel, 0, 3)
    assert seq.marks == (1, 5, 25, 125)
    assert len(seq.angles) == 125
    assert seq.mark_seeds[-1] == 0
    seq = hierarchical_sequence(chair, 0, 4)
    assert seq.marks == (1, 4, 16, 64, 256)
    assert seq.mark_seeds == (0, 0, 0, 0, 0)


def test_prefix_is_rotated_smaller_supertile(pinwheel):
    from tilesub import supertile
    seq = hierarchical_sequence(pinwheel, 0, 4)
    for j, mark in enumerate(seq.marks):
        small = supertile(pinwheel, seq.mark_seeds[j], j)
        prefix = seq.angles[:mark]
        beta = canon_angle(float(prefix[0]) - float(small.angles[0]))
        gaps = [circular_distance(float(p), canon_angle(float(a) + beta))
                for p, a in zip(prefix, small.angles)]
        assert max(gaps) < 1e-9


def test_sequence_statistics_are_rotation_invariant(pinwheel):
    seq = hierarchical_sequence(pinwheel, 0, 4)
    shifted = np.mod(seq.angles + 1.234, TWO_PI)
    assert circle_discrepancy(shifted) == pytest.approx(
        circle_discrepancy(seq.angles), abs=1e-12)
    assert np.abs(weyl_sums(shifted, 4) - weyl_sums(seq.angles, 4)).max() < 1e-12


# ---------------------------------------------------------------------------
# report


def test_equidistribution_report(pinwheel):
    seq = hierarchical_sequence(pinwheel, 0, 3)
    report = equidistribution_report(seq.angles, m_max=4, bins=36)
    assert report.n == 125
    assert len(report.weyl) == 4
    assert sum(report.histogram) == 125
    assert 0.0 < report.discrepancy <= 1.0


def test_histogram_covers_circle():
    angles = np.array([0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
    h = orientation_histogram(angles, bins=4)
    assert h.tolist() == [1, 1, 1, 1]
