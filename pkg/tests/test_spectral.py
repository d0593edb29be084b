import math

import numpy as np
import pytest

from tilesub import (PointSet, TilesubError, autocorrelation, ball_window,
                     circular_symmetry_stat, control_points, diffraction,
                     integer_lattice_ball, intensity_at, radial_profile,
                     rotation_covariance_check, supertile)


# ---------------------------------------------------------------------------
# point sets


def test_pointset_validates_radius():
    with pytest.raises(TilesubError):
        PointSet(np.array([[3.0, 4.0]]), radius=4.0)
    ps = PointSet.from_points(np.array([[3.0, 4.0]]))
    assert ps.radius >= 5.0


def test_pointset_rotation_preserves_norms():
    ps = integer_lattice_ball(5.0)
    rot = ps.rotated(0.73)
    assert rot.radius == ps.radius
    assert np.allclose(np.hypot(*rot.points.T), np.hypot(*ps.points.T))


def test_lattice_ball_count():
    # Gauss circle: |Z^2 cap B_5| = 81
    assert len(integer_lattice_ball(5.0).points) == 81


def test_ball_window_recenters():
    ps = integer_lattice_ball(10.0)
    win = ball_window(ps, (0.5, 0.5), 2.0)
    norms = np.hypot(*win.points.T)
    assert win.radius == 2.0
    assert norms.max() <= 2.0
    brute = sum(1 for x, y in ps.points
                if math.hypot(x - 0.5, y - 0.5) <= 2.0)
    assert len(win.points) == brute


def test_control_points_matches_patch(chair):
    patch = supertile(chair, 0, 3)
    ps = control_points(patch)
    assert ps.points.shape == (64, 2)
    assert np.array_equal(ps.points, patch.control_xy())


# ---------------------------------------------------------------------------
# autocorrelation


def test_autocorr_requires_small_r_max():
    ps = integer_lattice_ball(4.0)
    with pytest.raises(TilesubError):
        autocorrelation(ps, r_max=3.0)  # r_max > R/2


def test_autocorr_rejects_bad_edges():
    ps = integer_lattice_ball(10.0)
    with pytest.raises(TilesubError):
        autocorrelation(ps, 4.0, r_edges=np.array([2.0, 1.0]))
    with pytest.raises(TilesubError):
        autocorrelation(ps, 4.0, r_edges=np.array([1.0, 5.0]))


def test_autocorr_shapes_and_normalization():
    ps = integer_lattice_ball(12.0)
    h = autocorrelation(ps, 3.0, radial_bins=6, angular_bins=8)
    assert h.weights.shape == (6, 8)
    assert h.radial_edges.shape == (7,)
    assert h.radial_edges[0] == pytest.approx(1e-6)
    r_eff = 12.0 - 3.0
    assert h.norm_area == pytest.approx(math.pi * r_eff * r_eff, rel=1e-12)
    assert h.origin_mass == pytest.approx(h.n_left / h.norm_area, rel=1e-12)
    assert np.array_equal(h.weights, h.raw_counts / h.norm_area)


def test_autocorr_mass_matches_brute_force():
    ps = integer_lattice_ball(12.0)
    h = autocorrelation(ps, 3.0, radial_bins=6, angular_bins=8)
    pts = ps.points
    r_eff = 12.0 - 3.0
    lefts = np.hypot(*pts.T) <= r_eff
    d = np.hypot(pts[:, None, 0] - pts[None, :, 0],
                 pts[:, None, 1] - pts[None, :, 1])
    admitted = lefts[:, None] & (d > 1e-6) & (d < 3.0)
    assert h.raw_counts.sum() == float(admitted.sum())


def test_autocorr_antipodal_bins_exactly_equal(pinwheel):
    for ps in (integer_lattice_ball(15.0),
               control_points(supertile(pinwheel, 0, 5))):
        h = autocorrelation(ps, 4.0, radial_bins=5, angular_bins=12)
        rolled = np.roll(h.weights, 6, axis=1)
        assert np.array_equal(h.weights, rolled)


def test_lattice_unit_shell_hits_four_axes():
    # difference vectors of length ~1 in Z^2 point only along the axes, so
    # with 8 sectors exactly the even bins fill, all equally
    ps = integer_lattice_ball(50.0)
    h = autocorrelation(ps, 2.0, angular_bins=8, r_edges=np.array([0.9, 1.1]))
    w = h.weights[0]
    assert (w[1::2] == 0.0).all()
    assert w[0] > 0
    assert np.ptp(w[0::2]) == 0.0


def test_symmetry_stat_flat_histogram_has_zero_cv():
    ps = integer_lattice_ball(50.0)
    h = autocorrelation(ps, 2.0, angular_bins=8, r_edges=np.array([0.9, 1.1]))
    flat = h.weights.copy()
    flat[:] = 1.0
    flat_hist = type(h)(radial_edges=h.radial_edges, angular_bins=8,
                        weights=flat, raw_counts=np.full_like(flat, 1000.0),
                        origin_mass=h.origin_mass, r_max=h.r_max,
                        n_left=h.n_left, n_total=h.n_total,
                        norm_area=h.norm_area)
    report = circular_symmetry_stat(flat_hist)
    assert report.cvs.max() == 0.0
    assert report.qualifies.all()
    assert report.summary_max_cv == 0.0


def test_symmetry_stat_occupancy_filter():
    ps = integer_lattice_ball(30.0)
    h = autocorrelation(ps, 4.0, radial_bins=4, angular_bins=8)
    strict = circular_symmetry_stat(h, occupancy_factor=1e12)
    assert not strict.qualifies.any()
    assert math.isnan(strict.summary_max_cv)


def test_pinwheel_more_symmetric_than_lattice(pinwheel):
    # small-scale version of the headline comparison: equal-count windows,
    # same shells, pinwheel pair directions spread far more evenly
    patch = supertile(pinwheel, 0, 5)
    s5 = math.sqrt(5.0)
    den = 3.0 + s5
    scale = s5 ** 5
    win = ball_window(control_points(patch),
                      ((2 * s5 + 4) / den * scale, 2 / den * scale),
                      (3.0 - s5) / 2.0 * scale)
    lattice = integer_lattice_ball(math.sqrt(len(win.points) / math.pi))
    edges = np.array([2.0, 6.0, 10.0])
    pin_rep = circular_symmetry_stat(
        autocorrelation(win, 10.0, angular_bins=24, r_edges=edges))
    lat_rep = circular_symmetry_stat(
        autocorrelation(lattice, 10.0, angular_bins=24, r_edges=edges))
    assert pin_rep.qualifies.all() and lat_rep.qualifies.all()
    assert lat_rep.summary_max_cv > 3.0 * pin_rep.summary_max_cv


# ---------------------------------------------------------------------------
# diffraction


def test_diffraction_validations():
    ps = integer_lattice_ball(5.0)
    with pytest.raises(TilesubError):
        diffraction(ps, k_max=0.0, resolution=11)
    with pytest.raises(TilesubError):
        diffraction(ps, k_max=1.0, resolution=1)


def test_intensity_grid_origin_exact():
    ps = integer_lattice_ball(9.0)
    n = len(ps.points)
    grid = diffraction(ps, k_max=1.5, resolution=21)
    c = 10
    assert grid.ks[c] == 0.0
    assert grid.values[c, c] == float(n)
    assert grid.values.max() <= float(n)


def test_even_resolution_misses_origin():
    ps = integer_lattice_ball(5.0)
    grid = diffraction(ps, k_max=1.0, resolution=10)
    assert (grid.ks != 0.0).all()


def test_lattice_bragg_peak():
    ps = integer_lattice_ball(20.0)
    n = len(ps.points)
    got = intensity_at(ps, np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]]))
    assert np.abs(got - n).max() < 1e-6 * n
    diffuse = intensity_at(ps, np.array([[0.5, 0.5]]))
    assert diffuse[0] < 0.01 * n


def test_grid_matches_pointwise_estimator(chair):
    # two routes to the same sum: chunked separable grid vs direct per-k
    patch = supertile(chair, 0, 4)
    ps = control_points(patch)
    grid = diffraction(ps, k_max=1.3, resolution=7)
    klist = [(grid.ks[i], grid.ks[j]) for i in range(7) for j in range(7)]
    direct = intensity_at(ps, np.array(klist)).reshape(7, 7)
    assert np.abs(grid.values - direct).max() < 1e-9 * len(ps.points)


def test_single_point_flat_intensity():
    ps = PointSet(np.array([[0.25, -0.125]]), radius=1.0)
    got = intensity_at(ps, np.array([[0.0, 0.0], [0.7, 0.3], [10.0, -4.0]]))
    assert np.abs(got - 1.0).max() < 1e-12


def test_rotation_covariance(pinwheel):
    rng = np.random.default_rng(5)
    ks = rng.uniform(-2.0, 2.0, size=(50, 2))
    patch = supertile(pinwheel, 0, 4)
    dev = rotation_covariance_check(control_points(patch), 0.31, ks)
    assert dev < 1e-9
    dev = rotation_covariance_check(integer_lattice_ball(20.0), 1.1, ks)
    assert dev < 1e-9


def test_origin_dominates_strictly_off_peak(pinwheel):
    # away from the central peak the finite pinwheel spectrum stays diffuse:
    # at |k| > 0.2 nothing reaches half the origin intensity
    ps = control_points(supertile(pinwheel, 0, 6))
    n = len(ps.points)
    grid = diffraction(ps, k_max=3.0, resolution=81)
    kx, ky = np.meshgrid(grid.ks, grid.ks, indexing="ij")
    off = np.hypot(kx, ky) > 0.2
    assert grid.values[off].max() < 0.5 * n


def test_radial_profile_flat_for_single_point():
    ps = PointSet(np.array([[0.25, -0.125]]), radius=1.0)
    grid = diffraction(ps, k_max=2.0, resolution=21)
    prof = radial_profile(grid, shells=4)
    assert np.abs(prof.means - 1.0).max() < 1e-12
    assert prof.cvs.max() < 1e-12
