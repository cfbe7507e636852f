import math

import numpy as np
import pytest

import minkhill as mk
from minkhill.engine import geometry_for
from minkhill.profiles import TWO_PI, boundary_point


def test_boundary_curve_euclid_axis_points(euclid):
    bc = mk.boundary_curve(euclid, 4)
    assert np.allclose(bc.points, [(1, 0), (0, 1), (-1, 0), (0, -1)], atol=1e-15)


def test_boundary_curve_gauge_one(lp3):
    bc = mk.boundary_curve(lp3, 512)
    assert np.max(np.abs(lp3.gauge(bc.points) - 1.0)) < 1e-10


def test_boundary_curve_ellipse_start(ellipse):
    bc = mk.boundary_curve(ellipse, 256)
    assert np.allclose(bc.points[0], (2.0, 0.0), atol=1e-14)


def test_boundary_curve_rejects_invalid():
    bad = mk.RadialFourierProfile(1.0, [(2, 0.6, 0.0)])
    with pytest.raises(ValueError):
        mk.boundary_curve(bad)


def test_circle_length_euclid(euclid):
    L = mk.circle_length(euclid)
    assert abs(L.length - TWO_PI) < 1e-12
    assert abs(L.half - math.pi) < 1e-12


def test_circle_length_ellipse_is_euclidean(ellipse):
    # self-circumference is invariant under linear images of the disc
    assert abs(mk.circle_length(ellipse).length - TWO_PI) < 1e-8


@pytest.mark.parametrize("prof_name", ["lp3", "lp15", "lp5", "fourier", "glued3"])
def test_circle_length_classical_bounds(prof_name, request):
    prof = request.getfixturevalue(prof_name)
    L = mk.circle_length(prof).length
    assert 6.0 < L < 8.0


def test_circle_length_matches_quadrature_oracle(lp3):
    # Richardson-extrapolated trapezoid of the speed over a dense grid
    def total(n):
        theta = np.linspace(0, TWO_PI, n + 1)
        from minkhill.profiles import boundary_derivs
        sp = lp3.gauge(boundary_derivs(lp3, theta, order=1)[1])
        return np.trapezoid(sp, theta)

    t1, t2 = total(1 << 15), total(1 << 16)
    oracle = (4 * t2 - t1) / 3
    assert abs(mk.circle_length(lp3).length - oracle) < 1e-7


def test_arclength_param_euclid_identity(euclid):
    bc = mk.boundary_curve(euclid, 512)
    al = mk.arclength_param(bc, euclid, n=512)
    assert abs(al.period - TWO_PI) < 1e-8
    assert np.max(np.abs(al.points - bc.points)) < 1e-7


def test_arclength_param_unit_speed(lp3):
    bc = mk.boundary_curve(lp3, 2048)
    al = mk.arclength_param(bc, lp3, n=1024)
    speeds = lp3.gauge(al.derivs())
    assert np.max(np.abs(speeds - 1.0)) < 1e-8
    assert abs(al.period - mk.circle_length(lp3).length) < 1e-6


def test_dual_param_euclid(euclid, form):
    geo = geometry_for(euclid, form)
    sl = geo.sl_arrays(512)
    phi = mk.ClosedCurve(period=sl["period"], grid=sl["tau"], points=sl["phi"],
                         deriv_samples=sl["dphi"])
    psi = mk.dual_param(phi, form)
    t = sl["tau"]
    expect = np.stack([-np.sin(t), np.cos(t)], axis=-1)
    assert np.max(np.abs(psi.points - expect)) < 1e-12


def test_dual_param_radon_traces_unit_circle(glued3):
    cal = mk.calibrate_radon_scale(glued3)
    geo = geometry_for(glued3, cal.form)
    sl = geo.sl_arrays(1024)
    phi = mk.ClosedCurve(period=sl["period"], grid=sl["tau"], points=sl["phi"],
                         deriv_samples=sl["dphi"])
    psi = mk.dual_param(phi, cal.form)
    assert np.max(np.abs(glued3.gauge(psi.points) - 1.0)) < 1e-6


def test_dual_param_lands_on_anticircle(lp3, form):
    geo = geometry_for(lp3, form)
    sl = geo.sl_arrays(512)
    phi = mk.ClosedCurve(period=sl["period"], grid=sl["tau"], points=sl["phi"],
                         deriv_samples=sl["dphi"])
    psi = mk.dual_param(phi, form)
    anti = mk.antinorm(lp3, form, psi.points)
    assert np.max(np.abs(anti - 1.0)) < 1e-6


def test_dual_param_postcondition_omega_psi(lp3, form):
    # omega(psi, psi') = |psi'| in the norm, away from degenerate params
    geo = geometry_for(lp3, form)
    sl = geo.sl_arrays(1024)
    psi = mk.ClosedCurve(period=sl["period"], grid=sl["tau"], points=sl["psi"])
    dpsi = psi.derivs()
    w = form(psi.points, dpsi)
    norms = lp3.gauge(dpsi)
    assert np.max(np.abs(w - norms)) < 1e-6


def test_dual_of_dual_returns_circle_up_to_sign(lp3, form):
    # the anti-circle of lp3 is the conjugate-exponent circle (Holder);
    # run the dual construction in that plane and land back on -dB
    anti = mk.LpProfile(1.5)
    bc = mk.boundary_curve(anti, 4096)
    al = mk.arclength_param(bc, anti, n=2048)
    dd = mk.dual_param(al, form)
    pts = -dd.points
    assert np.max(np.abs(lp3.gauge(pts) - 1.0)) < 1e-5
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    assert np.max(np.hypot(*(pts - boundary_point(lp3, theta)).T)) < 1e-5


def test_antinorm_arclength_param_invariants(lp3, form):
    anti = mk.antinorm_arclength_param(lp3, form, n=2048)
    assert np.max(np.abs(lp3.gauge(anti.derivs()) - 1.0)) < 1e-8
    w = form(anti.points, anti.derivs())
    assert np.max(np.abs(w - 1.0)) < 1e-10
    half = len(anti.grid) // 2
    sym = np.max(np.hypot(*(anti.points[:half] + anti.points[half:]).T))
    assert sym < 1e-8


def test_antinorm_arclength_span_is_twice_area(lp3, euclid, form):
    for prof, tol in ((euclid, 1e-9), (lp3, 1e-6)):
        geo = geometry_for(prof, form)
        n = 1 << 17
        theta = np.arange(n) * (TWO_PI / n)
        pts = geo.psi_point(geo._clamp(theta))
        x, y = pts[:, 0], pts[:, 1]
        area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        assert abs(geo.anti_length - 2 * area) < tol


def test_euclid_anti_param_is_unit_circle(euclid, form):
    anti = mk.antinorm_arclength_param(euclid, form, n=256)
    t = anti.grid
    assert abs(anti.period - TWO_PI) < 1e-12
    expect = np.stack([np.cos(t), np.sin(t)], axis=-1)
    assert np.max(np.abs(anti.points - expect)) < 1e-12


def test_radius_of_curvature_examples(euclid, form):
    geo = geometry_for(euclid, form)
    sl = geo.sl_arrays(512)
    phi = mk.ClosedCurve(period=sl["period"], grid=sl["tau"], points=sl["phi"],
                         deriv_samples=sl["dphi"])
    rho = mk.radius_of_curvature(phi, phi, form)
    assert np.max(np.abs(rho.values - 1.0)) < 1e-12
    double = mk.ClosedCurve(period=phi.period, grid=phi.grid, points=2 * phi.points,
                            deriv_samples=2 * phi.deriv_samples)
    rho2 = mk.radius_of_curvature(double, phi, form)
    assert np.max(np.abs(rho2.values - 2.0)) < 1e-12
    moved = mk.ClosedCurve(period=phi.period, grid=phi.grid,
                           points=phi.points + np.array([5.0, 0.0]),
                           deriv_samples=phi.deriv_samples)
    rho3 = mk.radius_of_curvature(moved, phi, form)
    assert np.max(np.abs(rho3.values - 1.0)) < 1e-12


def test_radius_of_curvature_rejects_mismatch(euclid, form):
    geo = geometry_for(euclid, form)
    sl = geo.sl_arrays(256)
    phi = mk.ClosedCurve(period=sl["period"], grid=sl["tau"], points=sl["phi"],
                         deriv_samples=sl["dphi"])
    rotated = mk.ClosedCurve(period=phi.period, grid=phi.grid,
                             points=phi.points[:, ::-1].copy())
    with pytest.raises(mk.curves.ParametrizationMismatch):
        mk.radius_of_curvature(rotated, phi, form)


def test_minkowski_curvature_euclid(euclid, form):
    km = mk.minkowski_curvature_antinorm(euclid, form, n=1024)
    assert np.max(np.abs(km.values - 1.0)) < 1e-9


def test_minkowski_curvature_ellipse_inverse_is_one(ellipse, form):
    km = mk.minkowski_curvature_antinorm(ellipse, form, n=1024)
    assert np.max(np.abs(1.0 / km.values - 1.0)) < 1e-4


def test_minkowski_curvature_lp3_matches_hill(lp3, form):
    km = mk.minkowski_curvature_antinorm(lp3, form, n=2048)
    coef = mk.hill_from_geometry(lp3, form, n=2048)
    assert np.max(np.abs(coef.f.values * km.values - 1.0)) < 1e-4


def test_scalar_periodic_interpolation():
    grid = np.arange(64) * (TWO_PI / 64)
    sp = mk.ScalarPeriodic(TWO_PI, grid, np.sin(grid))
    q = np.linspace(0, TWO_PI, 997)
    assert np.max(np.abs(sp(q) - np.sin(q))) < 1e-6
    assert np.max(np.abs(sp(q, 1) - np.cos(q))) < 1e-4


def test_closed_curve_csv_roundtrip(tmp_path, euclid):
    bc = mk.boundary_curve(euclid, 64)
    path = tmp_path / "curve.csv"
    bc.to_csv(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (64, 3)
    assert np.max(np.abs(data[:, 1:] - bc.points)) < 1e-16
