import math

import numpy as np
import pytest

import minkhill as mk
from minkhill.profiles import boundary_derivs, boundary_point


def test_lp_rejects_bad_exponent():
    with pytest.raises(mk.ProfileError):
        mk.LpProfile(1.0)
    with pytest.raises(mk.ProfileError):
        mk.LpProfile(0.8)


def test_ellipse_rejects_bad_axes():
    with pytest.raises(mk.ProfileError):
        mk.EllipseProfile(-1.0, 2.0)
    with pytest.raises(mk.ProfileError):
        mk.EllipseProfile(2.0, 0.0)


def test_fourier_requires_even_positive_frequencies():
    with pytest.raises(mk.ProfileError):
        mk.RadialFourierProfile(1.0, [(3, 0.1, 0.0)])
    with pytest.raises(mk.ProfileError):
        mk.RadialFourierProfile(1.0, [(2, 1.5, 0.0)])   # radial goes negative


@pytest.mark.parametrize("make", [
    lambda: mk.LpProfile(3.0),
    lambda: mk.LpProfile(1.5),
    lambda: mk.EllipseProfile(2.0, 0.5),
    lambda: mk.RadialFourierProfile(1.0, [(2, 0.1, 0.0), (4, 0.02, 0.0)]),
    lambda: mk.RadonGluedProfile(3.0),
])
def test_radial_derivatives_match_finite_differences(make):
    prof = make()
    theta = np.linspace(0.15, 1.4, 9)
    r, r1, r2, r3 = prof.radial(theta, order=3)
    h = 1e-5
    for k, vals in ((1, r1), (2, r2), (3, r3)):
        lo = prof.radial(theta - h, order=3)[k - 1]
        hi = prof.radial(theta + h, order=3)[k - 1]
        fd = (hi - lo) / (2 * h)
        assert np.max(np.abs(fd - vals)) < 2e-6 * max(1.0, np.max(np.abs(vals)))


def test_gauge_gradient_matches_finite_differences(lp3):
    pts = np.array([[0.4, 0.9], [-1.2, 0.3], [0.5, -0.5]])
    grad = lp3.gauge_grad(pts)
    h = 1e-6
    for ax in range(2):
        e = np.zeros(2)
        e[ax] = h
        fd = (lp3.gauge(pts + e) - lp3.gauge(pts - e)) / (2 * h)
        assert np.max(np.abs(fd - grad[:, ax])) < 1e-8


def test_boundary_points_have_gauge_one(lp3, glued3, fourier):
    theta = np.linspace(0, 2 * math.pi, 257)[:-1]
    for prof in (lp3, glued3, fourier):
        pts = boundary_point(prof, theta)
        assert np.max(np.abs(prof.gauge(pts) - 1.0)) < 1e-12


def test_validate_profile_passes_smooth_cases(euclid, lp3, ellipse, glued3):
    for prof in (euclid, lp3, ellipse, glued3):
        rep = mk.validate_profile(prof)
        assert rep.ok, rep.messages


def test_validate_profile_flags_nonconvex_fourier():
    prof = mk.RadialFourierProfile(1.0, [(2, 0.6, 0.0)])
    rep = mk.validate_profile(prof)
    assert not rep.strictly_convex
    assert rep.min_convexity < 0


def test_central_symmetry_sampled(glued3):
    theta = np.linspace(0, math.pi, 200)
    assert np.max(np.abs(glued3.radial(theta) - glued3.radial(theta + math.pi))) < 1e-14


def test_boundary_derivative_consistency(ellipse):
    theta = np.linspace(0.1, 2.0, 7)
    p0, p1 = boundary_derivs(ellipse, theta, order=1)
    h = 1e-6
    fd = (boundary_point(ellipse, theta + h) - boundary_point(ellipse, theta - h)) / (2 * h)
    assert np.max(np.abs(fd - p1)) < 1e-8
