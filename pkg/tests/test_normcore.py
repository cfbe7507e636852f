import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import minkhill as mk
from minkhill.curves import antinorm_arclength_param
from minkhill.profiles import TWO_PI, boundary_point

from conftest import random_nonzero


def test_gauge_examples(euclid, lp15, fourier):
    assert math.isclose(mk.gauge(euclid, (3.0, 4.0)), 5.0, rel_tol=1e-14)
    assert math.isclose(mk.gauge(lp15, (1.0, 1.0)), 2 ** (2.0 / 3.0), rel_tol=1e-13)
    theta = np.linspace(0, TWO_PI, 64, endpoint=False)
    pts = boundary_point(fourier, theta)
    assert np.max(np.abs(fourier.gauge(pts) - 1.0)) < 1e-12


def test_antinorm_euclidean(euclid, form):
    assert math.isclose(mk.antinorm(euclid, form, (3.0, 4.0)), 5.0, rel_tol=1e-10)
    assert mk.antinorm(euclid, form, (0.0, 0.0)) == 0.0


def test_antinorm_lp3_matches_brute_force_holder(lp3, form):
    # sup det((1,1), y) over the lp3 circle equals the conjugate-exponent
    # norm of (-1, 1); confirm against a dense brute-force maximization
    v = np.array([1.0, 1.0])
    val = mk.antinorm(lp3, form, v)
    expect = (1.0 + 1.0) ** (2.0 / 3.0)
    theta = np.linspace(0, TWO_PI, 1_000_000, endpoint=False)
    pts = boundary_point(lp3, theta)
    brute = np.max(v[0] * pts[:, 1] - v[1] * pts[:, 0])
    assert abs(val - expect) < 1e-10
    assert val >= brute - 1e-12
    assert val - brute < 1e-9


def test_calibrate_radon_scale(euclid, glued3, lp3):
    cal = mk.calibrate_radon_scale(euclid)
    assert abs(cal.form.kappa - 1.0) < 1e-12 and cal.residual < 1e-9
    cal = mk.calibrate_radon_scale(glued3)
    assert cal.residual < 1e-6
    with pytest.raises(mk.NotRadonError) as exc:
        mk.calibrate_radon_scale(lp3)
    assert exc.value.residual > 1e-2


def test_radon_glued_antinorm_equals_gauge(glued3):
    cal = mk.calibrate_radon_scale(glued3)
    v = random_nonzero(64, seed=3)
    v = v / glued3.gauge(v)[:, None]
    anti = mk.antinorm(glued3, cal.form, v)
    assert np.max(np.abs(anti - glued3.gauge(v))) < 1e-6


def test_is_birkhoff_examples(euclid, lp3, form):
    assert mk.is_birkhoff(euclid, form, (1.0, 0.0), (0.0, 1.0))
    assert not mk.is_birkhoff(euclid, form, (1.0, 0.0), (1.0, 1.0))
    # tangent of the lp3 circle at (1, 0) is vertical
    assert mk.is_birkhoff(lp3, form, (1.0, 0.0), (0.0, 1.0))
    with pytest.raises(ValueError):
        mk.is_birkhoff(euclid, form, (0.0, 0.0), (1.0, 0.0))


def test_birkhoff_tangent_examples(euclid, lp3, form):
    b = mk.birkhoff_tangent(euclid, form, (1.0, 0.0))
    assert np.allclose(b, (0.0, 1.0), atol=1e-12)
    b = mk.birkhoff_tangent(euclid, form, (0.0, 2.0))
    assert np.allclose(b, (-1.0, 0.0), atol=1e-12)
    b = mk.birkhoff_tangent(lp3, form, (1.0, 0.0))
    assert np.allclose(b, (0.0, 1.0), atol=1e-12)


def test_birkhoff_tangent_postconditions(lp3, form):
    for seed, x in enumerate(random_nonzero(16, seed=11)):
        b = mk.birkhoff_tangent(lp3, form, x)
        assert mk.is_birkhoff(lp3, form, x, b, tol=1e-8)
        assert abs(mk.antinorm(lp3, form, b) - 1.0) < 1e-8
        assert form(x, b) > 0  # positively oriented


def test_minkowski_sine_cosine_examples(euclid, lp3, form):
    assert abs(mk.minkowski_sine(euclid, form, (1, 0), (0, 1)) - 1.0) < 1e-12
    x = (0.3, -0.8)
    assert abs(mk.minkowski_sine(lp3, form, x, x)) < 1e-14
    assert abs(mk.minkowski_cosine(lp3, form, x, x) - 1.0) < 1e-12
    assert abs(mk.minkowski_cosine(euclid, form, (1, 0), (0, 1))) < 1e-12
    # unit sine on Birkhoff pairs
    b = mk.birkhoff_tangent(lp3, form, x)
    assert abs(mk.minkowski_sine(lp3, form, x, b) - 1.0) < 1e-10


def test_cosine_is_sine_of_tangent(lp3, form):
    xs = random_nonzero(12, seed=5)
    ys = random_nonzero(12, seed=6)
    for x, y in zip(xs, ys):
        cm = mk.minkowski_cosine(lp3, form, x, y)
        sm = mk.minkowski_sine(lp3, form, y, mk.birkhoff_tangent(lp3, form, x))
        assert abs(cm - sm) < 1e-12


def test_fundamental_inequality(lp3, glued3, form):
    for prof in (lp3, glued3):
        x = random_nonzero(2000, seed=1)
        y = random_nonzero(2000, seed=2)
        w = np.abs(form(x, y))
        bound = prof.gauge(x) * mk.antinorm(prof, form, y)
        assert np.all(w <= bound + 1e-9)


def test_sine_bounded_by_one(lp3, form):
    x = random_nonzero(300, seed=7)
    y = random_nonzero(300, seed=8)
    w = form(x, y)
    s = w / (lp3.gauge(x) * mk.antinorm(lp3, form, y))
    assert np.max(np.abs(s)) <= 1.0 + 1e-10


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(0.1, 7.0))
def test_gauge_is_a_norm_lp3(x1, x2, y1, y2, scale):
    prof = mk.LpProfile(3.0)
    x = np.array([x1, x2])
    y = np.array([y1, y2])
    assert prof.gauge(x + y) <= prof.gauge(x) + prof.gauge(y) + 1e-9
    assert abs(prof.gauge(scale * x) - scale * prof.gauge(x)) < 1e-9 * (1 + prof.gauge(x))


def test_antinorm_is_a_norm(lp3, form):
    x = random_nonzero(128, seed=20)
    y = random_nonzero(128, seed=21)
    ax = mk.antinorm(lp3, form, x)
    ay = mk.antinorm(lp3, form, y)
    axy = mk.antinorm(lp3, form, x + y)
    assert np.all(axy <= ax + ay + 1e-9)
    assert np.max(np.abs(mk.antinorm(lp3, form, 2.5 * x) - 2.5 * ax)) < 1e-9 * np.max(1 + ax)


def _anti_profile(prof, form, n=16384):
    """Reconstructed profile whose unit circle is the sampled anti-circle.

    The anti-circle of an lp plane has four unbounded-curvature points, so
    the radial spline needs a dense grid to stay within 1e-6 there.
    """
    theta = np.arange(n) * (TWO_PI / n)
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    r = 1.0 / mk.antinorm(prof, form, dirs)
    pts = dirs * r[:, None]
    curve = mk.ClosedCurve(period=TWO_PI, grid=theta, points=pts)
    return mk.ReconstructedProfile(curve, resolution=n)


def test_antinorm_of_antinorm_is_gauge(lp3, form):
    anti = _anti_profile(lp3, form)
    v = random_nonzero(64, seed=30)
    v = v / lp3.gauge(v)[:, None]
    again = mk.antinorm(anti, form, v)
    assert np.max(np.abs(again - lp3.gauge(v))) < 1e-6


def test_antinorm_reverses_birkhoff(lp3, form):
    anti = _anti_profile(lp3, form)
    for x in random_nonzero(8, seed=31):
        y = mk.birkhoff_tangent(lp3, form, x)
        assert mk.is_birkhoff(lp3, form, x, y, tol=1e-8)
        assert mk.is_birkhoff(anti, form, y, x, tol=1e-6)
