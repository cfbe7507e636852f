"""Norm, anti-norm, Birkhoff orthogonality and Minkowskian trigonometry."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .profiles import (NotRadonError, STANDARD_FORM, SymplecticForm, TWO_PI,
                       boundary_point, validate_profile)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def gauge(profile, v):
    """Norm of v in the plane whose unit circle is the profile."""
    return profile.gauge(np.asarray(v, dtype=float))


def _sup_det_over_boundary(profile, v, coarse=512, tol=1e-8):
    """sup over boundary points y of det(v, y), batched over rows of v.

    Coarse grid scan seeded golden-section refinement; the objective is
    unimodal around the maximizer for smooth strictly convex circles.
    """
    v = np.atleast_2d(np.asarray(v, dtype=float))
    theta = np.arange(coarse) * (TWO_PI / coarse)
    bd = boundary_point(profile, theta)           # (coarse, 2)
    vals = v[:, 0, None] * bd[None, :, 1] - v[:, 1, None] * bd[None, :, 0]
    k = vals.argmax(axis=1)
    h = TWO_PI / coarse
    lo = theta[k] - h
    hi = theta[k] + h

    def f(th):
        y = boundary_point(profile, th)
        return v[:, 0] * y[:, 1] - v[:, 1] * y[:, 0]

    while np.max(hi - lo) > tol:
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
        move_up = f(c) < f(d)
        lo = np.where(move_up, c, lo)
        hi = np.where(move_up, hi, d)
    return f(0.5 * (lo + hi))


def antinorm(profile, form, v):
    """sup{omega(v, y) : y on the unit circle}; a norm dual to the gauge."""
    v = np.asarray(v, dtype=float)
    single = v.ndim == 1
    vv = np.atleast_2d(v)
    out = np.zeros(len(vv))
    nz = np.hypot(vv[:, 0], vv[:, 1]) > 0
    if nz.any():
        out[nz] = form.kappa * _sup_det_over_boundary(profile, vv[nz])
    return float(out[0]) if single else out.reshape(v.shape[:-1])


@dataclass(frozen=True)
class RadonCalibration:
    form: SymplecticForm
    residual: float


def calibrate_radon_scale(profile, tol=1e-3, samples=1024) -> RadonCalibration:
    """Scale the symplectic form so the anti-norm matches the norm.

    Minimizes the worst deviation |kappa*sup_det(v, .) - 1| over sampled
    unit vectors; raises NotRadonError when the optimum exceeds tol.
    """
    theta = (np.arange(samples) + 0.5) * (TWO_PI / samples)
    pts = boundary_point(profile, theta)
    sup = _sup_det_over_boundary(profile, pts)
    s_min, s_max = float(sup.min()), float(sup.max())
    kappa = 2.0 / (s_min + s_max)
    residual = (s_max - s_min) / (s_max + s_min)
    if residual > tol:
        raise NotRadonError(residual, tol)
    return RadonCalibration(SymplecticForm(kappa), float(residual))


def _require_nonzero(*vs):
    for v in vs:
        v = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(v)) or np.hypot(v[..., 0], v[..., 1]).min() == 0:
            raise ValueError("direction operations need nonzero finite vectors")


def is_birkhoff(profile, form, x, y, tol=1e-9):
    """x is Birkhoff orthogonal to y: |omega(x,y)| = gauge(x)*antinorm(y)."""
    _require_nonzero(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = abs(form(x, y))
    bound = gauge(profile, x) * antinorm(profile, form, y)
    return bool(abs(w - bound) <= tol * bound)


def birkhoff_tangent(profile, form, x):
    """The unique tangent-direction vector b with x -| b and omega(x, b) = gauge(x).

    b lies on the unit anti-circle and {x, b} is positively oriented.
    """
    _require_nonzero(x)
    x = np.asarray(x, dtype=float)
    theta = math.atan2(x[1], x[0])
    from .profiles import boundary_derivs

    tangent = boundary_derivs(profile, np.asarray([theta]), order=1)[1][0]
    scale = gauge(profile, x) / form(x, tangent)
    return tangent * scale


def minkowski_sine(profile, form, x, y):
    """omega(x,y) / (gauge(x) * antinorm(y)); in [-1, 1], with |.| = 1
    exactly on Birkhoff-orthogonal pairs."""
    _require_nonzero(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(form(x, y) / (gauge(profile, x) * antinorm(profile, form, y)))


def minkowski_cosine(profile, form, x, y):
    """omega(y, b(x)) / gauge(y); equals the sine of (y, b(x))."""
    _require_nonzero(x, y)
    y = np.asarray(y, dtype=float)
    b = birkhoff_tangent(profile, form, x)
    return float(form(y, b) / gauge(profile, y))


__all__ = [
    "gauge", "antinorm", "calibrate_radon_scale", "RadonCalibration",
    "is_birkhoff", "birkhoff_tangent", "minkowski_sine", "minkowski_cosine",
    "validate_profile",
]
