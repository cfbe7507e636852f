"""Periodic curves, scalar functions, and the canonical parametrizations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import normcore
from .engine import geometry_for
from .profiles import STANDARD_FORM, TWO_PI, boundary_derivs, boundary_point


class DegenerateCurveError(ValueError):
    pass


class ParametrizationMismatch(ValueError):
    pass


def _periodic_spline(grid, values, period):
    x = np.append(grid, grid[0] + period)
    v = np.asarray(values)
    y = np.concatenate([v, v[:1]], axis=0)
    return CubicSpline(x, y, bc_type="periodic")


@dataclass
class ClosedCurve:
    """Sampled periodic planar curve with a C^2 periodic interpolant.

    deriv_samples, when present, are exact tangent vectors at the grid
    nodes (d point / d parameter); interpolated derivative queries fall
    back to the spline.
    """

    period: float
    grid: np.ndarray
    points: np.ndarray
    orientation: int = 1
    deriv_samples: Optional[np.ndarray] = None
    _spline: object = field(default=None, repr=False)

    def spline(self):
        if self._spline is None:
            self._spline = _periodic_spline(self.grid, self.points, self.period)
        return self._spline

    def __call__(self, t):
        t0 = self.grid[0]
        return self.spline()(np.mod(np.asarray(t, dtype=float) - t0, self.period) + t0)

    def derivative(self, t, order=1):
        t0 = self.grid[0]
        return self.spline()(np.mod(np.asarray(t, dtype=float) - t0, self.period) + t0,
                             order)

    def derivs(self):
        """Tangent samples at the grid (exact if provided, else spline)."""
        if self.deriv_samples is not None:
            return self.deriv_samples
        return self.spline()(self.grid, 1)

    def to_csv(self, path, extra=None):
        """Write (t, x, y[, extras...]) rows with 17 significant digits."""
        cols = [self.grid, self.points[:, 0], self.points[:, 1]]
        names = ["t", "x", "y"]
        for name, vals in (extra or {}).items():
            names.append(name)
            cols.append(np.asarray(vals))
        with open(path, "w") as fh:
            fh.write(",".join(names) + "\n")
            for row in zip(*cols):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


@dataclass
class ScalarPeriodic:
    """Sampled periodic scalar function.

    fn (and fn_derivs, one callable per derivative order starting at 1) are
    optional exact evaluators; queries fall back to the periodic spline.
    """

    period: float
    grid: np.ndarray
    values: np.ndarray
    fn: Optional[Callable] = None
    fn_derivs: tuple = ()
    _spline: object = field(default=None, repr=False)

    def spline(self):
        if self._spline is None:
            self._spline = _periodic_spline(self.grid, self.values, self.period)
        return self._spline

    def __call__(self, t, order=0):
        t = np.asarray(t, dtype=float)
        if order == 0 and self.fn is not None:
            return self.fn(t)
        if 1 <= order <= len(self.fn_derivs):
            return self.fn_derivs[order - 1](t)
        t0 = self.grid[0]
        return self.spline()(np.mod(t - t0, self.period) + t0, order)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))


class CircleLength(NamedTuple):
    length: float
    half: float


def boundary_curve(profile, n=None) -> ClosedCurve:
    """The unit circle sampled on a uniform polar-angle grid."""
    report = normcore.validate_profile(profile)
    if not report.ok:
        raise ValueError("invalid profile: " + "; ".join(report.messages))
    n = n or profile.resolution
    if n < 4:
        raise ValueError("need at least 4 samples")
    theta = np.arange(n) * (TWO_PI / n)
    pts = boundary_point(profile, theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        der = boundary_derivs(profile, theta, order=1)[1]
    return ClosedCurve(period=TWO_PI, grid=theta, points=pts, deriv_samples=der)


def circle_length(profile, form=STANDARD_FORM) -> CircleLength:
    """Self-measured circumference of the unit circle and its half."""
    geo = geometry_for(profile, form)
    return CircleLength(geo.circumference, geo.half_circumference)


def arclength_param(curve: ClosedCurve, profile, n=None, substeps=8) -> ClosedCurve:
    """Reparametrize a closed curve by arc length in the profile's norm.

    Solves d theta/dt = 1 / gauge(curve'(theta)) with fixed-step RK4 on a
    uniform t grid (substeps per output cell) and resamples.
    """
    n = n or profile.resolution

    def speed_inv(th):
        g = profile.gauge(curve.derivative(th))
        if np.any(g < 1e-12):
            raise DegenerateCurveError("vanishing tangent")
        return 1.0 / g

    dense = np.linspace(curve.grid[0], curve.grid[0] + curve.period, 16 * n + 1)
    sp = profile.gauge(curve.derivative(dense))
    if np.min(sp) < 1e-12:
        raise DegenerateCurveError("vanishing tangent")
    from scipy.integrate import simpson

    total = float(simpson(sp, x=dense))
    h = total / (n * substeps)
    theta = curve.grid[0]
    thetas = np.empty(n + 1)
    thetas[0] = theta
    for i in range(n * substeps):
        k1 = speed_inv(theta)
        k2 = speed_inv(theta + 0.5 * h * k1)
        k3 = speed_inv(theta + 0.5 * h * k2)
        k4 = speed_inv(theta + h * k3)
        theta = theta + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if (i + 1) % substeps == 0:
            thetas[(i + 1) // substeps] = theta
    tgrid = np.arange(n) * (total / n)
    pts = curve(thetas[:-1])
    der = curve.derivative(thetas[:-1])
    der = der / profile.gauge(der)[:, None]
    return ClosedCurve(period=total, grid=tgrid, points=pts, deriv_samples=der)


def dual_param(phi: ClosedCurve, form=STANDARD_FORM) -> ClosedCurve:
    """psi(t) = phi'(t) / omega(phi(t), phi'(t)) on phi's own grid."""
    der = phi.derivs()
    w = form(phi.points, der)
    if np.any(np.abs(w) < 1e-14):
        raise DegenerateCurveError("omega(phi, phi') vanishes")
    pts = der / w[:, None]
    return ClosedCurve(period=phi.period, grid=phi.grid.copy(), points=pts)


def antinorm_arclength_param(profile, form=STANDARD_FORM, n=None) -> ClosedCurve:
    """The anti-circle parametrized by arc length of the original norm.

    omega(psi, psi') = 1 along the result; the parameter also measures
    kappa times twice the swept sector area.
    """
    geo = geometry_for(profile, form)
    n = n or profile.resolution
    L = geo.anti_length
    t = np.arange(n) * (L / n)
    theta = geo._clamp(geo.theta_of_anti_arc(t))
    pts = geo.psi_point(theta)
    der = geo.psi_unit_tangent(theta)
    return ClosedCurve(period=L, grid=t, points=pts, deriv_samples=der)


def radius_of_curvature(gamma: ClosedCurve, phi: ClosedCurve,
                        form=STANDARD_FORM, tol=1e-6) -> ScalarPeriodic:
    """rho with gamma'(t) = rho(t) * phi'(t), extracted pointwise."""
    if len(gamma.grid) != len(phi.grid):
        raise ParametrizationMismatch("grids differ in size")
    dg = gamma.derivs()
    dp = phi.derivs()
    mis = np.abs(form(dg, dp))
    # global scale: the pointwise one vanishes where the radius crosses zero
    scale = float(np.max(np.hypot(dg[:, 0], dg[:, 1]))
                  * np.max(np.hypot(dp[:, 0], dp[:, 1])))
    if np.max(mis) > tol * scale + 1e-12:
        raise ParametrizationMismatch("tangents are not parallel")
    rho = form(dg, phi.points) / form(dp, phi.points)
    return ScalarPeriodic(period=gamma.period, grid=gamma.grid.copy(), values=rho)


def minkowski_curvature_antinorm(profile, form=STANDARD_FORM, n=None) -> ScalarPeriodic:
    """Minkowski curvature of the unit circle measured in the anti-norm.

    Independent of the dual-parametrization machinery: the circle is
    parametrized by anti-norm arc length s (anti-norm evaluated by
    maximization over sampled boundaries), the tangent direction angle is
    matched to the sector-area parametrization of the anti-circle (built
    by quadrature of the anti-norm radial function), and the curvature is
    the numerical derivative of the matched parameter with respect to s.
    Resampled to the anti-arc parameter used by the Hill machinery.
    """
    from .engine import _SegmentMap

    geo = geometry_for(profile, form)
    n = n or profile.resolution
    L = geo.anti_length
    kappa = form.kappa
    breaks = [s.th0 for s in geo.segments] + [geo.segments[-1].th1]

    def antinorm_of_tangent(th):
        d = boundary_derivs(profile, th, order=1)[1]
        return normcore.antinorm(profile, form, d)

    def beta_of(th):
        d = boundary_derivs(profile, th, order=1)[1]
        return np.arctan2(d[..., 1], d[..., 0])

    def sector_rate(beta):
        dirs = np.stack([np.cos(beta), np.sin(beta)], axis=-1)
        r_a = 1.0 / normcore.antinorm(profile, form, dirs)
        return kappa * r_a**2

    # cumulative anti-norm arc length s(theta) and cumulative sector-area
    # parameter of the anti-circle over the tangent angle, arc by arc
    s_maps = [_SegmentMap(antinorm_of_tangent, a, b, cells=256)
              for a, b in zip(breaks[:-1], breaks[1:])]
    raw = [float(beta_of(np.asarray([a + 1e-9]))[0]) for a in breaks[:-1]]
    beta_breaks = [raw[0]]
    for bb in raw[1:]:
        # each arc turns the tangent by an angle in (0, 2*pi)
        while bb <= beta_breaks[-1]:
            bb += TWO_PI
        beta_breaks.append(bb)
    beta_breaks.append(raw[0] + TWO_PI)
    area_maps = [_SegmentMap(sector_rate, a, b, cells=256)
                 for a, b in zip(beta_breaks[:-1], beta_breaks[1:])]

    t = (np.arange(n) + 0.5) * (L / n)
    theta = geo._clamp(geo.theta_of_anti_arc(t))
    values = np.empty(n)
    s_off = 0.0
    v_off = 0.0
    for (a, b), smap, amap in zip(zip(breaks[:-1], breaks[1:]), s_maps, area_maps):
        mask = (theta >= a) & (theta < b)
        th = theta[mask]
        order = np.argsort(th)
        th_sorted = th[order]
        s_vals = s_off + smap.value(smap.u_of_theta(th_sorted))
        beta = np.unwrap(beta_of(th_sorted))
        # pin the 2*pi branch so beta lies in this arc's tangent-angle range
        beta += TWO_PI * round((amap.a - beta[0]) / TWO_PI)
        beta = np.clip(beta, amap.a + 1e-12, amap.b - 1e-12)
        v_vals = v_off + amap.value(amap.u_of_theta(beta))
        k_sorted = CubicSpline(s_vals, v_vals)(s_vals, 1)
        out = np.empty_like(k_sorted)
        out[order] = k_sorted
        values[mask] = out
        s_off += smap.total
        v_off += amap.total
    return ScalarPeriodic(period=L, grid=t, values=values)
