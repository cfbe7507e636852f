"""Evolutes, bi-evolutes, cycloids and the associated Sturm-Liouville system.

The second-order equation (1/a)*(u'/b)' = -lam*u with a = omega(phi, phi')
and b = omega(psi, psi') is always integrated as the first-order system
u' = b*w, w' = -lam*a*u in the quasi-derivative w = u'/b; b is never
differentiated (it is only continuous at glued-profile junctions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import normcore
from .curves import (ClosedCurve, ParametrizationMismatch, ScalarPeriodic,
                     radius_of_curvature)
from .engine import geometry_for
from .profiles import NotRadonError, STANDARD_FORM, SymplecticForm


class ConvexityError(ValueError):
    pass


class IntegrationBlowup(RuntimeError):
    pass


@dataclass
class SLCoefficients:
    """Coefficient pair of the cycloid equation on a shared uniform grid."""

    a: ScalarPeriodic
    b: ScalarPeriodic
    period: float
    half_period: float
    geometry: object = None   # engine.PlaneGeometry when profile-backed

    @classmethod
    def constant(cls, a=1.0, b=1.0, period=2.0 * math.pi, n=4096):
        grid = np.arange(n) * (period / n)
        return cls(
            a=ScalarPeriodic(period, grid, np.full(n, float(a)), fn=lambda t: np.full_like(np.asarray(t, float), float(a))),
            b=ScalarPeriodic(period, grid, np.full(n, float(b)), fn=lambda t: np.full_like(np.asarray(t, float), float(b))),
            period=float(period),
            half_period=0.5 * float(period),
        )


@dataclass
class SLSolution:
    """Sampled solution of the first-order system (u, w = u'/b)."""

    grid: np.ndarray
    u: np.ndarray
    w: np.ndarray
    lam: float
    period: float
    error_estimate: float = float("nan")

    def u_spline(self):
        return CubicSpline(self.grid, self.u)

    def du(self, b_values):
        """u' = b*w on the grid."""
        return b_values * self.w


def sl_coefficients(profile, form=STANDARD_FORM, n=None) -> SLCoefficients:
    """Build a(t), b(t) on the uniform arc-length grid of the unit circle."""
    geo = geometry_for(profile, form)
    sl = geo.sl_arrays(n)
    a, b = sl["a"], sl["b"]
    if np.min(a) <= 0 or np.min(b) <= 0 or not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ConvexityError(
            f"nonpositive coefficient detected (min a {np.min(a):.3e}, min b {np.min(b):.3e})"
        )
    period = sl["period"]
    grid = sl["tau"]
    a_fn = lambda t: geo.coeff_a(geo._clamp(geo.theta_of_circle_arc(t)))
    return SLCoefficients(
        a=ScalarPeriodic(period, grid, a, fn=a_fn),
        b=ScalarPeriodic(period, grid, b),
        period=period,
        half_period=sl["half"],
        geometry=geo,
    )


def _plain_rk4(coeffs: SLCoefficients, lam, init, span, nsteps, collect=True):
    """Fixed-step RK4 on (u, w) using the coefficient interpolants."""
    h = span / nsteps
    xs = np.linspace(0.0, span, 2 * nsteps + 1)
    av = coeffs.a(np.mod(xs, coeffs.period))
    bv = coeffs.b(np.mod(xs, coeffs.period))
    Y = np.asarray(init, dtype=float)
    out = np.empty((nsteps + 1,) + Y.shape)
    out[0] = Y

    def rhs(j, Z):
        return np.stack([bv[j] * Z[1], -lam * av[j] * Z[0]])

    for i in range(nsteps):
        k1 = rhs(2 * i, Y)
        k2 = rhs(2 * i + 1, Y + 0.5 * h * k1)
        k3 = rhs(2 * i + 1, Y + 0.5 * h * k2)
        k4 = rhs(2 * i + 2, Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(Y)):
            raise IntegrationBlowup(f"nonfinite state at step {i + 1}")
        out[i + 1] = Y
    return out


def integrate_sl(coeffs: SLCoefficients, lam, u0, w0, span=None,
                 nsteps=None) -> SLSolution:
    """Solve u' = b*w, w' = -lam*a*u from (u0, w0) over [0, span].

    Geometry-backed coefficients integrate arc by arc through the engine
    (exact analytic coefficients, singularities handled); raw coefficients
    use fixed-step RK4 on the sample grid.  A step-doubling error estimate
    is attached.
    """
    span = coeffs.period if span is None else float(span)
    init = np.array([[float(u0)], [float(w0)]])
    if coeffs.geometry is not None and abs(span - coeffs.period) < 1e-12:
        geo = coeffs.geometry
        n = len(coeffs.a.grid)
        tau, states = geo.solve_on_circle_grid(lam, init, n=n)
        tau2, states2 = geo.solve_on_circle_grid(lam, init, n=n, nsteps=2 * n)
        err = float(np.max(np.abs(states2 - states)) / 15.0)
        return SLSolution(grid=tau, u=states[:, 0, 0], w=states[:, 1, 0],
                          lam=float(lam), period=coeffs.period, error_estimate=err)
    nsteps = nsteps or max(64, int(round(len(coeffs.a.grid) * span / coeffs.period)))
    out = _plain_rk4(coeffs, lam, init, span, nsteps)
    out2 = _plain_rk4(coeffs, lam, init, span, 2 * nsteps)
    err = float(np.max(np.abs(out2[::2] - out)) / 15.0)
    grid = np.linspace(0.0, span, nsteps + 1)
    return SLSolution(grid=grid, u=out[:, 0, 0], w=out[:, 1, 0], lam=float(lam),
                      period=coeffs.period, error_estimate=err)


def evolute(gamma: ClosedCurve, phi: ClosedCurve, form=STANDARD_FORM) -> ClosedCurve:
    """Locus of curvature centers: gamma - rho*phi."""
    rho = radius_of_curvature(gamma, phi, form)
    pts = gamma.points - rho.values[:, None] * phi.points
    drho = rho(gamma.grid, 1)
    der = -drho[:, None] * phi.points
    return ClosedCurve(period=gamma.period, grid=gamma.grid.copy(), points=pts,
                       deriv_samples=der)


def bi_evolute(gamma: ClosedCurve, phi: ClosedCurve, psi: ClosedCurve,
               form=STANDARD_FORM) -> ClosedCurve:
    """Evolute of the evolute, taken in the anti-norm geometry."""
    rho = radius_of_curvature(gamma, phi, form)
    xi = gamma.points - rho.values[:, None] * phi.points
    b = form(psi.points, psi.derivs())
    drho = rho(gamma.grid, 1)
    pts = xi - (drho / b)[:, None] * psi.points
    return ClosedCurve(period=gamma.period, grid=gamma.grid.copy(), points=pts)


class CycloidResult(NamedTuple):
    curve: ClosedCurve
    displacement: np.ndarray      # gamma(span) - gamma(0)
    closure_gap: float


def cycloid_from_radius(rho, phi: ClosedCurve, gamma0=(0.0, 0.0)) -> CycloidResult:
    """Integrate gamma' = rho * phi' from gamma0 by composite Simpson.

    rho may be an SLSolution (its u component is used), a ScalarPeriodic,
    or an array on phi's grid.
    """
    if isinstance(rho, SLSolution):
        samples = rho.u[:-1] if len(rho.u) == len(phi.grid) + 1 else rho.u
        rho_sp = ScalarPeriodic(phi.period, phi.grid.copy(), samples)
    elif isinstance(rho, ScalarPeriodic):
        rho_sp = rho
    else:
        rho_sp = ScalarPeriodic(phi.period, phi.grid.copy(), np.asarray(rho, float))
    n = len(phi.grid)
    h = phi.period / n
    nodes = np.arange(n + 1) * h
    mids = nodes[:-1] + 0.5 * h
    fn_nodes = rho_sp(np.mod(nodes, phi.period))[:, None] * phi.derivative(nodes)
    fn_mids = rho_sp(mids % phi.period)[:, None] * phi.derivative(mids)
    if phi.deriv_samples is not None:
        fn_nodes[:-1] = rho_sp(phi.grid)[:, None] * phi.deriv_samples
        fn_nodes[-1] = fn_nodes[0]
    cells = (h / 6.0) * (fn_nodes[:-1] + 4.0 * fn_mids + fn_nodes[1:])
    pts = np.concatenate([[(0.0, 0.0)], np.cumsum(cells, axis=0)]) + np.asarray(gamma0, float)
    displacement = pts[-1] - pts[0]
    gap = float(np.hypot(*displacement))
    curve = ClosedCurve(period=phi.period, grid=phi.grid.copy(), points=pts[:-1],
                        deriv_samples=fn_nodes[:-1])
    return CycloidResult(curve=curve, displacement=displacement, closure_gap=gap)


@dataclass
class ClosureVerdict:
    periodic_residual: float
    antiperiodic_residual: float
    closure_gap: float
    closed: bool
    support_residual: Optional[float] = None

    def to_dict(self):
        return {
            "periodic_residual": self.periodic_residual,
            "antiperiodic_residual": self.antiperiodic_residual,
            "closure_gap": self.closure_gap,
            "closed": self.closed,
            "support_residual": self.support_residual,
        }


def _phi_psi_curves(coeffs: SLCoefficients):
    """Arc-length circle and its dual curve for geometry-backed coefficients;
    the Euclidean pair for constant coefficients a = b = 1, period 2*pi."""
    if coeffs.geometry is not None:
        geo = coeffs.geometry
        sl = geo.sl_arrays(len(coeffs.a.grid))
        phi = ClosedCurve(period=sl["period"], grid=sl["tau"], points=sl["phi"],
                          deriv_samples=sl["dphi"])
        psi = ClosedCurve(period=sl["period"], grid=sl["tau"], points=sl["psi"])
        return phi, psi
    if (abs(coeffs.period - 2 * math.pi) < 1e-12
            and np.allclose(coeffs.a.values, 1.0, atol=1e-12)
            and np.allclose(coeffs.b.values, 1.0, atol=1e-12)):
        t = coeffs.a.grid
        pts = np.stack([np.cos(t), np.sin(t)], axis=-1)
        der = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        phi = ClosedCurve(period=coeffs.period, grid=t.copy(), points=pts,
                          deriv_samples=der)
        psi = ClosedCurve(period=coeffs.period, grid=t.copy(), points=der.copy())
        return phi, psi
    raise ValueError("closure_check needs geometry-backed or Euclidean coefficients")


def closure_check(coeffs: SLCoefficients, lam, rho: SLSolution,
                  tol=1e-8) -> ClosureVerdict:
    """Closure diagnostics per the periodic/antiperiodic boundary data.

    Measures the half-period periodicity and antiperiodicity residuals of
    rho, the closure gap of the constructed cycloid, and (for lam != 1
    with antiperiodic data) the support-function identity h = rho/(1-lam).
    """
    phi, psi = _phi_psi_curves(coeffs)
    n = len(phi.grid)
    us = CubicSpline(rho.grid, rho.u)
    half = coeffs.half_period
    tq = np.linspace(0.0, half, n // 2 + 1)
    per_res = float(np.max(np.abs(us(tq) - us(tq + half))))
    anti_res = float(np.max(np.abs(us(tq) + us(tq + half))))
    rho_vals = us(phi.grid)
    result = cycloid_from_radius(rho_vals, phi)
    support_res = None
    if anti_res <= 1e-6 * max(1.0, np.max(np.abs(rho.u))):
        if abs(lam - 1.0) < 1e-12:
            raise ValueError("support-function identity is undefined at lam = 1")
        a0 = coeffs.a.values[0]
        b0 = coeffs.b.values[0]
        w0 = rho.w[0]
        gamma0 = (rho.u[0] * phi.points[0] + (w0 / a0) * phi.derivs()[0]) / (1.0 - lam)
        shifted = cycloid_from_radius(rho_vals, phi, gamma0=gamma0)
        h = support_function(shifted.curve, psi).values
        support_res = float(np.max(np.abs(h - rho_vals / (1.0 - lam))))
    return ClosureVerdict(
        periodic_residual=per_res,
        antiperiodic_residual=anti_res,
        closure_gap=result.closure_gap,
        closed=bool(result.closure_gap <= tol * max(1.0, float(np.max(np.abs(result.curve.points))))),
        support_residual=support_res,
    )


def support_function(gamma: ClosedCurve, psi: ClosedCurve,
                     form=STANDARD_FORM) -> ScalarPeriodic:
    """Minkowskian support function h(t) = omega(gamma(t), psi(t))."""
    if len(gamma.grid) != len(psi.grid):
        raise ParametrizationMismatch("gamma and psi grids differ")
    vals = form(gamma.points, psi.points)
    return ScalarPeriodic(period=gamma.period, grid=gamma.grid.copy(), values=vals)


@dataclass
class RadonTrigReport:
    radon: bool
    calibration_residual: float
    kappa: float
    residual_sine: float
    residual_cosine: float
    match_sine: float
    match_cosine: float

    @property
    def ok(self):
        return self.radon

    def to_dict(self):
        return {
            "radon": self.radon,
            "calibration_residual": self.calibration_residual,
            "kappa": self.kappa,
            "residual_sine": self.residual_sine,
            "residual_cosine": self.residual_cosine,
            "match_sine": self.match_sine,
            "match_cosine": self.match_cosine,
        }


def radon_trig_check(profile, strict=False, n=None) -> RadonTrigReport:
    """Test the trigonometric closed forms of the curvature equation.

    Builds u_sin(t) = sm(phi'(t), phi'(0)) and u_cos(t) = cm(phi(t), phi(0))
    and evaluates the residual of (u'/delta)' + u with delta = ||phi''||.
    For non-Radon profiles the residual is O(1); with strict=True that case
    raises NotRadonError instead of reporting.
    """
    try:
        cal = normcore.calibrate_radon_scale(profile)
        form, cal_res = cal.form, cal.residual
        radon = True
    except NotRadonError as exc:
        if strict:
            raise
        form, cal_res = SymplecticForm(1.0), exc.residual
        radon = False
    geo = geometry_for(profile, form)
    n = n or profile.resolution
    T = geo.circumference
    # offset grid avoids evaluating at the degenerate axis parameters
    tau = (np.arange(n) + 0.5) * (T / n)
    theta = geo._clamp(geo.theta_of_circle_arc(tau))
    phi = geo.circle_point(theta)
    dphi = geo.circle_tangent(theta)
    avals = geo.coeff_a(theta)
    bvals = geo.coeff_b(theta)
    psi = geo.psi_point(theta)
    # phi'' = a' psi - a b phi  (exact; a' through the gauge gradient)
    d_all = _a_derivative(geo, theta)
    phipp = d_all[:, None] * psi - (avals * bvals)[:, None] * phi
    delta = profile.gauge(phipp)
    theta0 = geo._clamp(np.asarray([1e-9]))
    c_sin = geo.circle_tangent(theta0)[0]
    c_cos = geo.circle_point(theta0)[0]
    u_sin = form(dphi, np.broadcast_to(c_sin, dphi.shape))
    u_cos = form(np.broadcast_to(c_cos, dphi.shape), dphi)
    du_sin = form(phipp, np.broadcast_to(c_sin, phipp.shape))
    du_cos = form(np.broadcast_to(c_cos, phipp.shape), phipp)
    res_sin = _quasi_residual(tau, theta, du_sin / delta, u_sin, T, geo)
    res_cos = _quasi_residual(tau, theta, du_cos / delta, u_cos, T, geo)
    # compare with direct integration of (u'/delta)' = -u from matching data;
    # the integration parameter starts at the first offset sample
    dcoef = SLCoefficients(
        a=ScalarPeriodic(T, tau - tau[0], np.ones(n)),
        b=ScalarPeriodic(T, tau - tau[0], delta),
        period=T, half_period=0.5 * T)
    m_sin = _trig_match(dcoef, u_sin, du_sin / delta, tau)
    m_cos = _trig_match(dcoef, u_cos, du_cos / delta, tau)
    return RadonTrigReport(radon=radon, calibration_residual=cal_res,
                           kappa=form.kappa,
                           residual_sine=res_sin, residual_cosine=res_cos,
                           match_sine=m_sin, match_cosine=m_cos)


def _a_derivative(geo, theta):
    """d a / d tau evaluated analytically through the gauge gradient."""
    from .profiles import boundary_derivs

    p0, p1, p2 = boundary_derivs(geo.profile, theta, order=2)
    d1 = p0[:, 0] * p1[:, 1] - p0[:, 1] * p1[:, 0]
    d2 = p0[:, 0] * p2[:, 1] - p0[:, 1] * p2[:, 0]
    sp = geo.profile.gauge(p1)
    grad = geo.profile.gauge_grad(p1)
    dsp = grad[:, 0] * p2[:, 0] + grad[:, 1] * p2[:, 1]
    da_dtheta = geo.kappa * (d2 / sp - d1 * dsp / sp**2)
    return da_dtheta / sp


def _quasi_residual(tau, theta, g, u, period, geo):
    """max |dg/dtau + u| with the derivative taken from exact samples.

    Smooth profiles use one periodic spline in tau.  Piecewise profiles
    differentiate arc by arc in the arc's regular-side parameter (g can
    have unbounded tau-derivatives approaching sharp junctions but is
    one-sidedly smooth against the anti-circle arc length there) and
    convert with the chain factor.
    """
    from .profiles import SIDE_CIRCLE

    if not geo.profile.singular_thetas:
        x = np.append(tau, tau[0] + period)
        sp = CubicSpline(x, np.append(g, g[0]), bc_type="periodic")
        return float(np.max(np.abs(sp(tau, 1) + u)))
    res = 0.0
    for seg, lo, hi in zip(geo.segments, geo.circle_breaks[:-1],
                           geo.circle_breaks[1:]):
        m = (tau > lo) & (tau < hi)
        if m.sum() < 8:
            continue
        if seg.side == SIDE_CIRCLE:
            x, chain = tau[m], 1.0
        else:
            x = geo.anti_arc_of_theta(theta[m])
            chain = geo.coeff_b(theta[m])
        sp = CubicSpline(x, g[m])
        res = max(res, float(np.max(np.abs(sp(x, 1) * chain + u[m]))))
    return res


def _trig_match(dcoef, u_samples, w_samples, tau):
    sol = integrate_sl(dcoef, 1.0, u_samples[0], w_samples[0],
                       span=dcoef.period, nsteps=len(tau))
    us = CubicSpline(sol.grid, sol.u)
    return float(np.max(np.abs(us(tau - tau[0]) - u_samples)))
