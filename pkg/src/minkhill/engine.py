"""Internal geometry engine.

Builds, for a profile and symplectic form, the pair of canonical
parametrizations (arc length on the unit circle; arc length of the norm on
the anti-circle), the Sturm-Liouville and Hill coefficient data, and the
transfer-matrix integrator.

Numerical strategy, driven by the lp fixtures whose boundaries have
isolated degenerate-curvature points:

* every curve quantity is evaluated analytically from the radial function
  and its first three derivatives, composed with arc-length maps;
* arc-length maps are integrated per boundary arc under the substitution
  theta = a + (b-a)*sin^2(pi u/2), which makes the integrands smooth in u
  even when the speed has an inverse-square-root endpoint singularity, and
  are inverted by bisection to machine precision;
* the first-order system (u, w = u'/b) is integrated arc by arc, on
  whichever of the two parametrizations keeps the coefficients bounded
  (the state is parametrization-invariant, so per-arc transfer matrices
  compose exactly).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline

from .profiles import (SIDE_ANTI, SIDE_CIRCLE, STANDARD_FORM, TWO_PI,
                       boundary_derivs, boundary_point)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_THETA_EPS = 1e-12


def _dets(x, y):
    return x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0]


class _SegmentMap:
    """Cumulative integral of g(theta) over [a, b] under the sin^2 substitution.

    Supports machine-accurate pointwise evaluation and inversion even when
    g has integrable endpoint singularities up to |theta - end|^(-1/2).
    """

    def __init__(self, g, a, b, cells=1024):
        self.g, self.a, self.b = g, a, b
        u = np.linspace(0.0, 1.0, cells + 1)
        self.u_edges = u
        ua, ub = u[:-1], u[1:]
        mid, half = 0.5 * (ua + ub), 0.5 * (ub - ua)
        pts = mid[:, None] + half[:, None] * _GL_X[None, :]
        vals = self._integrand(pts.ravel()).reshape(pts.shape)
        cell = (vals * _GL_W[None, :]).sum(axis=1) * half
        self.F_edges = np.concatenate([[0.0], np.cumsum(cell)])
        self.total = float(self.F_edges[-1])

    def theta_of_u(self, u):
        return self.a + (self.b - self.a) * np.sin(0.5 * math.pi * u) ** 2

    def u_of_theta(self, theta):
        x = np.clip((theta - self.a) / (self.b - self.a), 0.0, 1.0)
        return (2.0 / math.pi) * np.arcsin(np.sqrt(x))

    def _integrand(self, u):
        th = self.theta_of_u(u)
        th = np.clip(th, self.a + _THETA_EPS, self.b - _THETA_EPS)
        dth = (self.b - self.a) * (0.5 * math.pi) * np.sin(math.pi * u)
        return self.g(th) * dth

    def value(self, u):
        """F(u), vectorized."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        idx = np.clip(np.searchsorted(self.u_edges, u) - 1, 0, len(self.u_edges) - 2)
        ua = self.u_edges[idx]
        mid, half = 0.5 * (ua + u), 0.5 * (u - ua)
        pts = mid[:, None] + half[:, None] * _GL_X[None, :]
        vals = self._integrand(pts.ravel()).reshape(pts.shape)
        return self.F_edges[idx] + (vals * _GL_W[None, :]).sum(axis=1) * half

    def invert(self, targets):
        """u with F(u) = target; bisection (F is strictly increasing)."""
        t = np.clip(np.atleast_1d(np.asarray(targets, dtype=float)), 0.0, self.total)
        lo, hi = np.zeros_like(t), np.ones_like(t)
        for _ in range(52):
            mid = 0.5 * (lo + hi)
            below = self.value(mid) < t
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def theta_at(self, targets):
        return self.theta_of_u(self.invert(targets))


class _Segment:
    """One boundary arc with both arc-length maps and its regular side."""

    def __init__(self, geometry, th0, th1, side, cells):
        self.geo = geometry
        self.th0, self.th1, self.side = th0, th1, side
        self.map_circle = _SegmentMap(geometry._circle_speed, th0, th1, cells)
        self.map_anti = _SegmentMap(geometry._anti_speed, th0, th1, cells)
        self.circle_len = self.map_circle.total
        self.anti_len = self.map_anti.total
        self._tables = {}

    def tables(self, nsteps):
        """(cu, cw0, span): coefficients of u' = cu*w, w' = -lam*cw0*u at
        2*nsteps+1 equispaced points of the regular-side parameter."""
        tab = self._tables.get(nsteps)
        if tab is not None:
            return tab
        if self.side == SIDE_CIRCLE:
            span = self.circle_len
            th = self.map_circle.theta_at(np.linspace(0.0, span, 2 * nsteps + 1))
            th = np.clip(th, self.th0 + _THETA_EPS, self.th1 - _THETA_EPS)
            cu = self.geo.coeff_b(th)
            cw0 = self.geo.coeff_a(th)
        else:
            span = self.anti_len
            th = self.map_anti.theta_at(np.linspace(0.0, span, 2 * nsteps + 1))
            th = np.clip(th, self.th0 + _THETA_EPS, self.th1 - _THETA_EPS)
            cu = np.ones(2 * nsteps + 1)
            cw0 = self.geo.hill_f(th)
        tab = (cu, cw0, span)
        self._tables[nsteps] = tab
        return tab

    def anti_of_circle(self, rel_circle):
        """Anti-arc position corresponding to a circle-arc position (both
        relative to the segment start), through the shared u variable."""
        return self.map_anti.value(self.map_circle.invert(rel_circle))

    def circle_of_anti(self, rel_anti):
        return self.map_circle.value(self.map_anti.invert(rel_anti))


def _rk4_batch(cu, cw0, lams, span, Y, collect=False):
    """March Y through the tabulated system; Y has shape (..., 2, m).

    lams broadcasts against Y's leading axes; collect returns the state at
    every node (nsteps+1 entries).
    """
    nsteps = (len(cu) - 1) // 2
    h = span / nsteps
    lam = np.asarray(lams, dtype=float)
    out = [Y] if collect else None

    def rhs(j, Z):
        u, w = Z[..., 0, :], Z[..., 1, :]
        du = cu[j] * w
        dw = -(lam[..., None] if lam.ndim else lam) * cw0[j] * u
        return np.stack([du, dw], axis=-2)

    for i in range(nsteps):
        k1 = rhs(2 * i, Y)
        k2 = rhs(2 * i + 1, Y + 0.5 * h * k1)
        k3 = rhs(2 * i + 1, Y + 0.5 * h * k2)
        k4 = rhs(2 * i + 2, Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if collect:
            out.append(Y)
    return (Y, np.stack(out)) if collect else (Y, None)


class PlaneGeometry:
    """All derived geometry for one (profile, form) pair."""

    def __init__(self, profile, form=STANDARD_FORM, map_cells=1024):
        self.profile = profile
        self.form = form
        self.kappa = form.kappa
        sing = sorted(set(profile.singular_thetas))
        if sing:
            breaks = sorted(set(sing) | {0.0, math.pi})
            if breaks[0] != 0.0:
                raise ValueError("singular parameters must include theta = 0")
        else:
            breaks = [0.0, math.pi]
        sides = list(profile.segment_sides)
        self.segments = []
        all_breaks = breaks + [breaks[0] + TWO_PI]
        n_sing = max(len(sing), 1)
        for i, (a, b) in enumerate(zip(all_breaks[:-1], all_breaks[1:])):
            if sing:
                # side follows the arc (between singular thetas) containing [a,b]
                k = int(np.searchsorted(np.asarray(sing), a + 1e-9)) - 1
                side = sides[k % len(sides)]
            else:
                side = sides[0]
            self.segments.append(_Segment(self, a, b, side, map_cells))
        self.circle_breaks = np.concatenate(
            [[0.0], np.cumsum([s.circle_len for s in self.segments])])
        self.anti_breaks = np.concatenate(
            [[0.0], np.cumsum([s.anti_len for s in self.segments])])
        self.circumference = float(self.circle_breaks[-1])
        self.anti_length = float(self.anti_breaks[-1])
        self.half_circumference = 0.5 * self.circumference
        self._cache = {}

    # -- analytic theta-level evaluators ------------------------------------

    def _clamp(self, theta):
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        for s in self.profile.singular_thetas:
            for base in (s, s + TWO_PI, s - TWO_PI):
                near = np.abs(theta - base) < _THETA_EPS
                if np.any(near):
                    theta = np.where(near, base + _THETA_EPS, theta)
        return theta

    def _circle_speed(self, theta):
        d = boundary_derivs(self.profile, theta, order=1)[1]
        return self.profile.gauge(d)

    def _anti_speed(self, theta):
        p0, p1, p2 = boundary_derivs(self.profile, theta, order=2)
        d1 = _dets(p0, p1)
        d3 = _dets(p1, p2)
        return d3 / (self.kappa * d1 * d1)

    def coeff_a(self, theta):
        """a = omega(phi, phi') with phi in circle arc length."""
        p0, p1 = boundary_derivs(self.profile, theta, order=1)
        return self.kappa * _dets(p0, p1) / self.profile.gauge(p1)

    def coeff_b(self, theta):
        """b = omega(psi, psi') = |psi'| with the circle arc parameter."""
        return self._anti_speed(theta) / self._circle_speed(theta)

    def hill_f(self, theta):
        """Hill coefficient f = a/b = kappa^2 det(P,P')^3 / det(P',P'')."""
        p0, p1, p2 = boundary_derivs(self.profile, theta, order=2)
        d1 = _dets(p0, p1)
        d3 = _dets(p1, p2)
        return self.kappa**2 * d1**3 / d3

    def circle_point(self, theta):
        return boundary_point(self.profile, theta)

    def circle_tangent(self, theta):
        """Unit-norm tangent of the circle (the derivative in arc length)."""
        d = boundary_derivs(self.profile, theta, order=1)[1]
        return d / self.profile.gauge(d)[..., None]

    def psi_point(self, theta):
        """Dual point psi = phi'/omega(phi, phi') on the anti-circle."""
        p0, p1 = boundary_derivs(self.profile, theta, order=1)
        return p1 / (self.kappa * _dets(p0, p1))[..., None]

    def _psi_theta_derivs(self, theta, order=2):
        """d psi/d theta and optionally d^2 psi/d theta^2."""
        p = boundary_derivs(self.profile, theta, order=order + 1)
        p0, p1, p2 = p[0], p[1], p[2]
        d1, d2 = _dets(p0, p1), _dets(p0, p2)
        k = self.kappa
        dpsi = p2 / (k * d1)[..., None] - p1 * (d2 / (k * d1**2))[..., None]
        if order == 1:
            return (dpsi,)
        p3 = p[3]
        d3, d4 = _dets(p1, p2), _dets(p0, p3)
        d2psi = (
            p3 / (k * d1)[..., None]
            - 2 * p2 * (d2 / (k * d1**2))[..., None]
            - p1 * (((d3 + d4) * d1 - 2 * d2**2) / (k * d1**3))[..., None]
        )
        return dpsi, d2psi

    def psi_unit_tangent(self, theta):
        """d psi/dt: unit-norm tangent of the anti-circle."""
        (dpsi,) = self._psi_theta_derivs(theta, order=1)
        return dpsi / self._anti_speed(theta)[..., None]

    def psi_second(self, theta):
        """d^2 psi/dt^2 (unbounded near sharp points; callers sample off-node)."""
        dpsi, d2psi = self._psi_theta_derivs(theta, order=2)
        ts = self._anti_speed(theta)
        p = boundary_derivs(self.profile, theta, order=3)
        dts = _dets(p[1], p[3]) / (self.kappa * _dets(p[0], p[1]) ** 2) - \
            2 * _dets(p[1], p[2]) * _dets(p[0], p[2]) / (self.kappa * _dets(p[0], p[1]) ** 3)
        psi_t = dpsi / ts[..., None]
        return (d2psi - psi_t * dts[..., None]) / (ts**2)[..., None]

    # -- arc-length maps -----------------------------------------------------

    def _theta_of(self, values, breaks, attr):
        vals = np.mod(np.atleast_1d(np.asarray(values, dtype=float)), breaks[-1])
        out = np.empty_like(vals)
        idx = np.clip(np.searchsorted(breaks, vals, side="right") - 1,
                      0, len(self.segments) - 1)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if mask.any():
                out[mask] = getattr(seg, attr).theta_at(vals[mask] - breaks[i])
        return out

    def theta_of_circle_arc(self, tau):
        return self._theta_of(tau, self.circle_breaks, "map_circle")

    def theta_of_anti_arc(self, t):
        return self._theta_of(t, self.anti_breaks, "map_anti")

    def circle_arc_of_theta(self, theta):
        theta = np.mod(np.atleast_1d(np.asarray(theta, dtype=float)), TWO_PI)
        idx = np.clip(np.searchsorted([s.th0 for s in self.segments], theta + 1e-15) - 1,
                      0, len(self.segments) - 1)
        out = np.empty_like(theta)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if mask.any():
                u = seg.map_circle.u_of_theta(theta[mask])
                out[mask] = self.circle_breaks[i] + seg.map_circle.value(u)
        return out

    def anti_arc_of_theta(self, theta):
        theta = np.mod(np.atleast_1d(np.asarray(theta, dtype=float)), TWO_PI)
        idx = np.clip(np.searchsorted([s.th0 for s in self.segments], theta + 1e-15) - 1,
                      0, len(self.segments) - 1)
        out = np.empty_like(theta)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if mask.any():
                u = seg.map_anti.u_of_theta(theta[mask])
                out[mask] = self.anti_breaks[i] + seg.map_anti.value(u)
        return out

    # -- sampled arrays (cached) ---------------------------------------------

    def sl_arrays(self, n=None):
        """Uniform circle-arc grid with coefficient samples.

        b is sampled as gauge(spline'(psi)) so the values stay nonnegative
        at the isolated parameters where the exact b vanishes.
        """
        n = n or self.profile.resolution
        key = ("sl", n)
        if key in self._cache:
            return self._cache[key]
        T = self.circumference
        tau = np.arange(n) * (T / n)
        theta = self._clamp(self.theta_of_circle_arc(tau))
        phi = self.circle_point(theta)
        dphi = self.circle_tangent(theta)
        a = self.coeff_a(theta)
        psi = self.psi_point(theta)
        tgrid = np.append(tau, T)
        spl = CubicSpline(tgrid, np.vstack([psi, psi[:1]]), bc_type="periodic")
        b = self.profile.gauge(spl(tau, 1))
        out = dict(tau=tau, theta=theta, phi=phi, dphi=dphi, a=a, b=b, psi=psi,
                   period=T, half=self.half_circumference)
        self._cache[key] = out
        return out

    def hill_arrays(self, n=None):
        """Half-offset anti-arc grid with psi, its unit tangent and f samples."""
        n = n or self.profile.resolution
        key = ("hill", n)
        if key in self._cache:
            return self._cache[key]
        L = self.anti_length
        t = (np.arange(n) + 0.5) * (L / n)
        theta = self._clamp(self.theta_of_anti_arc(t))
        psi = self.psi_point(theta)
        dpsi = self.psi_unit_tangent(theta)
        f = self.hill_f(theta)
        out = dict(t=t, theta=theta, psi=psi, dpsi=dpsi, f=f, L=L, c=0.5 * L)
        self._cache[key] = out
        return out

    def hill_spikes(self):
        """Anti-arc positions of the boundary's degenerate-curvature points."""
        if not self.profile.singular_thetas:
            return ()
        return tuple(float(x) for x in self.anti_breaks[:-1])

    def psi_dense_spline(self, n=8192):
        key = ("psispline", n)
        if key in self._cache:
            return self._cache[key]
        L = self.anti_length
        t = np.arange(n) * (L / n)
        psi = self.psi_point(self._clamp(self.theta_of_anti_arc(t)))
        spl = CubicSpline(np.append(t, L), np.vstack([psi, psi[:1]]),
                          bc_type="periodic")
        self._cache[key] = spl
        return spl

    # -- transfer matrices and solutions --------------------------------------

    def _segment_steps(self, seg, nsteps_total):
        return max(16, int(round(nsteps_total * seg.circle_len / self.circumference)))

    def transfer(self, lams, nsteps=4096, half=True):
        """Transfer matrices of (u, u'/b) over the half (or full) period.

        Returns shape (k, 2, 2) for a length-k array of eigenvalue
        parameters (columns are the solutions with initial data (1,0) and
        (0,1)).
        """
        lam = np.atleast_1d(np.asarray(lams, dtype=float))
        Y = np.broadcast_to(np.eye(2), (len(lam), 2, 2)).copy()
        theta_stop = math.pi if half else TWO_PI
        for seg in self.segments:
            if seg.th0 >= theta_stop - 1e-12:
                break
            cu, cw0, span = seg.tables(self._segment_steps(seg, nsteps))
            Y, _ = _rk4_batch(cu, cw0, lam, span, Y)
        return Y

    def solve_on_circle_grid(self, lam, init, n=None, nsteps=None):
        """Solution states sampled on the uniform circle-arc grid.

        init has shape (2, m) (columns of initial (u, w)); returns
        (tau_grid, states) with states of shape (n+1, 2, m), the last entry
        at tau = period.
        """
        n = n or self.profile.resolution
        nsteps = nsteps or n
        sl = self.sl_arrays(n)
        tau = np.append(sl["tau"], sl["period"])
        states = np.empty((n + 1, 2, init.shape[1]))
        Y = np.asarray(init, dtype=float)
        pos = 0
        lam_s = float(lam)
        for i, seg in enumerate(self.segments):
            nst = self._segment_steps(seg, nsteps)
            cu, cw0, span = seg.tables(nst)
            Yend, nodes = _rk4_batch(cu, cw0, lam_s, span, Y, collect=True)
            # resample node states onto the public grid inside this segment
            lo, hi = self.circle_breaks[i], self.circle_breaks[i + 1]
            mask = (tau >= lo - 1e-12) & (tau <= hi + 1e-12)
            want = tau[mask]
            side_pos = np.linspace(0.0, span, nst + 1)
            rel = np.clip(want - lo, 0.0, seg.circle_len)
            if seg.side == SIDE_CIRCLE:
                xq = rel
            else:
                xq = seg.anti_of_circle(rel)
            interp = CubicSpline(side_pos, nodes.reshape(nst + 1, -1))
            states[mask] = interp(np.clip(xq, 0.0, span)).reshape(-1, 2, init.shape[1])
            Y = Yend
            pos = hi
        states[-1] = Y
        return tau, states

    # -- tangent advance (anti-circle) ----------------------------------------

    def tangent_advance(self, t_values, spline_n=8192):
        """For each t, the least s > 0 with psi(t+s) parallel to psi'(t) and
        equally oriented; root-found on a dense spline of the anti-circle."""
        t_values = np.atleast_1d(np.asarray(t_values, dtype=float))
        L = self.anti_length
        spl = self.psi_dense_spline(spline_n)
        theta = self._clamp(self.theta_of_anti_arc(t_values))
        d = self.psi_unit_tangent(theta)

        def g(s):
            p = spl(np.mod(t_values + s, L))
            return p[:, 0] * d[:, 1] - p[:, 1] * d[:, 0]

        K = 1024
        offs = (np.arange(K) + 0.5) * (L / K)
        vals = np.empty((K, len(t_values)))
        for j, s in enumerate(offs):
            vals[j] = g(np.full(len(t_values), s))
        neg = vals < 0
        first = neg.argmax(axis=0)
        lo = np.where(first == 0, offs[0] * 0.5, offs[np.maximum(first - 1, 0)])
        hi = offs[first]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            pos = g(mid) > 0
            lo = np.where(pos, mid, lo)
            hi = np.where(pos, hi, mid)
        return 0.5 * (lo + hi)


_GEOMETRY_CACHE = {}


def geometry_for(profile, form=STANDARD_FORM) -> PlaneGeometry:
    key = (profile.key(), form.kappa)
    geo = _GEOMETRY_CACHE.get(key)
    if geo is None:
        geo = PlaneGeometry(profile, form)
        if len(_GEOMETRY_CACHE) > 32:
            _GEOMETRY_CACHE.clear()
        _GEOMETRY_CACHE[key] = geo
    return geo
