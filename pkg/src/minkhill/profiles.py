"""Unit-circle profiles of smooth strictly convex normed planes.

A profile describes the unit circle through its radial function r(theta)
(boundary point = r(theta)*(cos theta, sin theta)) together with analytic
derivatives of r up to third order.  Everything downstream (arc-length
parametrizations, dual curves, Sturm-Liouville coefficients, the Hill
coefficient) is evaluated through these derivatives, which keeps the
numerics honest near the degenerate axis points of the lp fixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

#: integration side markers for boundary arcs (see engine.py)
SIDE_CIRCLE = "circle-arc"      # integrate in arc length of the unit circle
SIDE_ANTI = "anticircle-arc"    # integrate in arc length of the anti-circle


class ProfileError(ValueError):
    """Invalid profile parameters (p <= 1, nonpositive axes, ...)."""


class NotRadonError(ValueError):
    """Raised when a Radon calibration residual exceeds tolerance."""

    def __init__(self, residual, tol):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(
            f"profile is not Radon: calibrated anti-norm deviation "
            f"{self.residual:.3e} exceeds {self.tol:.1e}"
        )


@dataclass(frozen=True)
class SymplecticForm:
    """omega(x, y) = kappa * (x1*y2 - x2*y1)."""

    kappa: float = 1.0

    def __post_init__(self):
        if self.kappa == 0 or not math.isfinite(self.kappa):
            raise ValueError("symplectic form scale must be finite and nonzero")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.kappa * (x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0])


STANDARD_FORM = SymplecticForm(1.0)


def _abs_pow_derivs(c, s, p):
    """A = |c|^p + |s|^p and d/dtheta derivatives A', A'', A''' where
    c = cos(theta), s = sin(theta).  Valid away from the axes for p < 3."""
    ac, as_ = np.abs(c), np.abs(s)
    sc, ss = np.sign(c), np.sign(s)
    A = ac**p + as_**p
    dA = p * (-s * sc * ac ** (p - 1) + c * ss * as_ ** (p - 1))
    d2A = p * (
        -c * sc * ac ** (p - 1)
        + (p - 1) * s * s * ac ** (p - 2)
        - s * ss * as_ ** (p - 1)
        + (p - 1) * c * c * as_ ** (p - 2)
    )
    d3A = p * (
        s * sc * ac ** (p - 1)
        + 3 * c * s * (p - 1) * ac ** (p - 2)
        - s**3 * (p - 1) * (p - 2) * sc * ac ** (p - 3)
        - c * ss * as_ ** (p - 1)
        - 3 * c * s * (p - 1) * as_ ** (p - 2)
        + c**3 * (p - 1) * (p - 2) * ss * as_ ** (p - 3)
    )
    return A, dA, d2A, d3A


def _lp_radial(theta, p):
    """(r, r', r'', r''') of the lp unit circle at theta."""
    c, s = np.cos(theta), np.sin(theta)
    A, dA, d2A, d3A = _abs_pow_derivs(c, s, p)
    m = -1.0 / p
    r = A**m
    r1 = m * A ** (m - 1) * dA
    r2 = m * (m - 1) * A ** (m - 2) * dA**2 + m * A ** (m - 1) * d2A
    r3 = (
        m * (m - 1) * (m - 2) * A ** (m - 3) * dA**3
        + 3 * m * (m - 1) * A ** (m - 2) * dA * d2A
        + m * A ** (m - 1) * d3A
    )
    return r, r1, r2, r3


class NormProfile:
    """Base class: radial function with derivatives, gauge, arc metadata."""

    #: default sample count used when the profile is turned into curves
    resolution = 4096
    #: parameter values (polar angle) where the boundary fails to be C^2;
    #: always arc endpoints for piecewise closed-form profiles
    singular_thetas: tuple = ()
    #: preferred integration side per boundary arc (between singular thetas)
    segment_sides: tuple = (SIDE_CIRCLE,)

    def radial(self, theta, order=0):
        """r(theta) (order=0) or the tuple (r, r', ..., r^(order))."""
        raise NotImplementedError

    def gauge(self, v):
        """The norm whose unit circle this profile describes."""
        v = np.asarray(v, dtype=float)
        theta = np.arctan2(v[..., 1], v[..., 0])
        return np.hypot(v[..., 0], v[..., 1]) / self.radial(theta)

    def gauge_grad(self, v):
        """Gradient of the gauge at v (v nonzero); radial-function default."""
        v = np.asarray(v, dtype=float)
        theta = np.arctan2(v[..., 1], v[..., 0])
        rr = self.radial(theta, order=1)
        r, r1 = rr[0], rr[1]
        mag = np.hypot(v[..., 0], v[..., 1])
        # grad(|v|) = v/|v|; grad(theta) = rot90(v)/|v|^2
        gx = v[..., 0] / (mag * r) + mag * r1 * v[..., 1] / (mag**2 * r**2)
        gy = v[..., 1] / (mag * r) - mag * r1 * v[..., 0] / (mag**2 * r**2)
        return np.stack([gx, gy], axis=-1)

    def key(self):
        """Hashable identity used for geometry caching."""
        raise NotImplementedError

    def spec(self) -> str:
        """CLI mini-language spelling of this profile."""
        raise NotImplementedError

    def __repr__(self):
        return self.spec()


class LpProfile(NormProfile):
    """Unit circle of the lp norm, 1 < p < infinity."""

    def __init__(self, p, resolution=4096):
        p = float(p)
        if not (1.0 < p < math.inf):
            raise ProfileError(f"p must exceed 1 and be finite, got {p}")
        self.p = p
        self.resolution = int(resolution)
        if p != 2.0:
            self.singular_thetas = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
            side = SIDE_CIRCLE if p > 2.0 else SIDE_ANTI
            self.segment_sides = (side,) * 4

    def radial(self, theta, order=0):
        theta = np.asarray(theta, dtype=float)
        if self.p == 2.0:
            one = np.ones_like(theta)
            vals = (one, np.zeros_like(theta), np.zeros_like(theta), np.zeros_like(theta))
        else:
            vals = _lp_radial(theta, self.p)
        return vals[0] if order == 0 else vals[: order + 1]

    def gauge(self, v):
        v = np.asarray(v, dtype=float)
        p = self.p
        return (np.abs(v[..., 0]) ** p + np.abs(v[..., 1]) ** p) ** (1.0 / p)

    def key(self):
        return ("lp", self.p, self.resolution)

    def spec(self):
        return f"lp:{self.p:g}"


class EllipseProfile(NormProfile):
    """Ellipse with semi-axes a, b; the gauge is the Minkowski functional."""

    def __init__(self, a, b, resolution=4096):
        a, b = float(a), float(b)
        if a <= 0 or b <= 0:
            raise ProfileError(f"ellipse axes must be positive, got {a}, {b}")
        self.a, self.b = a, b
        self.resolution = int(resolution)

    def radial(self, theta, order=0):
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        ia2, ib2 = self.a**-2, self.b**-2
        A = c * c * ia2 + s * s * ib2
        dA = 2 * c * s * (ib2 - ia2)
        d2A = 2 * (c * c - s * s) * (ib2 - ia2)
        d3A = -8 * c * s * (ib2 - ia2)
        m = -0.5
        r = A**m
        if order == 0:
            return r
        r1 = m * A ** (m - 1) * dA
        r2 = m * (m - 1) * A ** (m - 2) * dA**2 + m * A ** (m - 1) * d2A
        r3 = (
            m * (m - 1) * (m - 2) * A ** (m - 3) * dA**3
            + 3 * m * (m - 1) * A ** (m - 2) * dA * d2A
            + m * A ** (m - 1) * d3A
        )
        return (r, r1, r2, r3)[: order + 1]

    def gauge(self, v):
        v = np.asarray(v, dtype=float)
        return np.hypot(v[..., 0] / self.a, v[..., 1] / self.b)

    def key(self):
        return ("ellipse", self.a, self.b, self.resolution)

    def spec(self):
        return f"ellipse:{self.a:g},{self.b:g}"


class RadialFourierProfile(NormProfile):
    """r(theta) = base + sum of even-frequency cosine/sine perturbations.

    Even frequencies keep the curve centrally symmetric.  Convexity is not
    guaranteed by construction; validate_profile checks it numerically.
    """

    def __init__(self, base, terms, resolution=4096):
        base = float(base)
        if base <= 0:
            raise ProfileError(f"base radius must be positive, got {base}")
        terms = tuple((int(k), float(ca), float(sa)) for k, ca, sa in terms)
        for k, _, _ in terms:
            if k <= 0 or k % 2:
                raise ProfileError(f"frequencies must be positive even integers, got {k}")
        self.base = base
        self.terms = terms
        self.resolution = int(resolution)
        r_min = self.radial(np.linspace(0, TWO_PI, 4096, endpoint=False)).min()
        if r_min <= 0:
            raise ProfileError(f"radial function must stay positive (min {r_min:.3g})")

    def radial(self, theta, order=0):
        theta = np.asarray(theta, dtype=float)
        out = [np.full_like(theta, self.base)] + [np.zeros_like(theta) for _ in range(3)]
        for k, ca, sa in self.terms:
            kt = k * theta
            ck, sk = np.cos(kt), np.sin(kt)
            out[0] += ca * ck + sa * sk
            out[1] += k * (-ca * sk + sa * ck)
            out[2] += k * k * (-ca * ck - sa * sk)
            out[3] += k**3 * (ca * sk - sa * ck)
        return out[0] if order == 0 else tuple(out[: order + 1])

    def key(self):
        return ("fourier", self.base, self.terms, self.resolution)

    def spec(self):
        parts = [f"{self.base:g}"] + [f"{k},{ca:g},{sa:g}" for k, ca, sa in self.terms]
        return "fourier:" + ";".join(parts)


class RadonGluedProfile(NormProfile):
    """Radon curve glued from conjugate lp arcs.

    Quadrant I carries the lp arc, quadrant II the lq arc (1/p + 1/q = 1),
    quadrants III/IV follow by central symmetry.  The curve is C^1 at the
    four axis junctions with a curvature jump.
    """

    def __init__(self, p, resolution=4096):
        p = float(p)
        if p <= 1.0:
            raise ProfileError(f"p must exceed 1, got {p}")
        self.p = p
        self.q = p / (p - 1.0)
        self.resolution = int(resolution)
        self.singular_thetas = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
        # arcs alternate lp, lq, lp, lq; flat-ended arcs integrate on the
        # circle side, sharp-ended arcs on the anti-circle side
        p_side = SIDE_CIRCLE if p >= 2.0 else SIDE_ANTI
        q_side = SIDE_ANTI if p >= 2.0 else SIDE_CIRCLE
        self.segment_sides = (p_side, q_side, p_side, q_side)

    def _branch_p(self, theta):
        half = np.mod(theta, math.pi)
        return np.where(half < 0.5 * math.pi, self.p, self.q)

    def radial(self, theta, order=0):
        theta = np.asarray(theta, dtype=float)
        use_p = self._branch_p(theta) == self.p
        with np.errstate(divide="ignore", invalid="ignore"):
            vp = _lp_radial(theta, self.p)
            vq = _lp_radial(theta, self.q)
        vals = tuple(np.where(use_p, a, b) for a, b in zip(vp, vq))
        return vals[0] if order == 0 else vals[: order + 1]

    def gauge(self, v):
        v = np.asarray(v, dtype=float)
        theta = np.arctan2(v[..., 1], v[..., 0])
        pp = self._branch_p(theta)
        return (np.abs(v[..., 0]) ** pp + np.abs(v[..., 1]) ** pp) ** (1.0 / pp)

    def key(self):
        return ("radon-glued", self.p, self.resolution)

    def spec(self):
        return f"radon-glued:{self.p:g}"


class ReconstructedProfile(NormProfile):
    """Profile backed by a sampled closed curve (e.g. from reconstruction).

    The curve must be closed, centrally symmetric, positively oriented and
    strictly convex about the origin; the radial function is resampled on a
    uniform angle grid and interpolated with a periodic cubic spline.
    """

    def __init__(self, curve, resolution=4096):
        from .curves import ClosedCurve  # local import to avoid a cycle

        if not isinstance(curve, ClosedCurve):
            raise ProfileError("reconstructed profile needs a ClosedCurve")
        self.curve = curve
        self.resolution = int(resolution)
        pts = curve.points
        ang = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
        winding = (ang[-1] - ang[0] + (ang[1] - ang[0])) / TWO_PI
        if not np.all(np.diff(ang) > 0):
            # tolerate tiny nonmonotonicity from resampling noise
            if np.min(np.diff(ang)) < -1e-9:
                raise ProfileError("curve is not star-shaped about the origin")
        theta = np.linspace(0.0, TWO_PI, self.resolution, endpoint=False)
        radii = np.interp(np.mod(theta - ang[0], TWO_PI) + ang[0], ang,
                          np.hypot(pts[:, 0], pts[:, 1]))
        sym = np.abs(radii - np.roll(radii, self.resolution // 2))
        if sym.max() > 1e-6 * radii.max():
            raise ProfileError(
                f"curve is not centrally symmetric (radial asymmetry {sym.max():.2e})"
            )
        from scipy.interpolate import CubicSpline

        tgrid = np.append(theta, TWO_PI)
        self._spline = CubicSpline(tgrid, np.append(radii, radii[0]), bc_type="periodic")
        self._token = id(curve)

    def radial(self, theta, order=0):
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        if order == 0:
            return self._spline(theta)
        return tuple(self._spline(theta, k) for k in range(order + 1))

    def key(self):
        return ("reconstructed", self._token, self.resolution)

    def spec(self):
        return "reconstructed"


# ---------------------------------------------------------------------------
# boundary point and derivatives from the radial function

def boundary_point(profile, theta):
    theta = np.asarray(theta, dtype=float)
    r = profile.radial(theta)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

def boundary_derivs(profile, theta, order=1):
    """Derivatives d^kP/dtheta^k for k = 0..order (order <= 3)."""
    theta = np.asarray(theta, dtype=float)
    rs = profile.radial(theta, order=order)
    c, s = np.cos(theta), np.sin(theta)
    e = np.stack([c, s], axis=-1)
    n = np.stack([-s, c], axis=-1)
    r = rs[0]
    out = [r[..., None] * e]
    if order >= 1:
        r1 = rs[1]
        out.append(r1[..., None] * e + r[..., None] * n)
    if order >= 2:
        r2 = rs[2]
        out.append((r2 - r)[..., None] * e + (2 * rs[1])[..., None] * n)
    if order >= 3:
        r3 = rs[3]
        out.append((r3 - 3 * rs[1])[..., None] * e + (3 * rs[2] - r)[..., None] * n)
    return out


# ---------------------------------------------------------------------------
# validation

@dataclass
class ValidationReport:
    centrally_symmetric: bool
    strictly_convex: bool
    parameters_ok: bool
    symmetry_deviation: float
    min_convexity: float
    messages: tuple

    @property
    def ok(self):
        return self.centrally_symmetric and self.strictly_convex and self.parameters_ok

    def to_dict(self):
        return {
            "centrally_symmetric": self.centrally_symmetric,
            "strictly_convex": self.strictly_convex,
            "parameters_ok": self.parameters_ok,
            "symmetry_deviation": self.symmetry_deviation,
            "min_convexity": self.min_convexity,
            "messages": list(self.messages),
            "ok": self.ok,
        }


def validate_profile(profile, samples=4096) -> ValidationReport:
    """Check central symmetry and strict convexity on a sampled boundary.

    Convexity is measured by det(P', P'') > 0 on a half-offset angle grid
    (the offset avoids evaluating 0*inf forms exactly at the degenerate
    axis points of lp-type profiles).
    """
    msgs = []
    theta = (np.arange(samples) + 0.5) * (TWO_PI / samples)
    r = profile.radial(theta)
    sym_dev = float(np.max(np.abs(r - profile.radial(theta + math.pi))))
    symmetric = sym_dev <= 1e-9 * float(np.max(r))
    if not symmetric:
        msgs.append(f"central symmetry violated by {sym_dev:.3e}")
    with np.errstate(divide="ignore", invalid="ignore"):
        _, d1, d2 = boundary_derivs(profile, theta, order=2)
    conv = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    min_conv = float(np.nanmin(conv))
    convex = min_conv > 0 and np.all(np.isfinite(conv))
    if not convex:
        msgs.append(f"convexity fails: min det(P',P'') = {min_conv:.3e}")
    return ValidationReport(
        centrally_symmetric=bool(symmetric),
        strictly_convex=bool(convex),
        parameters_ok=True,
        symmetry_deviation=sym_dev,
        min_convexity=min_conv,
        messages=tuple(msgs),
    )
