"""Floquet analysis of the cycloid equation: monodromy, discriminant,
eigenvalue search with parity classification and doubling detection."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cycloid import SLCoefficients, SLSolution, integrate_sl

PERIODIC = "periodic"
ANTIPERIODIC = "antiperiodic"

#: matrix-distance threshold certifying a double eigenvalue (M = +-I)
DOUBLE_TOL = 1e-5


class NoEigenfunctionError(ValueError):
    pass


@dataclass(frozen=True)
class Monodromy:
    """Transfer matrix of (u, u'/b) over half the period at one eigenvalue."""

    m11: float
    m12: float
    m21: float
    m22: float
    lam: float

    @property
    def matrix(self):
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def trace(self):
        return self.m11 + self.m22

    @property
    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    def distance_to(self, sign):
        return float(np.linalg.norm(self.matrix - sign * np.eye(2)))


def _transfer_batch(coeffs: SLCoefficients, lams, nsteps=None):
    """Half-period transfer matrices for an array of eigenvalue parameters."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if coeffs.geometry is not None:
        n = nsteps or len(coeffs.a.grid)
        return coeffs.geometry.transfer(lams, nsteps=n, half=True)
    n = nsteps or len(coeffs.a.grid)
    half = coeffs.half_period
    steps = max(32, n // 2)
    h = half / steps
    xs = np.linspace(0.0, half, 2 * steps + 1)
    av = coeffs.a(np.mod(xs, coeffs.period))
    bv = coeffs.b(np.mod(xs, coeffs.period))
    Y = np.broadcast_to(np.eye(2), (len(lams), 2, 2)).copy()

    def rhs(j, Z):
        u, w = Z[:, 0, :], Z[:, 1, :]
        return np.stack([bv[j] * w, -lams[:, None] * av[j] * u], axis=1)

    for i in range(steps):
        k1 = rhs(2 * i, Y)
        k2 = rhs(2 * i + 1, Y + 0.5 * h * k1)
        k3 = rhs(2 * i + 1, Y + 0.5 * h * k2)
        k4 = rhs(2 * i + 2, Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(Y)):
            raise RuntimeError("monodromy integration blew up")
    return Y


def monodromy(coeffs: SLCoefficients, lam, nsteps=None) -> Monodromy:
    """Columns are the half-period states of the solutions from (1,0), (0,1)."""
    M = _transfer_batch(coeffs, [float(lam)], nsteps)[0]
    return Monodromy(M[0, 0], M[0, 1], M[1, 0], M[1, 1], float(lam))


def discriminant(coeffs: SLCoefficients, lam, nsteps=None) -> float:
    """Trace of the monodromy; +2 marks periodic, -2 antiperiodic eigenvalues."""
    return monodromy(coeffs, lam, nsteps).trace


@dataclass
class SpectrumEntry:
    lam: float
    parity: str
    double: bool
    residual: float
    unresolved: bool = False

    def to_dict(self):
        return {"lambda": self.lam, "parity": self.parity, "double": self.double,
                "residual": self.residual, "unresolved": self.unresolved}


@dataclass
class Spectrum:
    entries: list = field(default_factory=list)

    def lams(self):
        return np.array([e.lam for e in self.entries])

    def to_json(self):
        return json.dumps({"entries": [e.to_dict() for e in self.entries]},
                          indent=2, sort_keys=True)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("lambda,parity,double,residual,unresolved\n")
            for e in self.entries:
                fh.write(f"{e.lam:.17g},{e.parity},{int(e.double)},"
                         f"{e.residual:.17g},{int(e.unresolved)}\n")

    def doubles(self):
        return [e for e in self.entries if e.double]


def _bisect_root(fun, lo, hi, flo, iters=60):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _refine_extremum(fun, lo, hi, iters=80):
    """Golden-section minimizer of fun on [lo, hi]."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(iters):
        c = hi - g * (hi - lo)
        d = lo + g * (hi - lo)
        if fun(c) > fun(d):
            lo = c
        else:
            hi = d
    return 0.5 * (lo + hi)


def _disc_batch(coeffs, lams, nsteps):
    M = _transfer_batch(coeffs, lams, nsteps)
    return M[:, 0, 0] + M[:, 1, 1]


def find_eigenvalues(coeffs: SLCoefficients, lambda_max, grid=2000,
                     nsteps=None) -> Spectrum:
    """Scan the discriminant for periodic (+2) and antiperiodic (-2) hits.

    Sign changes are bisected; near-tangencies are refined as extrema and
    certified double via the matrix test ||M -+ I|| < DOUBLE_TOL.  An
    extremum that comes close to +-2 without either crossing or passing
    the matrix test is reported with unresolved=True.  All refinements
    run in lockstep batches.
    """
    if lambda_max <= 1:
        raise ValueError("lambda_max must exceed 1")
    lams = np.linspace(lambda_max / grid, lambda_max, grid)
    traces = _disc_batch(coeffs, lams, nsteps)

    entries = [SpectrumEntry(0.0, PERIODIC, False, 0.0)]
    for target, parity in ((2.0, PERIODIC), (-2.0, ANTIPERIODIC)):
        gvals = traces - target
        cross_lo, cross_hi, cross_sign = [], [], []
        tang_lo, tang_hi = [], []
        for i in range(len(lams) - 1):
            if gvals[i] * gvals[i + 1] < 0 or gvals[i] == 0.0:
                cross_lo.append(lams[i])
                cross_hi.append(lams[i + 1])
                cross_sign.append(gvals[i] if gvals[i] != 0 else -gvals[i + 1])
        absg = np.abs(gvals)
        for i in range(1, len(lams) - 1):
            if absg[i] <= absg[i - 1] and absg[i] <= absg[i + 1] and absg[i] < 0.5:
                if gvals[i - 1] * gvals[i] < 0 or gvals[i] * gvals[i + 1] < 0:
                    continue  # handled as a crossing
                tang_lo.append(lams[i - 1])
                tang_hi.append(lams[i + 1])
        found = []
        if cross_lo:
            lo = np.array(cross_lo)
            hi = np.array(cross_hi)
            slo = np.array(cross_sign)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                gm = _disc_batch(coeffs, mid, nsteps) - target
                same = (gm > 0) == (slo > 0)
                lo = np.where(same, mid, lo)
                hi = np.where(same, hi, mid)
                slo = np.where(same, gm, slo)
            found.extend(0.5 * (lo + hi))
        tangencies = []
        if tang_lo:
            lo = np.array(tang_lo)
            hi = np.array(tang_hi)
            g = (math.sqrt(5.0) - 1.0) / 2.0
            for _ in range(60):
                c = hi - g * (hi - lo)
                d = lo + g * (hi - lo)
                fc = np.abs(_disc_batch(coeffs, c, nsteps) - target)
                fd = np.abs(_disc_batch(coeffs, d, nsteps) - target)
                lo = np.where(fc > fd, c, lo)
                hi = np.where(fc > fd, hi, d)
            tangencies = list(0.5 * (lo + hi))
        for lam in tangencies:
            M = monodromy(coeffs, lam, nsteps)
            gmin = M.trace - target
            dist = M.distance_to(np.sign(target))
            if dist < DOUBLE_TOL:
                entries.append(SpectrumEntry(float(lam), parity, True, abs(gmin)))
            elif abs(gmin) < 1e-6:
                entries.append(SpectrumEntry(float(lam), parity, False, abs(gmin),
                                             unresolved=True))
        for lam in found:
            M = monodromy(coeffs, lam, nsteps)
            dist = M.distance_to(np.sign(target))
            entries.append(SpectrumEntry(float(lam), parity,
                                         bool(dist < DOUBLE_TOL),
                                         abs(M.trace - target)))
    # merge duplicates (a double found twice, or bisection twins)
    entries.sort(key=lambda e: e.lam)
    merged = []
    for e in entries:
        if merged and abs(e.lam - merged[-1].lam) < 1e-8 and e.parity == merged[-1].parity:
            keep = merged[-1]
            keep.double = keep.double or e.double
            keep.residual = min(keep.residual, e.residual)
            continue
        merged.append(e)
    return Spectrum(entries=merged)


def eigenfunction(coeffs: SLCoefficients, lam, parity, n=None,
                  tol=1e-6) -> list:
    """Solutions satisfying the half-period boundary condition at lam.

    Returns one SLSolution, or a basis of two when the eigenvalue is
    double, normalized to max|u| = 1.
    """
    if parity not in (PERIODIC, ANTIPERIODIC):
        raise ValueError(f"parity must be '{PERIODIC}' or '{ANTIPERIODIC}'")
    sign = 1.0 if parity == PERIODIC else -1.0
    M = monodromy(coeffs, lam)
    B = M.matrix - sign * np.eye(2)
    _, svals, vt = np.linalg.svd(B)
    if svals[-1] > tol * max(1.0, np.linalg.norm(M.matrix)):
        raise NoEigenfunctionError(
            f"lambda={lam} is not a {parity} eigenvalue "
            f"(boundary defect {svals[-1]:.3e})")
    double = svals[0] < DOUBLE_TOL
    inits = [np.array([1.0, 0.0]), np.array([0.0, 1.0])] if double else [vt[-1]]
    out = []
    for init in inits:
        sol = integrate_sl(coeffs, lam, init[0], init[1], span=coeffs.period)
        scale = np.max(np.abs(sol.u))
        out.append(SLSolution(grid=sol.grid, u=sol.u / scale, w=sol.w / scale,
                              lam=float(lam), period=sol.period,
                              error_estimate=sol.error_estimate / scale))
    return out


def eigenvalue_gap_sweep(coeffs_by_name, lambda_max=8.0, grid=1200):
    """Numerical sweep for the doubling question: per problem, the minimal
    gap between eigenvalue pairs above 1.  Measures only, asserts nothing."""
    out = {}
    for name, coeffs in coeffs_by_name.items():
        spec = find_eigenvalues(coeffs, lambda_max, grid)
        above = [e for e in spec.entries if e.lam > 1.0 + 1e-6]
        gaps = []
        i = 0
        while i < len(above):
            if above[i].double:
                gaps.append(0.0)
                i += 1
            elif i + 1 < len(above) and above[i + 1].parity == above[i].parity:
                gaps.append(above[i + 1].lam - above[i].lam)
                i += 2
            else:
                i += 1
        out[name] = {"min_gap": min(gaps) if gaps else float("nan"),
                     "pairs": len(gaps)}
    return out
