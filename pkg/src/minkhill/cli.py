"""Command line interface.

Commands: info, spectrum, reconstruct, plot, cycloid.  Profiles use the
mini-language lp:<p> | ellipse:<a>,<b> | fourier:<base>;<freq>,<ca>,<sa>;...
| radon-glued:<p> | file:<path> (CSV of boundary samples t,x,y).

Exit codes: 0 success or verdict, 2 usage/parse error, 3 numeric failure,
4 domain lookup failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .curves import (ClosedCurve, ScalarPeriodic, antinorm_arclength_param,
                     boundary_curve, circle_length)
from .cycloid import cycloid_from_radius, sl_coefficients
from .exprs import ExprError, compile_expression
from .hill import HillCoefficient, diagnostics, hill_from_geometry, reconstruct_geometry
from .normcore import calibrate_radon_scale, validate_profile
from .profiles import (EllipseProfile, LpProfile, NotRadonError, ProfileError,
                       RadialFourierProfile, RadonGluedProfile,
                       ReconstructedProfile, STANDARD_FORM)
from .spectral import find_eigenvalues
from .svg import SvgCanvas

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_DOMAIN = 4


class SpecError(ValueError):
    pass


def parse_profile(spec, resolution=4096):
    """Parse the profile mini-language."""
    try:
        kind, _, rest = spec.partition(":")
        if kind == "lp":
            p = float(rest)
            if p <= 1:
                raise SpecError("p must exceed 1")
            return LpProfile(p, resolution)
        if kind == "ellipse":
            a, b = (float(x) for x in rest.split(","))
            return EllipseProfile(a, b, resolution)
        if kind == "fourier":
            parts = rest.split(";")
            base = float(parts[0])
            terms = []
            for part in parts[1:]:
                if not part:
                    continue
                k, ca, sa = part.split(",")
                terms.append((int(k), float(ca), float(sa)))
            return RadialFourierProfile(base, terms, resolution)
        if kind == "radon-glued":
            p = float(rest)
            if p <= 1:
                raise SpecError("p must exceed 1")
            return RadonGluedProfile(p, resolution)
        if kind == "file":
            data = np.loadtxt(rest, delimiter=",", skiprows=1)
            period = data[-1, 0] + (data[1, 0] - data[0, 0])
            curve = ClosedCurve(period=period, grid=data[:, 0], points=data[:, 1:3])
            return ReconstructedProfile(curve, resolution)
        raise SpecError(f"unknown profile kind {kind!r}")
    except (ValueError, OSError, ProfileError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc)) from exc


def _resolution(value):
    n = int(value)
    if n < 256 or n & (n - 1):
        raise argparse.ArgumentTypeError("resolution must be a power of two >= 256")
    return n


def _out(args, name):
    os.makedirs(args.output, exist_ok=True)
    return os.path.join(args.output, name)


def cmd_info(args):
    profile = parse_profile(args.profile, args.resolution)
    report = validate_profile(profile)
    length = circle_length(profile)
    try:
        cal = calibrate_radon_scale(profile)
        radon_cal = {"kappa": cal.form.kappa, "residual": cal.residual}
    except NotRadonError as exc:
        radon_cal = {"kappa": None, "residual": exc.residual}
    diag = diagnostics(profile)
    payload = {
        "profile": profile.spec(),
        "validation": report.to_dict(),
        "circumference": length.length,
        "half_circumference": length.half,
        "radon_calibration": radon_cal,
        "diagnostics": diag.to_dict(),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_spectrum(args):
    profile = parse_profile(args.profile, args.resolution)
    if args.lambda_max <= 1:
        raise SpecError("--lambda-max must exceed 1")
    coeffs = sl_coefficients(profile)
    try:
        spec = find_eigenvalues(coeffs, args.lambda_max, grid=args.grid)
    except RuntimeError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.csv:
        spec.to_csv(_out(args, "spectrum.csv"))
    if args.svg:
        lams = np.linspace(args.lambda_max / 400, args.lambda_max, 400)
        from .spectral import _transfer_batch

        Ms = _transfer_batch(coeffs, lams)
        traces = Ms[:, 0, 0] + Ms[:, 1, 1]
        canvas = SvgCanvas(0.0, args.lambda_max, -3.2, 3.2)
        canvas.axes()
        canvas.line((0.0, 2.0), (args.lambda_max, 2.0), color="#bbbbbb")
        canvas.line((0.0, -2.0), (args.lambda_max, -2.0), color="#bbbbbb")
        canvas.path(np.stack([lams, np.clip(traces, -3.2, 3.2)], axis=-1),
                    color="#003366", closed=False)
        canvas.write(_out(args, "discriminant.svg"))
    print(spec.to_json())
    return EXIT_OK


def _coefficient_from_args(args):
    if args.expr:
        try:
            fn = compile_expression(args.expr)
        except ExprError as exc:
            raise SpecError(f"bad expression: {exc}") from exc
        c = args.c
        if c is None:
            raise SpecError("--c is required with --expr")
        n = args.resolution
        grid = (np.arange(n) + 0.5) * (2 * c / n)
        vals = fn(grid)
        f = ScalarPeriodic(period=2 * c, grid=grid, values=vals,
                           fn=lambda t: fn(np.mod(t, 2 * c)))
        return HillCoefficient(f=f, c=c)
    if args.samples:
        data = np.loadtxt(args.samples, delimiter=",", skiprows=1)
        t, vals = data[:, 0], data[:, 1]
        period = t[-1] + (t[1] - t[0])
        f = ScalarPeriodic(period=period, grid=t, values=vals)
        return HillCoefficient(f=f, c=0.5 * period)
    raise SpecError("need --expr or --samples")


def cmd_reconstruct(args):
    coef = _coefficient_from_args(args)
    report = reconstruct_geometry(coef)
    print(report.to_json())
    if report.accepted:
        report.psi.to_csv(_out(args, "anticircle.csv"))
        report.phi.to_csv(_out(args, "circle.csv"))
        if args.svg:
            lim = 1.1 * float(np.max(np.abs(np.concatenate(
                [report.psi.points, report.phi.points]))))
            canvas = SvgCanvas(-lim, lim, -lim, lim)
            canvas.axes()
            canvas.path(report.phi.points, color="#003366")
            canvas.path(report.psi.points, color="#990000")
            canvas.write(_out(args, "reconstruction.svg"))
    return EXIT_OK


def cmd_plot(args):
    profile = parse_profile(args.profile, args.resolution)
    circle = boundary_curve(profile, min(args.resolution, 1024))
    anti = antinorm_arclength_param(profile, n=min(args.resolution, 1024))
    shows = set(args.show.split(",")) if args.show else {"circle"}
    lim = 1.1 * max(float(np.max(np.abs(circle.points))),
                    float(np.max(np.abs(anti.points))))
    canvas = SvgCanvas(-lim, lim, -lim, lim)
    canvas.axes()
    payload = {"profile": profile.spec()}
    if "circle" in shows or "anticircle" in shows:
        canvas.path(circle.points, color="#003366")
        circle.to_csv(_out(args, "circle.csv"))
    if "anticircle" in shows:
        canvas.path(anti.points, color="#990000")
        anti.to_csv(_out(args, "anticircle.csv"))
        dev = float(np.max(np.abs(profile.gauge(anti.points) - 1.0)))
        payload["anticircle_gauge_deviation"] = dev
    canvas.write(_out(args, "plot.svg"))
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_cycloid(args):
    profile = parse_profile(args.profile, args.resolution)
    coeffs = sl_coefficients(profile)
    spec = find_eigenvalues(coeffs, max(10.0, args.lam * 1.5 + 1.0), grid=1500)
    lams = spec.lams()
    hit = np.where(np.abs(lams - args.lam) <= args.lambda_tol)[0]
    if len(hit) == 0:
        below = lams[lams < args.lam]
        above = lams[lams > args.lam]
        sugg = []
        if len(below):
            sugg.append(float(below[-1]))
        if len(above):
            sugg.append(float(above[0]))
        print(f"lambda = {args.lam} is not an eigenvalue; nearest: {sugg}",
              file=sys.stderr)
        return EXIT_DOMAIN
    entry = spec.entries[int(hit[0])]
    from .spectral import eigenfunction

    sols = eigenfunction(coeffs, entry.lam, entry.parity)
    sl = coeffs.geometry.sl_arrays(len(coeffs.a.grid))
    phi = ClosedCurve(period=sl["period"], grid=sl["tau"], points=sl["phi"],
                      deriv_samples=sl["dphi"])
    result = cycloid_from_radius(sols[0], phi)
    payload = {
        "profile": profile.spec(),
        "lambda": entry.lam,
        "parity": entry.parity,
        "double": entry.double,
        "closure_gap": result.closure_gap,
    }
    result.curve.to_csv(_out(args, "cycloid.csv"))
    lim = 1.1 * max(1.0, float(np.max(np.abs(result.curve.points))))
    canvas = SvgCanvas(-lim, lim, -lim, lim)
    canvas.axes()
    canvas.path(phi.points, color="#bbbbbb")
    canvas.path(result.curve.points, color="#003366")
    canvas.write(_out(args, "cycloid.svg"))
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="minkhill",
                                 description="Normed-plane geometry and its "
                                             "Sturm-Liouville/Hill spectra")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, profile=True):
        if profile:
            p.add_argument("--profile", required=True)
        p.add_argument("--resolution", type=_resolution, default=4096)
        p.add_argument("--output", default=".")
        p.add_argument("--csv", action="store_true")
        p.add_argument("--json", action="store_true")
        p.add_argument("--svg", action="store_true")

    p = sub.add_parser("info", help="validation, length, calibration, diagnostics")
    common(p)
    p.set_defaults(fn=cmd_info)

    p = sub.add_parser("spectrum", help="eigenvalue ladder")
    common(p)
    p.add_argument("--lambda-max", dest="lambda_max", type=float, default=10.0)
    p.add_argument("--grid", type=int, default=2000)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("reconstruct", help="geometry from a Hill coefficient")
    common(p, profile=False)
    p.add_argument("--expr")
    p.add_argument("--c", type=float)
    p.add_argument("--samples")
    p.set_defaults(fn=cmd_reconstruct)

    p = sub.add_parser("plot", help="unit circle / anti-circle artwork")
    common(p)
    p.add_argument("--show", default="circle,anticircle")
    p.set_defaults(fn=cmd_plot)

    p = sub.add_parser("cycloid", help="cycloid at an eigenvalue")
    common(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--lambda-tol", dest="lambda_tol", type=float, default=1e-3)
    p.set_defaults(fn=cmd_cycloid)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (SpecError, ProfileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
