"""Command-line front end.

Subcommands: geometry (cell constants), analyze (closed forms), tradeoff
(rate/error curves), simulate (Monte Carlo), trace (single-point protocol
transcript), sweep (theta sweeps with fixed-budget comparisons).  Output is
plain CSV (RFC-4180 style, '.' decimal separator, 12 significant digits) or
JSON with stable key order; no ANSI colour is ever emitted, so NO_COLOR is
honoured trivially.

Exit codes: 0 success, 2 invalid input, 3 quadrature/convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import analytics, montecarlo, protocols
from .errors import (
    BabaiRefineError,
    InvalidParams,
    QuadratureFailure,
)
from .lattice import (
    LatticeParams,
    Point2,
    babai_error_probability,
    cell_geometry,
)

_CLAMP_EPS = 1e-6
_SIM_SIZE_CAP = 4096


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def resolve_params(rho: float, theta_deg, theta_rad, rcos) -> LatticeParams:
    """Build LatticeParams from the CLI angle flags.

    Angles that land exactly on the valid region's boundary (e.g. 60 or 90
    degrees at rho = 1) are clamped inward by 1e-6 rad with a notice on
    stderr; anything else invalid raises InvalidParams.
    """
    given = [v for v in (theta_deg, theta_rad, rcos) if v is not None]
    if len(given) != 1:
        raise InvalidParams("specify exactly one of --theta-deg, --theta-rad, --rcos")
    if theta_deg is not None:
        theta = math.radians(theta_deg)
    elif theta_rad is not None:
        theta = theta_rad
    else:
        if not -1.0 <= rcos / rho <= 1.0:
            raise InvalidParams(f"rcos/rho = {rcos / rho} outside [-1, 1]")
        theta = math.acos(rcos / rho)
    c = rho * math.cos(theta)
    if abs(c - 0.5) < 1e-9:
        clamped = theta + _CLAMP_EPS
    elif abs(c) < 1e-9:
        clamped = theta - _CLAMP_EPS
    else:
        clamped = None
    if clamped is not None:
        print(
            f"notice: theta={theta:.9f} rad is on the boundary of the valid "
            f"region; clamped to {clamped:.9f}",
            file=sys.stderr,
        )
        theta = clamped
    return LatticeParams(rho=rho, theta=theta)


def _geometry_dict(params: LatticeParams) -> dict:
    g = cell_geometry(params)
    return {
        "rho": params.rho,
        "theta_rad": params.theta,
        "t_m2": g.t_m2,
        "t_m1": g.t_m1,
        "t_1": g.t_1,
        "t_2": g.t_2,
        "tau_m1": g.tau_m1,
        "tau_1": g.tau_1,
        "L0": g.L0,
        "L1": g.L1,
        "L2": g.L2,
        "L": g.L,
        "H": g.H,
        "H0": g.H0,
        "H1": g.H1,
        "H21": g.H21,
        "H22": g.H22,
        "boundary_segments": [
            {
                "neighbor": [seg.neighbor.u1, seg.neighbor.u2],
                "normal": [seg.normal[0], seg.normal[1]],
                "offset": seg.offset,
                "x1_span": [seg.x1_span[0], seg.x1_span[1]],
                "x2_span": [seg.x2_span[0], seg.x2_span[1]],
                "slope": seg.slope,
            }
            for seg in g.boundary_segments
        ],
    }


def cmd_geometry(args) -> str:
    params = resolve_params(args.rho, args.theta_deg, args.theta_rad, args.rcos)
    doc = _geometry_dict(params)
    if args.format == "json":
        return json.dumps(doc)
    lines = []
    for key, val in doc.items():
        if key == "boundary_segments":
            for seg in val:
                lines.append(
                    f"segment neighbor=({seg['neighbor'][0]},{seg['neighbor'][1]}) "
                    f"slope={_fmt(seg['slope'])} "
                    f"x1_span=({_fmt(seg['x1_span'][0])},{_fmt(seg['x1_span'][1])}] "
                    f"x2_span=({_fmt(seg['x2_span'][0])},{_fmt(seg['x2_span'][1])}]"
                )
        else:
            lines.append(f"{key}={_fmt(val)}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> str:
    params = resolve_params(args.rho, args.theta_deg, args.theta_rad, args.rcos)
    scheme = args.scheme
    doc: dict = {"scheme": scheme, "rho": params.rho, "theta_rad": params.theta}
    if scheme == "babai":
        doc["pe_babai"] = babai_error_probability(params)
    elif scheme == "12":
        n1 = args.n1 or 1
        n2 = args.n2 or 1
        geo = analytics.coefficients_12(params)
        printed = analytics.coefficients_12(params, provenance="printed")
        h1, h2 = analytics.rate_12(params, n1, n2)
        g = cell_geometry(params)
        doc.update(
            {
                "n1": n1,
                "n2": n2,
                "alpha1": geo.alpha1,
                "alpha2": geo.alpha2,
                "alpha1_printed": printed.alpha1,
                "alpha2_printed": printed.alpha2,
                "alpha_ratio": geo.alpha2 * g.L1 / (geo.alpha1 * g.L2),
                "alpha_ratio_printed": printed.alpha2 * g.L1 / (printed.alpha1 * g.L2),
                "pe": analytics.pe_12(params, n1, n2),
                "h_u1": h1,
                "h_u2_given_u1": h2,
                "rate_bits": h1 + h2,
                "kappa": analytics.kappa_12(params),
                "asymptotic_constant": analytics.asymptotic_constant_12(params),
            }
        )
    elif scheme == "21":
        n = args.n or 1
        doc.update(
            {
                "n": n,
                "beta": analytics.beta_21(params),
                "pe": analytics.pe_21(params, n),
                "rate_bits": analytics.rate_21(params, n),
                "kappa": analytics.kappa_21(params),
                "asymptotic_constant": analytics.asymptotic_constant_21(params),
            }
        )
    else:  # inf
        q, p = analytics.round1_distributions(params)
        doc.update(
            {
                "rbar_bits": analytics.rbar_infinite(params),
                "nbar_rounds": analytics.nbar_infinite(params),
                "q": list(q.probs),
                "p": list(p.probs),
            }
        )
    return json.dumps(doc)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else _fmt(cell) for cell in row])
    return buf.getvalue()


def cmd_tradeoff(args) -> str:
    params = resolve_params(args.rho, args.theta_deg, args.theta_rad, args.rcos)
    scheme = args.scheme
    if scheme not in ("12", "21"):
        raise InvalidParams("tradeoff supports schemes 12 and 21")
    g = cell_geometry(params)
    if scheme == "12":
        exponent = g.L / (2.0 * (g.L1 + g.L2))
        points = analytics.tradeoff_curve_12(params, args.max_size)
        header = ["n1", "n2", "rate_bits", "pe", "pe_scaled"]
        rows = [
            [p.n1, p.n2, p.rate_bits, p.pe, p.pe * 2.0 ** (exponent * p.rate_bits)]
            for p in points
        ]
    else:
        q0 = g.H0 / g.H
        exponent = 1.0 / (1.0 - q0)
        points = [analytics.curve_point(params, "21", n) for n in range(1, args.max_size + 1)]
        header = ["n", "rate_bits", "pe", "pe_scaled"]
        rows = [
            [p.n, p.rate_bits, p.pe, p.pe * 2.0 ** (exponent * p.rate_bits)]
            for p in points
        ]
    if args.budget is not None:
        header.append("within_budget")
        for row, p in zip(rows, points):
            row.append(1 if p.rate_bits <= args.budget else 0)
    return _csv_text(header, rows)


def _report_dict(report: montecarlo.SimReport) -> dict:
    return {
        "scheme": report.scheme,
        "trials": report.trials,
        "seed": report.seed,
        "empirical_pe": report.empirical_pe,
        "empirical_pe_stderr": report.empirical_pe_stderr,
        "mean_bits": report.mean_bits,
        "mean_bits_stderr": report.mean_bits_stderr,
        "mean_rounds": report.mean_rounds,
        "mean_rounds_stderr": report.mean_rounds_stderr,
        "predicted_pe": report.predicted_pe,
        "predicted_bits": report.predicted_bits,
        "predicted_rounds": report.predicted_rounds,
        "unhalted_count": report.unhalted_count,
    }


_SCHEME_ALIASES = {"12": "12", "21": "21", "inf": "infinite", "babai": "babai_only"}


def cmd_simulate(args) -> str:
    params = resolve_params(args.rho, args.theta_deg, args.theta_rad, args.rcos)
    config = montecarlo.SimConfig(
        params=params,
        scheme=_SCHEME_ALIASES[args.scheme],
        trials=args.trials,
        seed=args.seed,
        n1=args.n1,
        n2=args.n2,
        n=args.n,
        max_rounds=args.max_rounds,
    )
    return json.dumps(_report_dict(montecarlo.simulate(config)))


def cmd_trace(args) -> str:
    params = resolve_params(args.rho, args.theta_deg, args.theta_rad, args.rcos)
    x = Point2(args.x1, args.x2)
    if args.scheme == "12":
        q = protocols.quantizer_12(params, args.n1 or 1, args.n2 or 1)
        t = protocols.run_single_round_12(x, params, q)
    elif args.scheme == "21":
        q = protocols.quantizer_21(params, args.n or 1)
        t = protocols.run_single_round_21(x, params, q)
    elif args.scheme == "inf":
        t = protocols.run_infinite_rounds(x, params, args.max_rounds)
    else:
        raise InvalidParams("trace supports schemes 12, 21 and inf")
    return protocols.transcript_to_json(t)


def cmd_sweep(args) -> str:
    if args.grid < 1:
        raise InvalidParams("grid must have at least one point")
    rho = args.rho
    theta_lo = math.acos(min(1.0, 1.0 / (2.0 * rho)))
    theta_hi = math.pi / 2.0
    if args.grid == 1:
        thetas = [0.5 * (theta_lo + theta_hi)]
    else:
        lo = theta_lo + _CLAMP_EPS
        hi = theta_hi - _CLAMP_EPS
        step = (hi - lo) / (args.grid - 1)
        thetas = [lo + i * step for i in range(args.grid)]
    header = [
        "theta_rad",
        "rho",
        "pe12_below",
        "pe12_interp",
        "pe21_below",
        "pe21_interp",
        "rbar_bits",
        "nbar_rounds",
        "pe_babai",
    ]
    empirical = args.trials > 0
    if empirical:
        header += [
            "pe12_emp",
            "pe12_emp_stderr",
            "pe21_emp",
            "pe21_emp_stderr",
            "rbar_emp",
            "rbar_emp_stderr",
            "nbar_emp",
            "nbar_emp_stderr",
            "pe_babai_emp",
            "pe_babai_emp_stderr",
        ]
    rows = []
    for i, theta in enumerate(thetas):
        params = LatticeParams(rho=rho, theta=theta)
        p12 = analytics.budget_point(params, "12", args.budget)
        p21 = analytics.budget_point(params, "21", args.budget)
        pe12_below, pe12_interp = analytics.pe_at_rate(params, "12", args.budget)
        pe21_below, pe21_interp = analytics.pe_at_rate(params, "21", args.budget)
        row = [
            theta,
            rho,
            pe12_below,
            pe12_interp,
            pe21_below,
            pe21_interp,
            analytics.rbar_infinite(params),
            analytics.nbar_infinite(params),
            babai_error_probability(params),
        ]
        if empirical:
            # cap the simulated quantizer sizes; the saturated tail of the
            # 21 curve near theta = pi/2 returns astronomically fine points
            r12 = montecarlo.simulate(
                montecarlo.SimConfig(
                    params=params,
                    scheme="12",
                    trials=args.trials,
                    seed=montecarlo.derive_seed(args.seed, 4 * i),
                    n1=min(p12.n1, _SIM_SIZE_CAP),
                    n2=min(p12.n2, _SIM_SIZE_CAP),
                )
            )
            r21 = montecarlo.simulate(
                montecarlo.SimConfig(
                    params=params,
                    scheme="21",
                    trials=args.trials,
                    seed=montecarlo.derive_seed(args.seed, 4 * i + 1),
                    n=min(p21.n, _SIM_SIZE_CAP),
                )
            )
            rinf = montecarlo.simulate(
                montecarlo.SimConfig(
                    params=params,
                    scheme="infinite",
                    trials=args.trials,
                    seed=montecarlo.derive_seed(args.seed, 4 * i + 2),
                    max_rounds=args.max_rounds,
                )
            )
            rbab = montecarlo.simulate(
                montecarlo.SimConfig(
                    params=params,
                    scheme="babai_only",
                    trials=args.trials,
                    seed=montecarlo.derive_seed(args.seed, 4 * i + 3),
                )
            )
            row += [
                r12.empirical_pe,
                r12.empirical_pe_stderr,
                r21.empirical_pe,
                r21.empirical_pe_stderr,
                rinf.mean_bits,
                rinf.mean_bits_stderr,
                rinf.mean_rounds,
                rinf.mean_rounds_stderr,
                rbab.empirical_pe,
                rbab.empirical_pe_stderr,
            ]
        rows.append(row)
    return _csv_text(header, rows)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho", type=float, default=1.0, help="length ratio, >= 1")
    p.add_argument("--theta-deg", type=float, default=None, help="angle in degrees")
    p.add_argument("--theta-rad", type=float, default=None, help="angle in radians")
    p.add_argument(
        "--rcos", type=float, default=None, help="rho*cos(theta); sets theta with rho fixed"
    )
    p.add_argument("--output", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="babai-refine",
        description="Refining a 2-D nearest-plane (Babai) partition into the "
        "Voronoi partition: geometry, rate/error analysis, protocol simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("geometry", help="dump the Babai/Voronoi cell constants")
    _add_param_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("analyze", help="closed-form error/rate figures for a scheme")
    _add_param_flags(p)
    p.add_argument("--scheme", choices=("12", "21", "inf", "babai"), required=True)
    p.add_argument("--n1", type=int, default=None)
    p.add_argument("--n2", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("tradeoff", help="CSV rate/error curve for a scheme")
    _add_param_flags(p)
    p.add_argument("--scheme", choices=("12", "21"), required=True)
    p.add_argument("--max-size", type=int, default=32)
    p.add_argument("--budget", type=float, default=None)
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("simulate", help="Monte Carlo protocol simulation (JSON report)")
    _add_param_flags(p)
    p.add_argument("--scheme", choices=("12", "21", "inf", "babai"), required=True)
    p.add_argument("--n1", type=int, default=None)
    p.add_argument("--n2", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rounds", type=int, default=protocols.DEFAULT_MAX_ROUNDS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("trace", help="single-point protocol transcript (JSON)")
    _add_param_flags(p)
    p.add_argument("--scheme", choices=("12", "21", "inf"), required=True)
    p.add_argument("--x1", type=float, required=True)
    p.add_argument("--x2", type=float, required=True)
    p.add_argument("--n1", type=int, default=None)
    p.add_argument("--n2", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--max-rounds", type=int, default=protocols.DEFAULT_MAX_ROUNDS)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("sweep", help="theta sweep CSV (fixed-budget comparison)")
    _add_param_flags(p)
    p.add_argument("--grid", type=int, default=50, help="number of theta gridpoints")
    p.add_argument("--budget", type=float, default=4.0, help="rate budget in bits")
    p.add_argument("--trials", type=int, default=0, help="empirical trials per row (0: none)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rounds", type=int, default=protocols.DEFAULT_MAX_ROUNDS)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except QuadratureFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (BabaiRefineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
