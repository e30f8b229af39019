"""Command-line front end: ``parcorr test | simulate | calibrate``.

Exit codes: 0 on success, 1 on usage or configuration errors, 2 on data
errors (unreadable files, failed validation, degenerate series).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from . import __version__
from .association import RhoMeasure
from .engine import run_test
from .errors import CONFIG_ERRORS, DATA_ERRORS
from .io import dump_dataset, emit_plot_data, load_manifest, write_json, write_report
from .simulate import NullGenConfig, ScenarioConfig, gen_scenario, monte_carlo

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 1, 2

RHO_KINDS = {"pearson": "pearson1d", "linreg": "linreg_r2", "ridge": "ridge_r2"}
CALIBRATE_GENERATORS = ("ar1", "randomwalk", "fig1", "fig2", "fig3")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _add_rho_args(p: argparse.ArgumentParser):
    p.add_argument("--rho", choices=sorted(RHO_KINDS), default="pearson",
                   help="association measure (default: pearson)")
    p.add_argument("--ridge-lambda", type=float, default=1.0,
                   help="ridge penalty for --rho ridge (default: 1.0)")
    p.add_argument("--rho-no-intercept", action="store_true",
                   help="fit regression measures without an intercept")
    p.add_argument("--standardize", action="store_true",
                   help="standardize predictor columns before regression")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default: 0.05)")


def _measure(args) -> RhoMeasure:
    return RhoMeasure(
        kind=RHO_KINDS[args.rho],
        ridge_lambda=args.ridge_lambda if args.rho == "ridge" else 0.0,
        add_intercept=not args.rho_no_intercept,
        standardize=args.standardize,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="parcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"parcorr {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="run the test on data described by a manifest")
    t.add_argument("--manifest", required=True)
    _add_rho_args(t)
    t.add_argument("--no-intercept", action="store_true",
                   help="do not append a constant column to each confounder")
    t.add_argument("--invalid-variant", action="store_true",
                   help="project out Z_i only (NOT a valid test; for demonstration)")
    t.add_argument("--degenerate-rho-zero", action="store_true",
                   help="score degenerate pairs as 0 instead of failing")
    t.add_argument("--alternative", choices=["two-sided", "greater", "less"], default="two-sided")
    t.add_argument("--out", required=True)
    t.add_argument("--plot-dir")

    s = sub.add_parser("simulate", help="run a step-function scenario")
    s.add_argument("--scenario", choices=["fig1", "fig2", "fig3"], required=True)
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--t", type=int, default=100)
    s.add_argument("--pulse-width", type=int, default=5)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--seed", type=_seed, required=True)
    s.add_argument("--z-intercept", action="store_true",
                   help="append a constant column to each confounder")
    _add_rho_args(s)
    s.add_argument("--out", required=True)
    s.add_argument("--plot-dir")
    s.add_argument("--dump-data", help="write the generated series and a manifest here")

    c = sub.add_parser("calibrate", help="Monte Carlo rejection rate of the test")
    c.add_argument("--generator", choices=CALIBRATE_GENERATORS, required=True)
    c.add_argument("--reps", type=int, default=1000)
    c.add_argument("--n", type=int, default=10)
    c.add_argument("--t", type=int, default=100)
    c.add_argument("--ar-coeff", type=float, default=0.9)
    c.add_argument("--coupling", type=float, default=0.7)
    c.add_argument("--w-scale", type=float, default=1.0)
    c.add_argument("--dims", type=int, nargs=3, metavar=("P", "Q", "R"), default=[1, 1, 1])
    c.add_argument("--pulse-width", type=int, default=5)
    c.add_argument("--noise", type=float, default=0.5, help="noise sd for fig generators")
    c.add_argument("--seed", type=_seed, required=True)
    _add_rho_args(c)
    c.add_argument("--out", required=True)
    return parser


def _summary(report) -> str:
    return (
        f"N={report.n} T={report.t_len} mode={report.mode} mean G={report.mean_g:.6g} "
        f"t={report.t_stat:.6g} df={report.df} p={report.p_value:.6g}"
    )


def cmd_test(args) -> int:
    d = load_manifest(args.manifest)
    report = run_test(
        d, _measure(args),
        "invalid_single" if args.invalid_variant else "valid_joint",
        z_intercept=not args.no_intercept,
        alternative=args.alternative,
        alpha=args.alpha,
        degenerate_zero=args.degenerate_rho_zero,
    )
    write_report(report, args.out)
    if args.plot_dir:
        emit_plot_data(d, report, args.plot_dir)
    print(_summary(report))
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = ScenarioConfig(args.scenario, args.n, args.t, args.pulse_width, args.noise, args.seed)
    d = gen_scenario(cfg)
    report = run_test(
        d, _measure(args), cfg.mode,
        z_intercept=args.z_intercept or cfg.z_intercept, alpha=args.alpha,
    )
    write_report(report, args.out)
    if args.plot_dir:
        emit_plot_data(d, report, args.plot_dir)
    if args.dump_data:
        dump_dataset(d, args.dump_data)
    print(_summary(report))
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    if args.generator.startswith("fig"):
        cfg = ScenarioConfig(args.generator, args.n, args.t, args.pulse_width, args.noise, args.seed)
        config = {
            "scenario": cfg.scenario, "n": cfg.n, "t_len": cfg.t_len,
            "pulse_width": cfg.pulse_width, "noise_sd": cfg.noise_sd, "seed": cfg.seed,
        }
    else:
        gen = "random_walk" if args.generator == "randomwalk" else "ar1"
        cfg = NullGenConfig(
            gen, args.ar_coeff, args.n, args.t, tuple(args.dims), args.w_scale, args.coupling, args.seed
        )
        config = {
            "generator": gen, "ar_coeff": cfg.ar_coeff, "n": cfg.n, "t_len": cfg.t_len,
            "dims": list(cfg.dims), "w_scale": cfg.w_scale, "x_z_coupling": cfg.x_z_coupling,
            "seed": cfg.seed,
        }
    measure = _measure(args)
    res = monte_carlo(cfg, args.reps, args.alpha, measure)
    half = 2.5758293035489 * math.sqrt(args.alpha * (1 - args.alpha) / args.reps)
    out = {
        "generator": args.generator,
        "config": config,
        "mode": res.mode,
        "z_intercept": res.z_intercept,
        "rho": measure.to_dict(),
        "reps": res.reps,
        "alpha": res.alpha,
        "rejection_rate": res.rejection_rate,
        "n_rejections": res.n_rejections,
        "binomial_band_99": [args.alpha - half, args.alpha + half],
        "naive_rejection_rate": res.naive_rejection_rate,
        "mean_g_summary": res.mean_g_summary(),
        "warning_counts": res.warnings,
        "seeds": res.seeds,
        "p_values": res.p_values,
        "tool_version": __version__,
    }
    write_json(out, args.out)
    print(
        f"{args.generator}: rejection rate {res.rejection_rate:.4f} at alpha={args.alpha} "
        f"over {res.reps} reps; naive baseline {res.naive_rejection_rate:.4f}"
    )
    return EXIT_OK


COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "calibrate": cmd_calibrate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except CONFIG_ERRORS as err:
        print(f"parcorr: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except DATA_ERRORS as err:
        print(f"parcorr: data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except OSError as err:
        print(f"parcorr: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
