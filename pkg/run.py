__version__ = "2.0"

import argparse
import logging
import sys

OK = 0
VERIFICATION_FAILED = 1
USAGE_ERROR = 2
NUMERICAL_ERROR = 3
MODULE_ERROR = -1
REQUIREMENTS_ERROR = -2

try:
    import numpy as np
    import scipy  # noqa: F401

except ModuleNotFoundError as err:
    sys.stdout.write(str(err))
    sys.exit(REQUIREMENTS_ERROR)

try:
    from application import output
    from application.inversion import (
        cdf_from_density, default_grid, density_curve)
    from application.simulate import hitting_times, moment_estimate
    from application.transforms import mellin, real_mellin
    from application.verify import CHECKS, run_check

    from domain.boundary import Boundary
    from domain.config import InversionConfig, QuadratureConfig, SimConfig
    from domain.errors import DomainError, NumericalError
    from domain.process import BesselSpec, IndexSign

except ModuleNotFoundError as err:
    sys.stdout.write(str(err))
    sys.exit(MODULE_ERROR)

logger = logging.getLogger("run")

LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


# region(Commands)
def cmd_transform(args):
    spec, bnd = _problem(args)
    cfg = QuadratureConfig()
    rows = [(_exponent_text(s), mellin(spec, bnd, s, cfg)) for s in args.s]
    config = {**_echo(args), **spec.as_dict(), **bnd.as_dict(),
              **cfg.as_dict(), "s": [text for text, _ in rows]}
    if args.format == "json":
        _write(args, output.transform_json(rows, config))
    else:
        _write(args, output.transform_csv(rows, config))
    return OK


def cmd_density(args):
    spec, bnd = _problem(args)
    cfg = InversionConfig(abscissa=args.abscissa, half_height=args.height,
                          step=args.step, tail_tol=args.tail_tol,
                          workers=args.workers)
    if args.ymin is None:
        grid = default_grid(bnd, args.ymax, args.points)
    else:
        if not bnd.b < args.ymin < args.ymax:
            raise DomainError("density grid needs b < ymin < ymax")
        grid = np.linspace(args.ymin, args.ymax, args.points)
    curve = density_curve(spec, bnd, grid, cfg)
    table = cdf_from_density(curve)
    config = _echo(args)
    if args.format == "json":
        _write(args, output.density_json(curve, table, config))
    else:
        _write(args, output.density_csv(curve, table, config))
    return OK


def cmd_simulate(args):
    spec, bnd = _problem(args)
    cfg = SimConfig(dt=args.dt, max_bm_time=args.horizon,
                    n_paths=args.paths, seed=args.seed, workers=args.workers,
                    bridge_correction=args.bridge)
    samples = hitting_times(spec, bnd, cfg)
    summary = {"n_requested": samples.n_requested,
               "n_valid": samples.n_valid,
               "excluded_fraction": samples.excluded_fraction,
               "moments": _moments(spec, bnd, samples, args.moment)}
    config = {**_echo(args), **cfg.as_dict()}
    if args.format == "json":
        _write(args, output.samples_json(samples, config, summary))
        return OK
    _write(args, output.samples_csv(samples, config))
    text = output.summary_json(config, summary)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as file:
            file.write(text)
    else:
        sys.stderr.write(text)
    return OK


def cmd_verify(args):
    reports = run_check(args.check, seed=args.seed, workers=args.workers,
                        control=args.control)
    if args.format == "table":
        _write(args, output.reports_table(reports))
    else:
        _write(args, output.reports_json(reports, _echo(args)))
    failed = [report.name for report in reports if not report.passed]
    if failed:
        logger.warning("failed checks: %s", ", ".join(failed))
        return VERIFICATION_FAILED
    return OK
# endregion


def _problem(args):
    spec = BesselSpec(args.nu, IndexSign.parse(args.index))
    if args.b == args.c:
        return spec, Boundary.limit(args.c)
    return spec, Boundary(args.b, args.c)


def _exponent_text(s):
    return repr(s.real) if s.imag == 0 else str(s)


def _moments(spec, bnd, samples, exponents):
    if not len(samples):
        return []
    rows = []
    for s in exponents:
        mean, error, _ = moment_estimate(samples, bnd.b, s)
        rows.append({"s": s, "mean": mean, "se": error,
                     "closed_form": real_mellin(spec, bnd, s)})
    return rows


def _echo(args):
    skip = {"handler", "output", "verbose", "workers", "summary"}
    return {"command": args.command, "version": __version__,
            **{key: value for key, value in vars(args).items()
               if key not in skip and key != "command"}}


def _write(args, text):
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return
    with open(args.output, "w", encoding="utf-8") as file:
        file.write(text)


def create_parser():
    parser = argparse.ArgumentParser(
        description="Hitting times of square-root boundaries "
                    "by Bessel processes")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for info, -vv for debug logging")
    parser.add_argument("-o", "--output", default="-",
                        help="Output file, '-' for stdout")
    parser.add_argument("--workers", type=int, default=1,
                        help="Worker threads; results do not depend on it")
    commands = parser.add_subparsers(dest="command", required=True)

    transform = commands.add_parser(
        "transform", help="E[(b + sigma)^-s] in closed form")
    _add_problem(transform)
    transform.add_argument("--s", type=complex, action="append",
                           required=True, help="Exponent, repeatable")
    transform.add_argument("--format", choices=["csv", "json"],
                           default="csv")
    transform.set_defaults(handler=cmd_transform)

    density = commands.add_parser(
        "density", help="Density and CDF of b + sigma")
    _add_problem(density)
    density.add_argument("--ymin", type=float, default=None,
                         help="Uniform grid start; geometric grid if absent")
    density.add_argument("--ymax", type=float, required=True)
    density.add_argument("--points", type=int, default=400)
    density.add_argument("--abscissa", type=float, default=1.0)
    density.add_argument("--height", type=float, default=400.0)
    density.add_argument("--step", type=float, default=0.1)
    density.add_argument("--tail-tol", type=float, default=1e-8)
    density.add_argument("--format", choices=["csv", "json"], default="csv")
    density.set_defaults(handler=cmd_density)

    simulate = commands.add_parser(
        "simulate", help="Monte-Carlo samples of sigma")
    _add_problem(simulate)
    simulate.add_argument("--paths", type=int, default=10_000)
    simulate.add_argument("--dt", type=float, default=1e-4)
    simulate.add_argument("--horizon", type=float, default=50.0,
                          help="Brownian time after which paths are dropped")
    simulate.add_argument("--seed", type=int, default=42)
    simulate.add_argument("--bridge", action="store_true",
                          help="Brownian-bridge crossing correction")
    simulate.add_argument("--moment", type=float, action="append",
                          default=None, help="Exponent for the summary")
    simulate.add_argument("--summary", default=None,
                          help="Summary JSON file, stderr if absent")
    simulate.add_argument("--format", choices=["csv", "json"],
                          default="csv")
    simulate.set_defaults(handler=cmd_simulate)

    verify = commands.add_parser("verify", help="Seeded identity checks")
    verify.add_argument("--check", choices=[*CHECKS, "all"], default="all")
    verify.add_argument("--seed", type=int, default=42)
    verify.add_argument("--control", action="store_true",
                        help="Run the corrupted-parameter variants, "
                             "which are expected to fail")
    verify.add_argument("--format", choices=["json", "table"],
                        default="json")
    verify.set_defaults(handler=cmd_verify)
    return parser


def _add_problem(parser):
    parser.add_argument("--index", default="neg",
                        choices=["neg", "pos", "negative", "positive"])
    parser.add_argument("--nu", type=float, required=True)
    parser.add_argument("--b", type=float, required=True)
    parser.add_argument("--c", type=float, required=True)


def main(argv=None):
    args = create_parser().parse_args(argv)
    if getattr(args, "moment", False) is None:
        args.moment = [0.5, 1.0, 2.0]
    logging.basicConfig(
        level=LOG_LEVELS[min(args.verbose, len(LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except DomainError as err:
        logger.error("%s", err)
        return USAGE_ERROR
    except NumericalError as err:
        logger.error("%s", err)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
