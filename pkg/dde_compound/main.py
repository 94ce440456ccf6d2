"""Command-line entry point for the compound DDE toolkit."""

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from dde_compound import __version__
from dde_compound.config import get_settings
from dde_compound.models.experiment import CoefficientSpec, Subcommand
from dde_compound.services.runner import load_config, run
from dde_compound.utils import CompoundDdeError, get_logger, setup_logging

logger = get_logger(__name__)

EXIT_FAILED = 1

SUBCOMMAND_HELP = {
    Subcommand.SIMULATE: "integrate the DDE from a constant initial segment",
    Subcommand.SPECTRUM: "eigenvalues of a matrix read from a header-less CSV",
    Subcommand.POSITIVITY: "cone positivity certificate for the compound evolution",
    Subcommand.DETCHECK: "sign of the determinant of the leading solution space",
    Subcommand.FLOQUET: "Floquet multipliers, lap numbers and dominance checks",
    Subcommand.U0CHECK: "interior bounds of A^k(phi)/u_m",
}


def _coefficient(text: str) -> dict[str, Any]:
    try:
        return CoefficientSpec.parse(text).model_dump()
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    """Global flags, then one subparser per subcommand sharing the experiment options."""
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="compound-dde",
        description="Compound (exterior power) analysis of x'(t) = -a(t)x(t) - b(t)x(t-1)",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="JSON experiment configuration")
    parser.add_argument("--out", type=Path, dest="output_dir", help="output directory")
    parser.add_argument("--threads", type=int, help=f"worker threads (default {settings.threads})")
    parser.add_argument("--seed", type=int, help="seed for every random draw of the run")
    parser.add_argument("--log-level", default=None, help=f"log level (default {settings.log_level})")

    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--n-sub", "--nsub", type=int, dest="n_sub", help="grid points per unit delay")
    options.add_argument("--gamma", type=float, help="period of the coefficients")
    options.add_argument("--alpha", type=_coefficient, help="coefficient a: 'c', 'mean+amp*sin[:freq]' or '@samples.csv'")
    options.add_argument("--beta", type=_coefficient, help="coefficient b: 'c', 'mean+amp*sin[:freq]' or '@samples.csv'")
    options.add_argument("--m", type=int, help="compound order")
    options.add_argument("--k", type=int, help="power of the operator")
    options.add_argument("--k-max", "--kmax", type=int, dest="k_max", help="number of multipliers")
    options.add_argument("--tau", type=float, help="start time")
    options.add_argument("--eta", type=float, help="evolution time")
    options.add_argument("--horizon", type=float, help="integration or scan length")
    options.add_argument("--initial", type=float, help="constant initial segment value")
    options.add_argument("--trials", type=int, help="number of seeded trials")
    options.add_argument("--probe", help="const, bump or random:<seed>")
    options.add_argument("--homotopy-steps", type=int, dest="homotopy_steps", help="homotopy grid size")
    options.add_argument("--matrix", type=Path, help="matrix CSV for the spectrum subcommand")

    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for subcommand in Subcommand:
        subparsers.add_parser(str(subcommand), parents=[options], help=SUBCOMMAND_HELP[subcommand])
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    values = vars(args).copy()
    for key in ("config", "log_level"):
        values.pop(key, None)
    if values.get("threads") is None:
        values["threads"] = None if args.config else get_settings().threads
    if values.get("seed") is None and not args.config:
        values["seed"] = get_settings().default_seed
    if values.get("output_dir") is None and not args.config:
        values["output_dir"] = get_settings().output_dir
    return values


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand; the exit code is 0 when every binding certificate passed.

    Errors map to 2 (invalid argument), 3 (numeric failure) and 4 (capacity);
    1 means the run completed but a certificate failed.
    """
    args = build_parser().parse_args(argv)
    try:
        setup_logging(level=args.log_level)
        config = load_config(args.config, _overrides(args))
        record = run(config)
    except CompoundDdeError as e:
        logger.error("%s failed: %s", args.subcommand, e)  # noqa: TRY400
        return e.exit_code

    if config.subcommand is Subcommand.SPECTRUM:
        sys.stdout.write((config.output_dir / "eigenvalues.csv").read_text(encoding="utf-8"))
    return 0 if record.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
