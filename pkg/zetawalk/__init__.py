# Copyright (C) 2022  Max Wiklund
#
# Licensed under the Apache License, Version 2.0 (the “License”);
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an “AS IS” BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import argparse
import logging
import sys
from fractions import Fraction
from typing import List, Optional

from zetawalk import commands, file_resources, montecarlo, output, product_eval, trend
from zetawalk.config import CONFIG_OPTIONS, DEFAULT_PRESET, FileConfig, PresetConfig, worker_count
from zetawalk.errors import DomainError
from zetawalk.params import parse_probability

__version__ = "1.0.0"
_DESCRIPTION = "Command line tool to evaluate random Riemann-zeta walks, their products and densities."


def _probability(value: str) -> Fraction:
    try:
        p = parse_probability(value)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e))
    if not 0 < p <= 1:
        raise argparse.ArgumentTypeError(f"p must lie in (0,1], got {value}")
    return p


def _exponent(value: str) -> float:
    try:
        s = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid exponent {value!r}")
    if not s > 0.5:
        raise argparse.ArgumentTypeError(f"s must be greater than 1/2, got {value}")
    return s


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid integer {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"Expected a positive integer, got {value}")
    return number


def _nonnegative_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid integer {value!r}")
    if number < 0:
        raise argparse.ArgumentTypeError(f"Expected a nonnegative integer, got {value}")
    return number


def _positive_float(value: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid number {value!r}")
    if not number > 0:
        raise argparse.ArgumentTypeError(f"Expected a positive number, got {value}")
    return number


def _p_grid(value: str) -> List[Fraction]:
    """Parse ``start:stop:step`` into an inclusive list of probabilities."""
    parts = value.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"p grid must look like start:stop:step, got {value!r}")
    start, stop = _probability(parts[0]), _probability(parts[1])
    try:
        step = parse_probability(parts[2])
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e))
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"p grid needs step > 0 and start <= stop, got {value!r}")

    grid = []
    p = start
    while p <= stop:
        grid.append(p)
        p += step
    return grid


def _add_params(parser: argparse.ArgumentParser, p_required: bool = True) -> None:
    parser.add_argument("--p", type=_probability, required=p_required, help="Probability weight in (0,1], fractions like 1/3 allowed.")
    parser.add_argument("--s", type=_exponent, required=True, help="Step-size exponent, greater than 1/2.")


def set_up_argparser() -> argparse.ArgumentParser:
    """Configure argparser."""
    common = argparse.ArgumentParser(add_help=False)
    config_group = common.add_mutually_exclusive_group()
    config_group.add_argument(
        "--preset", default=DEFAULT_PRESET, choices=CONFIG_OPTIONS, help="Numerical settings shipped with the package."
    )
    config_group.add_argument("--config", help="Custom JSON settings file, overlaid on the default preset.")
    common.add_argument("--output", "-o", help="Output file. Writes to stdout when omitted.")
    common.add_argument("--force", action="store_true", default=False, help="Overwrite an existing output file.")
    common.add_argument("--format", default="csv", choices=file_resources.FORMATS, help="Output format.")
    common.add_argument("--tol", type=_positive_float, help="Absolute error target, defaults to the preset value.")
    common.add_argument("--verbose", action="store_true", default=False, help="Log progress to stderr.")
    common.add_argument("--single-thread", action="store_true", default=False, help="Run everything in one process.")

    parser = argparse.ArgumentParser(description=_DESCRIPTION)
    parser.add_argument("-v", "--version", action="version", version="%(prog)s {}".format(__version__))
    subparsers = parser.add_subparsers(dest="command", required=True)

    eval_parser = subparsers.add_parser("eval", parents=[common], help="Evaluate Cl_{p;s} with its trend and envelope.")
    _add_params(eval_parser)
    eval_parser.add_argument("--t-max", type=_positive_float, default=10.0, help="Upper end of the t grid.")
    eval_parser.add_argument("--points", type=_positive_int, default=1000, help="Number of grid points.")

    trend_parser = subparsers.add_parser("trend", parents=[common], help="Trend constant C_{p;s} over p.")
    trend_parser.add_argument("--s", type=_exponent, required=True, help="Step-size exponent, greater than 1/2.")
    p_group = trend_parser.add_mutually_exclusive_group(required=True)
    p_group.add_argument("--p", type=_probability, help="Single probability weight.")
    p_group.add_argument("--p-grid", type=_p_grid, help="Probability grid start:stop:step, inclusive.")
    trend_parser.add_argument("--method", choices=trend.METHODS, help="Force a method.")

    pdf_parser = subparsers.add_parser("pdf", parents=[common], help="Density of the infinite walk.")
    _add_params(pdf_parser)
    pdf_parser.add_argument("--width", type=_positive_float, default=2.0, help="Grid covers [-width, width].")
    pdf_parser.add_argument("--points", type=_positive_int, default=401, help="Number of grid points.")

    sample_parser = subparsers.add_parser("sample", parents=[common], help="Histogram of Monte Carlo walk endpoints.")
    _add_params(sample_parser)
    sample_parser.add_argument("--steps", type=_positive_int, default=1000, help="Steps per walk.")
    sample_parser.add_argument("--walks", type=_positive_int, default=100000, help="Number of walks.")
    sample_parser.add_argument("--seed", type=_nonnegative_int, default=0, help="Random seed.")
    sample_parser.add_argument("--bins", type=_positive_float, default=0.02, help="Histogram bin width.")
    sample_parser.add_argument("--walk", default="zeta", choices=montecarlo.WALK_KINDS, help="Step sizes n^-s or s^-n.")

    lattice_parser = subparsers.add_parser("lattice", parents=[common], help="Exact atoms of the N-step walk.")
    _add_params(lattice_parser)
    lattice_parser.add_argument("--steps", type=_nonnegative_int, required=True, help="Number of steps N.")

    typicality_parser = subparsers.add_parser("typicality", parents=[common], help="Typicality report of a coefficient sequence.")
    typicality_parser.add_argument("--source", default="mobius", choices=commands.SOURCES, help="Coefficient sequence.")
    typicality_parser.add_argument("--n", type=_positive_int, default=1000000, help="Sequence length.")
    typicality_parser.add_argument("--s", type=_exponent, default=2.0, help="Exponent of the partial sum.")
    typicality_parser.add_argument("--p", type=_probability, help="Probability weight of sampled coefficients.")
    typicality_parser.add_argument("--p-ref", type=_probability, help="Reference nonzero frequency.")
    typicality_parser.add_argument("--eps", type=_positive_float, help="Exponent offset of the growth curve.")
    typicality_parser.add_argument("--seed", type=_nonnegative_int, default=0, help="Random seed of sampled coefficients.")

    power_parser = subparsers.add_parser("power", parents=[common], help="Power-walk products against their sinc forms.")
    power_parser.add_argument("--kind", default="euler_sinc", choices=product_eval.POWER_KINDS, help="Product.")
    power_parser.add_argument("--t-max", type=_positive_float, default=20.0, help="Grid covers [-t_max, t_max].")
    power_parser.add_argument("--points", type=_positive_int, default=1001, help="Number of grid points.")
    power_parser.add_argument("--s", type=_positive_int, help="Integer base of morrison_general.")
    return parser


def _create_run_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> commands.RunConfig:
    """Validate cross-field constraints and build the run config."""
    if args.config:
        try:
            settings = FileConfig(args.config)
        except (OSError, ValueError) as e:
            parser.error(f"Config file {args.config} could not be loaded: {e}")
    else:
        settings = PresetConfig(args.preset)

    if file_resources.output_exists(args.output) and not args.force:
        parser.error(f"Output file {args.output} exists, pass --force to overwrite it.")
    try:
        worker_count()
    except DomainError as e:
        parser.error(str(e))

    if args.command == "power" and args.kind == "morrison_general" and (args.s is None or args.s < 2):
        parser.error("morrison_general needs an integer --s >= 2")
    if args.command == "typicality" and args.source == "sampled" and args.p is None:
        parser.error("--source sampled needs --p")
    if args.command == "sample" and args.walk == "geometric" and not args.s > 1:
        parser.error("--walk geometric needs --s > 1")

    fields = {
        key: value
        for key, value in vars(args).items()
        if key in commands.RunConfig.__dataclass_fields__ and value is not None
    }
    p_ref = fields.pop("p_ref", None)
    config = commands.RunConfig(
        fmt=args.format,
        settings=settings,
        p_ref=float(p_ref) if p_ref is not None else None,
        p_grid=args.p_grid if getattr(args, "p_grid", None) else [],
        **{k: v for k, v in fields.items() if k not in ("p_grid", "settings")},
    )
    if config.s is not None:
        config.s = float(config.s)
    return config


def _main(argv: Optional[List[str]] = None) -> int:
    """Run command line app with return code."""
    parser = set_up_argparser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    config = _create_run_config(parser, args)

    table = commands.execute(config)
    if config.output:
        output.print_summary(f"{args.command}: {table.n_rows} rows written to {config.output}")
    return 0


def run() -> None:
    """Start app."""
    try:
        sys.exit(_main())
    except Exception as e:
        output.print_failed(str(e))
        sys.exit(1)
