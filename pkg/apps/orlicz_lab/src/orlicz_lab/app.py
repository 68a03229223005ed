import argparse
import logging
import sys

from pydantic import ValidationError

from orlicz_lab.cli.commands import ExitCode, cmd_kconst, cmd_norm, cmd_verify, describe_validation_error, load_config
from orlicz_lab.cli.models import NormKind, RunOptions
from orlicz_lab.core.config import config
from orlicz_lab.core.errors import ConfigError, OrliczLabError
from orlicz_lab.verify.checks import StatementExponent


logging.basicConfig(
    level=getattr(logging, config.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orlicz-lab",
        description="Orlicz gauge norms, weighted Poincare constants and numerical checks of the inequalities built on them.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON experiment config.")
    common.add_argument("--out", default=None, help="Directory receiving the run files.")
    common.add_argument("--seed", type=int, default=None, help="Overrides the config seed.")
    common.add_argument(
        "--jobs", type=int, default=config.JOBS, help="Worker threads (default: ORLICZ_LAB_JOBS or 1)."
    )
    common.add_argument(
        "--statement-exponent",
        choices=[choice.value for choice in StatementExponent],
        default=config.STATEMENT_EXPONENT,
        help="Exponent of nu1(I) in the second constant: 1/s1 (proof) or s1 (statement).",
    )
    common.add_argument("--tolerance", type=float, default=config.TOLERANCE, help="Relative verification tolerance.")
    common.add_argument("--debug-c1-scale", type=float, default=1.0, help=argparse.SUPPRESS)

    commands = parser.add_subparsers(dest="command", required=True)
    norm = commands.add_parser("norm", parents=[common], help="Evaluate norms of a test function.")
    norm.add_argument("--kind", choices=[kind.value for kind in NormKind], default=None, help="Single norm to evaluate.")
    commands.add_parser("kconst", parents=[common], help="Compute K and K~ on both axes.")
    commands.add_parser("verify", parents=[common], help="Run the verification battery.")
    return parser


def _options(args: argparse.Namespace) -> RunOptions:
    try:
        return RunOptions(
            seed=args.seed,
            jobs=args.jobs,
            out_dir=args.out,
            statement_exponent=args.statement_exponent,
            tolerance=args.tolerance,
            abs_floor=config.ABS_FLOOR,
            kind=getattr(args, "kind", None),
            c1_scale=args.debug_c1_scale,
        )
    except ValidationError as error:
        raise ConfigError(describe_validation_error(error), field="arguments") from error


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        options = _options(args)
        run = load_config(args.config)
        if args.command == "norm":
            return int(cmd_norm(run, options))
        if args.command == "kconst":
            return int(cmd_kconst(run, options))
        return int(cmd_verify(run, options, args.config))
    except ValidationError as error:
        sys.stderr.write(f"invalid config:\n{describe_validation_error(error)}\n")
        return int(ExitCode.CONFIG_ERROR)
    except ConfigError as error:
        sys.stderr.write(f"invalid config: {error}\n")
        return int(ExitCode.CONFIG_ERROR)
    except OrliczLabError as error:
        # a valid config whose numerics cannot be carried out, e.g. a zero-mass measure
        logger.error(f"numerical error: {type(error).__name__}: {error}")
        return int(ExitCode.NUMERIC_ERROR)


if __name__ == "__main__":
    raise SystemExit(main())
