import argparse
import sys

from dotenv import load_dotenv
from loguru import logger

from commands import COMMANDS, CommandRunner, load_config
from common import EXIT_FAILURE, GWIError
from lab import EXPERIMENTS
from utils import configure_logging

load_dotenv()

HELP = {
    "generate": "grow GWI forests and write them as JSON lines",
    "encode": "write the depth-first, height and profile paths of forests as CSV",
    "verify": "run the exact identity suite on forests; exit 3 on any violation",
    "simulate": "build one realization of the Brownian-case limit objects",
    "experiment": "run a convergence experiment and write its report",
    "report": "re-render a stored report as a KS table and re-check its verdict",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwi",
        description="Multitype GWI forests, their encodings and their scaling limits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=HELP[name], description=HELP[name])
        cmd.add_argument("--config", help="JSON file validated against RunConfig")
        cmd.add_argument("--seed", type=int, help="root seed of every replicate stream")
        cmd.add_argument("--threads", type=int, help="worker count (default: GWI_THREADS or all cores)")
        cmd.add_argument("--output", dest="output_dir", help="output directory (default: GWI_OUTPUT_DIR or ./runs)")
        cmd.add_argument("--log-level", help="loguru level (default: GWI_LOG_LEVEL or INFO)")
        cmd.add_argument("--dry-run", action="store_true", default=None, help="echo the resolved config and stop")
        cmd.add_argument("--replicates", type=int)
        cmd.add_argument("--forests", type=int, help="number of forests to generate when no --input is given")
        cmd.add_argument("--input", dest="inputs", action="append", help="input file; repeat for several")
        if name == "experiment":
            cmd.add_argument("--experiment", choices=sorted(EXPERIMENTS))
        if name == "simulate":
            cmd.add_argument(
                "--semimartingale", action="store_true", default=None, help="multiply local times by beta_j/2"
            )
    return parser


def overrides(args: argparse.Namespace) -> dict:
    keys = ("command", "seed", "threads", "output_dir", "log_level", "dry_run", "replicates", "forests", "inputs", "experiment", "semimartingale")
    return {key: getattr(args, key, None) for key in keys}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        config = load_config(args.config, overrides(args))
        if config.log_level and not args.log_level:
            configure_logging(config.log_level)
        return CommandRunner(config).run()
    except GWIError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
