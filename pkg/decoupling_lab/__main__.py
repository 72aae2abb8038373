"""
Command-line entry point for the decoupling experiments.
"""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import List, Optional

import decoupling_lab.config as config
from decoupling_lab import __version__
from decoupling_lab.experiment_config import COMMANDS, load_config
from decoupling_lab.factories import get_handle_error, get_logger, get_result_writer, get_service
from decoupling_lab.results.result_writer import RunManifest
from decoupling_lab.sampling.seeded_source import MAX_SEED
from decoupling_lab.services.capacity_service import CAPACITY_COLUMNS
from decoupling_lab.services.code_service import CODE_COLUMNS
from decoupling_lab.services.decouple_service import DECOUPLE_COLUMNS
from decoupling_lab.services.typicality_service import BOUND_COLUMNS
from decoupling_lab.utils.error_handler import (
    EXIT_INVARIANT,
    EXIT_SUCCESS,
    DecouplingLabError,
    exit_code_for,
)
from decoupling_lab.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

DEFAULT_FORMATS = {'decouple': 'csv', 'code': 'csv', 'capacity': 'json', 'typicality': 'json'}

EPILOG = f"""\
CSV columns:
  decouple:   {', '.join(DECOUPLE_COLUMNS)}
  code:       {', '.join(CODE_COLUMNS)}
  capacity:   {', '.join(CAPACITY_COLUMNS)}
  typicality: {', '.join(BOUND_COLUMNS)}
Floats carry 17 significant digits. Every run writes {config.MANIFEST_FILE} first.

Exit codes: 0 success, 1 failed invariant, 2 usage or config error.
Set DECOUPLING_LAB_BUDGET to change the dimension budget (matrix entries).
"""


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return seed


def _threads(value: str) -> int:
    threads = int(value)
    if threads < 1:
        raise argparse.ArgumentTypeError(f"threads must be positive, got {value}")
    return threads


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='decoupling-lab',
        description="Decoupling, random-code and typicality experiments for quantum channels.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('command', choices=COMMANDS, help="experiment to run")
    parser.add_argument('--config', required=True, type=Path, help="JSON experiment config")
    parser.add_argument('--seed', type=_seed, default=None, help="master seed, overrides the config")
    parser.add_argument('--out', type=Path, default=None, help="output directory (default: results/<command>)")
    parser.add_argument('--threads', type=_threads, default=None, help="worker bound (default: all cores)")
    parser.add_argument('--format', choices=('csv', 'json'), default=None, help="table format")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the experiment runner."""
    args = build_parser().parse_args(argv)
    setup_logging()
    handle_error = get_handle_error()
    log = get_logger()
    try:
        cfg = load_config(args.config, args.command)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        threads = args.threads or config.DEFAULT_THREADS
        out_dir = args.out or config.DEFAULT_OUT_DIR / args.command
        writer = get_result_writer(out_dir)
        writer.write_manifest(RunManifest(
            command=args.command,
            config_path=str(args.config),
            seed=cfg.seed,
            out_dir=str(out_dir),
            version=__version__,
            threads=threads,
        ))
        passed = get_service(args.command).run(cfg, writer, threads, args.format or DEFAULT_FORMATS[args.command])
    except DecouplingLabError as e:
        handle_error(e, args.command)
        return exit_code_for(e)
    except Exception as e:
        handle_error(e, args.command)
        return EXIT_INVARIANT
    if not passed:
        log.error(f"{args.command}: required checks failed, see {out_dir}")
        return EXIT_INVARIANT
    log.info(f"{args.command} finished, results in {out_dir}")
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
