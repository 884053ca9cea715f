#!/usr/bin/env python3
"""
QuadBound - Worst-case error bounds for quadrature

This module serves as the main entry point for the quadbound command line.
It parses the command, merges flags over the configuration and runs one of
the bounds, adversary, sweep or verify commands.
"""

import argparse
import logging
import sys
from typing import List, Optional

import yaml

from quadbound.src.cli import build_run_config, execute
from quadbound.src.config_manager import ConfigManager
from quadbound.src.error_handler import (
    ErrorHandler,
    IntegrationError,
    QuadboundError,
    UsageError,
    VerificationError,
    setup_error_handling,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def setup_logging(log_level: str = "WARNING") -> None:
    """Set up logging configuration for the time before the config file is read."""
    numeric_level = getattr(logging, log_level.upper(), None)
    if not isinstance(numeric_level, int):
        raise ValueError(f"Invalid log level: {log_level}")

    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler()],
    )


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None,
                        help="Path to configuration file (defaults to the packaged one)")
    common.add_argument("--log-level", type=str, choices=LOG_LEVELS, default=None,
                        help="Set the logging level")
    common.add_argument("--ellipse", action="append", metavar="c=<r>",
                        help="Ellipse parameter c > 1; repeatable, accepts c=1.5,2")
    common.add_argument("--preset", action="append", metavar="NAME",
                        help="Named ellipse from the presets section; repeatable")
    common.add_argument("--weight", choices=["lebesgue", "chebyshev"], default=None,
                        help="Weight of the integral")
    common.add_argument("--n", type=str, default=None, help="Comma-separated node counts")
    common.add_argument("--N", type=str, default=None, help="Comma-separated information counts")
    common.add_argument("--M", type=float, default=None, help="Bound on |f| over the domain")
    common.add_argument("--eps", type=float, default=None, help="Target accuracy for node counts")
    common.add_argument("--tol", type=float, default=None, help="Integration tolerance")
    common.add_argument("--seed", type=int, default=None, help="Seed of every random choice")
    common.add_argument("--out", type=str, default=None, help="Output file or directory")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="Report format")
    common.add_argument("--search-multiplicities", action="store_true",
                        help="Let the J_+ minimiser try every split of N into multiplicities")
    return common


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        prog="quadbound",
        description="QuadBound - worst-case error bounds for quadrature of bounded analytic functions",
    )
    common = _common_parser()
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")
    commands.add_parser("bounds", parents=[common], help="Tabulate lower and upper bounds per (c, n)")
    commands.add_parser("adversary", parents=[common],
                        help="Build Gauss rules, their worst-case functions and the measured errors")
    commands.add_parser("sweep", parents=[common],
                        help="Bound grid, node counts and J_+ minima over a parameter grid")
    verify = commands.add_parser("verify", parents=[common], help="Run the acceptance suite")
    verify.add_argument("--dev-gamma-scale", type=float, default=None,
                        help="Development only: scale the gamma bound to check that verify fails")
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit status."""
    args = parse_args(argv)
    setup_logging(args.log_level or "WARNING")

    try:
        config_manager = ConfigManager(args.config)
    except (OSError, ValueError, yaml.YAMLError) as e:
        print(f"quadbound: invalid configuration: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_error_handling(config_manager, args.log_level)
    error_handler = ErrorHandler(config_manager)

    try:
        cfg = build_run_config(args, config_manager)
        error_handler.log_info("main", f"Running {cfg.command} on c={list(cfg.c_list)}, n={list(cfg.n_list)}")
        status = execute(cfg, config_manager, error_handler)
    except UsageError as e:
        error_handler.track_failure("usage", args.command, str(e))
        print(f"quadbound: {e}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as e:
        error_handler.log_error("main", "Verification failed", e)
        return EXIT_FAILURE
    except IntegrationError as e:
        error_handler.track_failure("integration", args.command, str(e),
                                    {"estimate": e.estimate, "panels": e.panels})
        print(f"quadbound: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except QuadboundError as e:
        error_handler.log_error("main", "Fatal error", e)
        print(f"quadbound: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE
    finally:
        if error_handler.failure_count():
            error_handler.log_warning(
                "main",
                f"There were {error_handler.failure_count()} failures",
                error_handler.summary(),
            )
    return status


if __name__ == "__main__":
    sys.exit(main())
