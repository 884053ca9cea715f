"""
CLI Package

This package provides the run configuration and the bounds, adversary,
sweep and verify commands behind the quadbound entry point.
"""

from quadbound.src.cli.commands import (
    COMMANDS,
    RunConfig,
    bound_rows,
    build_run_config,
    execute,
    node_count_rows,
    parse_number_list,
    run_adversary,
    run_bounds,
    run_sweep,
    run_verify,
)

__all__ = [
    "COMMANDS",
    "RunConfig",
    "bound_rows",
    "build_run_config",
    "execute",
    "node_count_rows",
    "parse_number_list",
    "run_adversary",
    "run_bounds",
    "run_sweep",
    "run_verify",
]
