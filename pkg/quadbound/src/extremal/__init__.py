"""
Extremal Package

This package builds the extremal Blaschke-product functions, evaluates and
minimises J_+ and constructs worst-case adversaries for quadrature rules.
"""

from quadbound.src.extremal.extremal import (
    AdversaryResult,
    NodeScheme,
    OptimizerConfig,
    adversary_for_rule,
    competitor_function,
    compositions,
    extremal_function,
    jplus_exact,
    jplus_minimize,
    round_even,
    sample_table,
    start_nodes,
    symmetrize_real,
)

__all__ = [
    "AdversaryResult",
    "NodeScheme",
    "OptimizerConfig",
    "adversary_for_rule",
    "competitor_function",
    "compositions",
    "extremal_function",
    "jplus_exact",
    "jplus_minimize",
    "round_even",
    "sample_table",
    "start_nodes",
    "symmetrize_real",
]
