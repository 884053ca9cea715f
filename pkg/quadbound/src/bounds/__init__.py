"""
Bounds Package

This package provides the closed-form lower and upper bound calculators and
the node-count estimators.
"""

from quadbound.src.bounds.bounds import (
    BOUND_KINDS,
    GAUSS_UPPER_METHODS,
    BoundRecord,
    bakhvalov_kappa0,
    chebyshev_witness_lower,
    ellipse_log_base,
    ellipse_node_estimates,
    gauss_legendre_upper,
    gauss_loss_bound,
    info_bounds,
    kappa_g,
    koebe_form,
    new_lower_ellipse,
    new_lower_gamma,
    new_lower_measure,
    new_lower_simple,
    optimality_ratio,
    osipenko_chebyshev,
    petras_explicit_lower,
    petras_kn,
    szego_limit,
    to_record,
)

__all__ = [
    "BOUND_KINDS",
    "GAUSS_UPPER_METHODS",
    "BoundRecord",
    "bakhvalov_kappa0",
    "chebyshev_witness_lower",
    "ellipse_log_base",
    "ellipse_node_estimates",
    "gauss_legendre_upper",
    "gauss_loss_bound",
    "info_bounds",
    "kappa_g",
    "koebe_form",
    "new_lower_ellipse",
    "new_lower_gamma",
    "new_lower_measure",
    "new_lower_simple",
    "optimality_ratio",
    "osipenko_chebyshev",
    "petras_explicit_lower",
    "petras_kn",
    "szego_limit",
    "to_record",
]
