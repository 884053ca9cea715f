"""
Quadrature Package

This package provides weight measures, the reference integrator, orthonormal
polynomials, quadrature rules with derivative data and error measurement.
"""

from quadbound.src.quadrature.integrator import (
    IntegrationResult,
    IntegrationSettings,
    WeightMeasure,
    adaptive_integrate,
    integrate,
    integrate_weighted,
    monomial_moment,
    omega_modulus,
)
from quadbound.src.quadrature.quadrature import (
    AnalyticFunction,
    DerivativeSettings,
    ErrorMeasurement,
    OrthonormalPolynomials,
    QuadratureRule,
    apply_rule,
    derivative_eval,
    exactness_degree,
    gauss_rule,
    measure_error,
    orthonormal_polys,
    quadrature_error,
    recurrence_coefficients,
    stieltjes,
)

__all__ = [
    "AnalyticFunction",
    "DerivativeSettings",
    "ErrorMeasurement",
    "IntegrationResult",
    "IntegrationSettings",
    "OrthonormalPolynomials",
    "QuadratureRule",
    "WeightMeasure",
    "adaptive_integrate",
    "apply_rule",
    "derivative_eval",
    "exactness_degree",
    "gauss_rule",
    "integrate",
    "integrate_weighted",
    "measure_error",
    "monomial_moment",
    "omega_modulus",
    "orthonormal_polys",
    "quadrature_error",
    "recurrence_coefficients",
    "stieltjes",
]
