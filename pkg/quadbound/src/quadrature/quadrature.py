"""
Quadrature rules with derivative data, Gauss rules and error measurement.

A rule S(f) = sum_j sum_{k < r_j} b_kj f^(k)(z_j) uses |R| = sum r_j pieces
of information. Derivatives of analytic integrands are taken with the
Cauchy integral on a circle, discretised by the trapezoid rule.
"""

import logging
from collections import abc
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh_tridiagonal
from scipy.special import factorial

from quadbound.src.error_handler import DomainError, UnsupportedError
from quadbound.src.quadrature.integrator import (
    IntegrationSettings,
    WeightMeasure,
    integrate_weighted,
    monomial_moment,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DerivativeSettings:
    """Circle sampling used by derivative_eval."""

    initial_samples: int = 64
    max_samples: int = 8192
    agreement: float = 1e-12
    radius_cap: float = 0.1

    @classmethod
    def from_config(cls, config_manager: Optional[Any]) -> "DerivativeSettings":
        if config_manager is None:
            return cls()
        section = config_manager.get_section("derivatives")
        return cls(
            initial_samples=int(section.get("initial_samples", cls.initial_samples)),
            max_samples=int(section.get("max_samples", cls.max_samples)),
            agreement=float(section.get("agreement", cls.agreement)),
            radius_cap=float(section.get("radius_cap", cls.radius_cap)),
        )


@dataclass
class QuadratureRule:
    """
    Nodes z_j in [-1, 1] (strictly ascending), orders r_j and coefficients b_kj.

    coeffs[j][k] multiplies f^(k)(z_j).
    """

    nodes: List[float]
    orders: List[int]
    coeffs: List[List[float]]
    name: str = ""

    def __post_init__(self) -> None:
        self.nodes = [float(z) for z in self.nodes]
        self.orders = [int(r) for r in self.orders]
        self.coeffs = [[float(b) for b in row] for row in self.coeffs]
        if not self.nodes:
            raise DomainError("A quadrature rule needs at least one node")
        if len(self.orders) != len(self.nodes) or len(self.coeffs) != len(self.nodes):
            raise DomainError("Rule nodes, orders and coefficients differ in length")
        if any(r < 1 for r in self.orders):
            raise DomainError("Rule orders must be positive")
        if any(len(row) != r for row, r in zip(self.coeffs, self.orders)):
            raise DomainError("Coefficient rows must match the node orders")
        if any(abs(z) > 1.0 + 1e-15 for z in self.nodes):
            raise DomainError("Rule nodes must lie in [-1, 1]")
        if any(b <= a for a, b in zip(self.nodes, self.nodes[1:])):
            raise DomainError("Rule nodes must be strictly ascending")

    @property
    def info_count(self) -> int:
        return sum(self.orders)

    @property
    def weights(self) -> np.ndarray:
        """Function-value coefficients b_0j."""
        return np.array([row[0] for row in self.coeffs])

    @classmethod
    def from_weights(cls, nodes: Sequence[float], weights: Sequence[float], name: str = "") -> "QuadratureRule":
        return cls(list(nodes), [1] * len(nodes), [[w] for w in weights], name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nodes": list(self.nodes),
            "orders": list(self.orders),
            "coeffs": [list(row) for row in self.coeffs],
            "info_count": self.info_count,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "QuadratureRule":
        """
        Build a rule from its JSON form.

        Raises:
            DomainError: If info_count disagrees with the orders
        """
        rule = cls(data["nodes"], data["orders"], data["coeffs"], data.get("name", ""))
        if "info_count" in data and int(data["info_count"]) != rule.info_count:
            raise DomainError(f"info_count {data['info_count']} != sum of orders {rule.info_count}")
        return rule


@dataclass
class AnalyticFunction:
    """
    A function holomorphic on a domain and bounded there by bound_M.

    `eval` must accept complex numpy arrays.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    domain: Any
    bound_M: float = 1.0
    real_on_real: bool = True
    name: str = ""

    def __call__(self, z: Any) -> Any:
        return self.eval(np.asarray(z) if np.ndim(z) else z)

    def check_invariants(self, interior: np.ndarray, segment: Optional[np.ndarray] = None) -> Tuple[bool, bool]:
        """Return (bounded on the interior samples, real on the segment samples)."""
        bounded = bool(np.all(np.abs(self.eval(np.asarray(interior, dtype=complex))) <= self.bound_M * (1 + 1e-9)))
        if segment is None:
            segment = np.linspace(-1.0, 1.0, 201)
        real = True
        if self.real_on_real:
            values = np.asarray(self.eval(np.asarray(segment, dtype=complex)))
            real = bool(np.all(np.abs(values.imag) <= 1e-12 * self.bound_M))
        return bounded, real


class OrthonormalPolynomials(abc.Sequence):
    """
    Orthonormal polynomials p_0..p_n of a weight, from their recurrence

        x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1},   p_0 = 1/sqrt(mass).
    """

    def __init__(self, a: np.ndarray, b: np.ndarray, mass: float) -> None:
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.mass = float(mass)

    def __len__(self) -> int:
        return len(self.a)

    def __getitem__(self, k: Any) -> Any:
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        if k < 0:
            k += len(self)
        if not 0 <= k < len(self):
            raise IndexError(k)
        return lambda x, _k=k: self.evaluate(x, _k)[_k]

    def evaluate(self, x: Any, degree: Optional[int] = None) -> np.ndarray:
        """Values p_0(x)..p_degree(x) stacked along the first axis."""
        degree = len(self) - 1 if degree is None else degree
        x = np.asarray(x)
        x = x.astype(complex) if np.iscomplexobj(x) else x.astype(float)
        values = np.empty((degree + 1,) + x.shape, dtype=x.dtype)
        values[0] = 1.0 / np.sqrt(self.mass)
        if degree >= 1:
            values[1] = (x - self.a[0]) * values[0] / self.b[1]
        for k in range(1, degree):
            values[k + 1] = ((x - self.a[k]) * values[k] - self.b[k] * values[k - 1]) / self.b[k + 1]
        return values

    def value_and_derivative(self, x: Any, degree: int) -> Tuple[np.ndarray, np.ndarray]:
        """p_degree and its derivative."""
        x = np.asarray(x, dtype=float)
        p_prev, p = np.zeros_like(x), np.full_like(x, 1.0 / np.sqrt(self.mass))
        d_prev, d = np.zeros_like(x), np.zeros_like(x)
        for k in range(degree):
            b_k = self.b[k] if k else 0.0
            p_next = ((x - self.a[k]) * p - b_k * p_prev) / self.b[k + 1]
            d_next = (p + (x - self.a[k]) * d - b_k * d_prev) / self.b[k + 1]
            p_prev, p, d_prev, d = p, p_next, d, d_next
        return p, d


def _discretised_measure(w: WeightMeasure, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and positive weights of a Gauss-Legendre discretisation of the weight."""
    t, v = leggauss(points)
    if w.singular_endpoints:
        theta = 0.5 * np.pi * (t + 1.0)
        x = np.cos(theta)
        mass = 0.5 * np.pi * v * w.density(x) * np.sin(theta)
    else:
        x = t
        mass = v * w.density(x)
    return x, mass


def stieltjes(nodes: np.ndarray, weights: np.ndarray, n_terms: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Recurrence coefficients (a_k, b_k) of the discrete measure sum weights * delta(nodes).

    b[0] is set to sqrt of the total mass.
    """
    a = np.zeros(n_terms)
    b = np.zeros(n_terms)
    sum_0 = np.sum(weights)
    b[0] = np.sqrt(sum_0)
    a[0] = nodes.dot(weights) / sum_0
    p1 = np.zeros_like(nodes)
    p2 = np.ones_like(nodes)
    for k in range(n_terms - 1):
        p0, p1 = p1, p2
        p2 = (nodes - a[k]) * p1 - b[k] ** 2 * p0
        sum_1 = weights.dot(p2 ** 2)
        sum_2 = nodes.dot(weights * p2 ** 2)
        a[k + 1] = sum_2 / sum_1
        b[k + 1] = np.sqrt(sum_1 / sum_0)
        sum_0 = sum_1
    return a, b


def recurrence_coefficients(w: WeightMeasure, n_terms: int) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal recurrence coefficients a_0..a_{n-1}, b_1..b_{n-1} (b_0 unused)."""
    k = np.arange(n_terms, dtype=float)
    if w.kind == "lebesgue":
        b = np.zeros(n_terms)
        b[1:] = k[1:] / np.sqrt(4.0 * k[1:] ** 2 - 1.0)
        return np.zeros(n_terms), b
    if w.kind == "chebyshev":
        b = np.full(n_terms, 0.5)
        b[0] = 0.0
        if n_terms > 1:
            b[1] = np.sqrt(0.5)
        return np.zeros(n_terms), b
    if w.kind == "custom":
        points = max(400, 8 * n_terms)
        nodes, weights = _discretised_measure(w, points)
        logger.info(f"Stieltjes recurrence for a custom weight: {n_terms} terms on {points} points")
        a, b = stieltjes(nodes, weights, n_terms)
        b[0] = 0.0
        return a, b
    raise UnsupportedError(f"No recurrence for weight kind {w.kind}")


def orthonormal_polys(w: WeightMeasure, n_max: int) -> OrthonormalPolynomials:
    """
    Orthonormal polynomials p_0..p_{n_max} of the weight.

    Raises:
        DomainError: If n_max < 0
    """
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")
    a, b = recurrence_coefficients(w, n_max + 1)
    return OrthonormalPolynomials(a, b, w.total_mass)


def gauss_rule(w: WeightMeasure, n: int) -> QuadratureRule:
    """
    The n-point Gauss rule of the weight.

    Nodes are eigenvalues of the Jacobi matrix, polished by Newton steps on
    p_n; weights are the Christoffel numbers 1 / sum_{k<n} p_k(z)^2.

    Args:
        w: Weight measure
        n: Number of nodes

    Returns:
        QuadratureRule with ascending nodes, all of order 1

    Raises:
        DomainError: If n < 1
        UnsupportedError: For an unknown weight kind
    """
    if n < 1:
        raise DomainError(f"Gauss rule needs n >= 1, got {n}")
    if w.kind == "chebyshev":
        j = np.arange(n, 0, -1)
        nodes = np.cos((2 * j - 1) * np.pi / (2 * n))
        return QuadratureRule.from_weights(nodes, np.full(n, np.pi / n), f"gauss_chebyshev_{n}")

    polys = orthonormal_polys(w, n)
    if n == 1:
        return QuadratureRule.from_weights([polys.a[0]], [w.total_mass], f"gauss_{w.kind}_1")

    nodes = eigh_tridiagonal(polys.a[:n], polys.b[1:n], eigvals_only=True)
    for _ in range(3):
        p, dp = polys.value_and_derivative(nodes, n)
        nodes = nodes - p / dp
    if w.kind == "lebesgue":
        nodes = 0.5 * (nodes - nodes[::-1])
    nodes = np.sort(np.clip(nodes, -1.0, 1.0))
    values = polys.evaluate(nodes, n - 1)
    weights = 1.0 / np.sum(values ** 2, axis=0)
    if n >= 32:
        logger.info(f"Built {n}-point Gauss rule for the {w.kind} weight")
    return QuadratureRule.from_weights(nodes, weights, f"gauss_{w.kind}_{n}")


def derivative_eval(f: AnalyticFunction, x: float, k: int, radius: float,
                    settings: Optional[DerivativeSettings] = None) -> float:
    """
    f^(k)(x) by the trapezoid rule on the Cauchy integral over |z - x| = radius.

    Samples double from settings.initial_samples until two successive
    estimates agree.

    Args:
        f: Function analytic on the disk of the given radius around x
        x: Real point of the segment
        k: Derivative order
        radius: Radius of the integration circle
        settings: Sample counts and agreement threshold

    Returns:
        The real part of f^(k)(x)

    Raises:
        DomainError: If k < 0, radius <= 0 or radius exceeds delta_D(x)
    """
    if k < 0:
        raise DomainError(f"Derivative order must be nonnegative, got {k}")
    if k == 0:
        return float(np.real(f(complex(x))))
    if radius <= 0:
        raise DomainError(f"Cauchy radius must be positive, got {radius}")
    delta = float(f.domain.delta_at(x)) if f.domain is not None else np.inf
    if radius > delta:
        raise DomainError(f"Cauchy radius {radius} exceeds delta_D({x}) = {delta}")

    settings = settings or DerivativeSettings()
    k_fact = float(factorial(k, exact=True))

    def estimate(samples: int) -> Tuple[float, float]:
        theta = 2.0 * np.pi * np.arange(samples) / samples
        values = np.asarray(f(x + radius * np.exp(1j * theta)), dtype=complex)
        coefficient = np.mean(values * np.exp(-1j * k * theta))
        return float(np.real(coefficient)) * k_fact / radius ** k, float(np.max(np.abs(values)))

    samples = settings.initial_samples
    previous, _ = estimate(samples)
    while samples < settings.max_samples:
        samples *= 2
        current, peak = estimate(samples)
        scale = max(abs(current), k_fact * peak / radius ** k)
        if abs(current - previous) <= settings.agreement * scale:
            return current
        previous = current
    logger.warning(f"Derivative of order {k} at x={x} did not settle within {samples} samples")
    return previous


def apply_rule(rule: QuadratureRule, f: AnalyticFunction,
               settings: Optional[DerivativeSettings] = None) -> float:
    """
    S(f) = sum_j sum_k b_kj f^(k)(z_j), derivatives on circles of radius min(delta_D/2, cap).

    Args:
        rule: Rule with nodes, orders and coefficients
        f: Function bounded on its domain
        settings: Derivative sampling settings

    Returns:
        The rule value S(f)
    """
    settings = settings or DerivativeSettings()
    nodes = np.asarray(rule.nodes)
    values = np.real(np.asarray(f(nodes.astype(complex))))
    total = float(np.dot(rule.weights, values))
    for z, order, row in zip(rule.nodes, rule.orders, rule.coeffs):
        if order == 1:
            continue
        radius = min(0.5 * float(f.domain.delta_at(z)), settings.radius_cap)
        for k in range(1, order):
            if row[k] != 0.0:
                total += row[k] * derivative_eval(f, z, k, radius, settings)
    return total


@dataclass(frozen=True)
class ErrorMeasurement:
    """Quadrature error R(f) = I(f) - S(f) with the integration metadata behind it."""

    error: float
    integral: float
    rule_value: float
    integral_error_estimate: float
    tol: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "error": self.error,
            "integral": self.integral,
            "rule_value": self.rule_value,
            "integral_error_estimate": self.integral_error_estimate,
            "tol": self.tol,
        }


def measure_error(rule: QuadratureRule, f: AnalyticFunction, w: WeightMeasure, tol: float,
                  integration: Optional[IntegrationSettings] = None,
                  derivatives: Optional[DerivativeSettings] = None) -> ErrorMeasurement:
    """
    I(f), S(f) and their difference for a function real on the real line.

    Raises:
        DomainError: If f is not real on the real line
        IntegrationError: If I(f) cannot be resolved to tol
    """
    if not f.real_on_real:
        raise DomainError("Integrand must be real on the real line")
    result = integrate_weighted(lambda xs: np.real(f(xs)), w, tol, integration)
    rule_value = apply_rule(rule, f, derivatives)
    return ErrorMeasurement(result.value - rule_value, result.value, rule_value,
                            result.error_estimate, tol)


def quadrature_error(rule: QuadratureRule, f: AnalyticFunction, w: WeightMeasure, tol: float,
                     integration: Optional[IntegrationSettings] = None,
                     derivatives: Optional[DerivativeSettings] = None) -> float:
    """R(f, alpha) = I(f, alpha) - S(f)."""
    return measure_error(rule, f, w, tol, integration, derivatives).error


def exactness_degree(rule: QuadratureRule, w: WeightMeasure, max_degree: int,
                     tol: float = 1e-12) -> int:
    """Largest m <= max_degree such that the rule integrates 1, x, ..., x^m exactly; -1 if none."""
    if any(r > 1 for r in rule.orders):
        raise UnsupportedError("Monomial exactness is checked for function-value rules only")
    nodes = np.asarray(rule.nodes)
    weights = rule.weights
    degree = -1
    for m in range(max_degree + 1):
        moment = monomial_moment(w, m)
        if abs(float(np.dot(weights, nodes ** m)) - moment) > tol * max(1.0, abs(moment)):
            break
        degree = m
    return degree
