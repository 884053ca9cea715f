"""
Weight measures on [-1, 1] and the reference integrator.

The integrator is an adaptive bisection: every panel compares its own
Gauss-Legendre value with the sum over its two halves, and panels that
miss their share of the tolerance are split. Weighted integrals are taken
in theta = arccos(x), where Chebyshev-type endpoint singularities vanish
and functions of arcsin(x) stay smooth.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from quadbound.src.error_handler import DomainError, IntegrationError, UnsupportedError

logger = logging.getLogger(__name__)

WEIGHT_KINDS = ("lebesgue", "chebyshev", "custom")


@dataclass(frozen=True)
class IntegrationSettings:
    """Panel order and panel budget of the adaptive integrator."""

    panel_order: int = 15
    max_panels: int = 4096

    @classmethod
    def from_config(cls, config_manager: Optional[Any]) -> "IntegrationSettings":
        if config_manager is None:
            return cls()
        return cls(
            panel_order=int(config_manager.get("integration", "panel_order", cls.panel_order)),
            max_panels=int(config_manager.get("integration", "max_panels", cls.max_panels)),
        )


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error_estimate: float
    panels: int


@dataclass(frozen=True)
class WeightMeasure:
    """
    Absolutely continuous measure d(alpha) = p(x) dx on [-1, 1].

    Custom weights must say whether their density is singular at the
    endpoints; singular densities are discretised in the cosine variable
    when recurrence coefficients are built.
    """

    kind: str
    density: Callable[[np.ndarray], np.ndarray]
    total_mass: float
    szego_class: bool = True
    singular_endpoints: bool = False

    def __post_init__(self) -> None:
        if self.kind not in WEIGHT_KINDS:
            raise UnsupportedError(f"Unknown weight kind: {self.kind}")

    @classmethod
    def lebesgue(cls) -> "WeightMeasure":
        return cls("lebesgue", lambda x: np.ones_like(np.asarray(x, dtype=float)), 2.0)

    @classmethod
    def chebyshev(cls) -> "WeightMeasure":
        def density(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore"):
                return 1.0 / np.sqrt(1.0 - x * x)

        return cls("chebyshev", density, float(np.pi), singular_endpoints=True)

    @classmethod
    def custom(cls, density: Callable[[np.ndarray], np.ndarray], singular_endpoints: bool,
               szego_class: bool = True, tol: float = 1e-12,
               settings: Optional[IntegrationSettings] = None) -> "WeightMeasure":
        """
        Build a custom weight; its total mass is integrated here.

        Raises:
            DomainError: If the density is negative somewhere on a 1000-point grid
        """
        grid = np.linspace(-1.0, 1.0, 1002)[1:-1]
        if np.any(np.asarray(density(grid)) < 0):
            raise DomainError("Weight density must be nonnegative on [-1, 1]")
        provisional = cls("custom", density, 1.0, szego_class, singular_endpoints)
        mass = integrate_weighted(lambda x: np.ones_like(x), provisional, tol, settings).value
        logger.info(f"Custom weight with total mass {mass:.12g}")
        return cls("custom", density, mass, szego_class, singular_endpoints)

    @classmethod
    def from_name(cls, name: str) -> "WeightMeasure":
        if name == "lebesgue":
            return cls.lebesgue()
        if name == "chebyshev":
            return cls.chebyshev()
        raise UnsupportedError(f"Weight '{name}' cannot be selected by name")


def adaptive_integrate(g: Callable[[np.ndarray], np.ndarray], a: float, b: float, tol: float,
                       settings: Optional[IntegrationSettings] = None) -> IntegrationResult:
    """
    Integrate a vectorised real function over [a, b] to an absolute tolerance.

    Args:
        g: Function of an array of points, any shape
        a: Left end
        b: Right end
        tol: Absolute tolerance, shared among panels by width
        settings: Panel order and panel budget

    Returns:
        IntegrationResult; error_estimate sums the coarse-fine differences

    Raises:
        DomainError: If tol <= 0
        IntegrationError: If the panel budget is exhausted
    """
    settings = settings or IntegrationSettings()
    if tol <= 0:
        raise DomainError(f"Integration tolerance must be positive, got {tol}")
    x, w = leggauss(settings.panel_order)
    width = b - a

    def panel_values(lefts: np.ndarray, rights: np.ndarray) -> np.ndarray:
        mids = 0.5 * (lefts + rights)
        halves = 0.5 * (rights - lefts)
        points = mids[:, None] + halves[:, None] * x[None, :]
        values = np.real(np.asarray(g(points)))
        return halves * (values @ w)

    lefts = np.array([a], dtype=float)
    rights = np.array([b], dtype=float)
    coarse = panel_values(lefts, rights)
    total, total_error = 0.0, 0.0
    panels = 1

    while lefts.size:
        mids = 0.5 * (lefts + rights)
        left_half = panel_values(lefts, mids)
        right_half = panel_values(mids, rights)
        fine = left_half + right_half
        errors = np.abs(coarse - fine)
        panels += 2 * lefts.size

        share = tol * (rights - lefts) / width
        roundoff = 50.0 * np.finfo(float).eps * np.abs(fine)
        done = (errors <= share) | (errors <= roundoff)
        total += float(np.sum(fine[done]))
        total_error += float(np.sum(errors[done]))

        keep = ~done
        if panels + 4 * int(np.count_nonzero(keep)) > settings.max_panels and np.any(keep):
            estimate = total + float(np.sum(fine[keep]))
            error_estimate = total_error + float(np.sum(errors[keep]))
            raise IntegrationError(
                f"Adaptive integration did not converge within {settings.max_panels} panels",
                estimate, error_estimate, panels,
            )
        lefts = np.concatenate([lefts[keep], mids[keep]])
        rights = np.concatenate([mids[keep], rights[keep]])
        coarse = np.concatenate([left_half[keep], right_half[keep]])

    logger.debug(f"Integrated over [{a}, {b}] with {panels} panels, error estimate {total_error:.3e}")
    return IntegrationResult(total, total_error, panels)


def integrate_weighted(g: Callable[[np.ndarray], np.ndarray], w: WeightMeasure, tol: float,
                       settings: Optional[IntegrationSettings] = None) -> IntegrationResult:
    """
    Integrate g against the weight in theta = arccos(x).

    Args:
        g: Vectorised real function on [-1, 1]
        w: Weight measure
        tol: Absolute tolerance
        settings: Panel order and panel budget

    Returns:
        IntegrationResult with value, error estimate and panel count
    """
    if w.kind == "chebyshev":
        return adaptive_integrate(lambda t: g(np.cos(t)), 0.0, np.pi, tol, settings)
    if w.kind == "lebesgue":
        return adaptive_integrate(lambda t: g(np.cos(t)) * np.sin(t), 0.0, np.pi, tol, settings)

    def in_theta(t: np.ndarray) -> np.ndarray:
        xs = np.cos(t)
        return g(xs) * w.density(xs) * np.sin(t)

    return adaptive_integrate(in_theta, 0.0, np.pi, tol, settings)


def integrate(f: Callable[[np.ndarray], np.ndarray], w: WeightMeasure, tol: float,
              settings: Optional[IntegrationSettings] = None) -> float:
    """
    I(f, alpha) for a function that is real on the real line.

    Args:
        f: Integrand, usually an AnalyticFunction
        w: Weight measure
        tol: Absolute tolerance
        settings: Panel order and panel budget

    Returns:
        The integral of f against the weight

    Raises:
        DomainError: If f is not real on the real line or tol <= 0
        IntegrationError: If the integrator does not converge
    """
    if getattr(f, "real_on_real", True) is False:
        raise DomainError("Integrand must be real on the real line")
    return integrate_weighted(lambda xs: np.real(f(xs)), w, tol, settings).value


def omega_modulus(w: WeightMeasure, delta: float, grid_cells: int = 20000) -> float:
    """
    omega(delta, alpha): largest alpha-mass of a set of length at most delta.

    Closed forms for the Lebesgue and Chebyshev weights; custom weights use
    a superlevel set of the density on a midpoint grid, its threshold found
    by bisection.

    Raises:
        DomainError: If delta < 0
    """
    if delta < 0:
        raise DomainError(f"omega(delta) needs delta >= 0, got {delta}")
    delta = min(float(delta), 2.0)
    if w.kind == "lebesgue":
        return delta
    if w.kind == "chebyshev":
        return 2.0 * float(np.arccos(1.0 - 0.5 * delta))
    if delta == 2.0:
        return w.total_mass

    h, values = _density_grid(w, grid_cells)
    level = _superlevel_threshold(values, h, delta)
    above = values > level
    mass = h * float(np.sum(values[above])) + (delta - h * np.count_nonzero(above)) * level
    # grid mass is rescaled so that omega(2) is the exact total mass
    return mass * w.total_mass / (h * float(np.sum(values)))


def _density_grid(w: WeightMeasure, grid_cells: int) -> Tuple[float, np.ndarray]:
    h = 2.0 / grid_cells
    mids = -1.0 + h * (np.arange(grid_cells) + 0.5)
    return h, np.asarray(w.density(mids), dtype=float)


def _superlevel_threshold(values: np.ndarray, h: float, delta: float) -> float:
    """Density level lambda whose superlevel set {p > lambda} has length at most delta, by bisection."""
    lo, hi = 0.0, float(np.max(values))
    for _ in range(200):
        level = 0.5 * (lo + hi)
        if h * np.count_nonzero(values > level) > delta:
            lo = level
        else:
            hi = level
        if hi - lo <= 1e-14 * max(hi, 1.0):
            break
    return hi


def monomial_moment(w: WeightMeasure, m: int, tol: float = 1e-14,
                    settings: Optional[IntegrationSettings] = None) -> float:
    """Integral of x^m against the weight; closed form for Lebesgue and Chebyshev."""
    if m % 2 and w.kind in ("lebesgue", "chebyshev"):
        return 0.0
    if w.kind == "lebesgue":
        return 2.0 / (m + 1)
    if w.kind == "chebyshev":
        # pi * binom(m, m/2) / 2^m, built up as a product
        value = np.pi
        for j in range(1, m // 2 + 1):
            value *= (2 * j - 1) / (2 * j)
        return float(value)
    return integrate_weighted(lambda xs: xs ** m, w, tol, settings).value

