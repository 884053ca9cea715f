"""
Nice domains and their distance-to-boundary geometry.

A nice domain is open, simply connected, symmetric under conjugation and
contains the segment [-1, 1]. The bound calculators only consume the
distance function delta_D(x) on the segment, its supremum and whether the
domain is convex, so those are the three things every domain type here
provides.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from quadbound.src.error_handler import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Slack for points that sit on [-1, 1] up to rounding
_SEGMENT_SLACK = 1e-14


def koebe_constant(convex: bool) -> float:
    """Return the constant L of the distance bound: 1/2 for convex domains, else 1/4."""
    return 0.5 if convex else 0.25


def ellipse_params(c: float) -> Tuple[float, float]:
    """
    Return the semi-axes (a, b) of the ellipse with foci +-1 and a + b = c.

    Raises:
        DomainError: If c <= 1
    """
    c = float(c)
    if not np.isfinite(c) or c <= 1.0:
        raise DomainError(f"Ellipse parameter must satisfy c > 1, got {c}")
    # (c - 1)(c + 1) keeps the minor axis accurate for c close to 1
    b = (c - 1.0) * (c + 1.0) / (2.0 * c)
    a = (c * c + 1.0) / (2.0 * c)
    return a, b


def _check_segment(x: ArrayLike) -> np.ndarray:
    xs = np.asarray(x, dtype=float)
    if np.any(np.abs(xs) > 1.0 + _SEGMENT_SLACK):
        raise DomainError("delta_D(x) is only defined for x in [-1, 1]")
    return np.clip(xs, -1.0, 1.0)


@dataclass(frozen=True)
class EllipseDomain:
    """Interior of the ellipse with foci +-1 and semi-axis sum c."""

    c: float
    a: float = field(init=False)
    b: float = field(init=False)

    def __post_init__(self) -> None:
        a, b = ellipse_params(self.c)
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    convex = True

    @property
    def koebe_L(self) -> float:
        return koebe_constant(True)

    @property
    def delta_sup(self) -> float:
        # sqrt(a^2 - 1) = (c^2 - 1)/(2c) = b
        return self.b

    def delta_at(self, x: ArrayLike) -> ArrayLike:
        """
        Distance from x in [-1, 1] to the complement of the ellipse.

        Raises:
            DomainError: If |x| > 1
        """
        xs = _check_segment(x)
        ax = np.abs(xs)
        inner = ax <= 1.0 / self.a
        # the inner branch is used at the breakpoint itself
        smooth = self.b * np.sqrt(np.maximum(1.0 - xs * xs, 0.0))
        outer = self.a - ax
        result = np.where(inner, smooth, outer)
        return float(result) if np.ndim(result) == 0 else result

    def contains(self, z: Union[complex, np.ndarray], slack: float = 1e-12) -> Union[bool, np.ndarray]:
        """Return whether z lies in the closed ellipse up to the given slack."""
        zs = np.asarray(z, dtype=complex)
        level = (zs.real / self.a) ** 2 + (zs.imag / self.b) ** 2
        inside = level < 1.0 + slack
        return bool(inside) if np.ndim(inside) == 0 else inside

    def boundary_points(self, count: int) -> np.ndarray:
        """Return `count` equally spaced (in the angle) points of the boundary ellipse."""
        theta = 2.0 * np.pi * np.arange(count) / count
        return self.a * np.cos(theta) + 1j * self.b * np.sin(theta)

    def describe(self) -> dict:
        return {"kind": "ellipse", "c": self.c, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class DiskDomain:
    """Open disk of radius R > 1 centred at the origin."""

    radius: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.radius) or self.radius <= 1.0:
            raise DomainError(f"Disk must contain [-1, 1]; radius {self.radius} <= 1")
        object.__setattr__(self, "radius", float(self.radius))

    convex = True

    @property
    def koebe_L(self) -> float:
        return koebe_constant(True)

    @property
    def delta_sup(self) -> float:
        return self.radius

    def delta_at(self, x: ArrayLike) -> ArrayLike:
        xs = _check_segment(x)
        result = self.radius - np.abs(xs)
        return float(result) if np.ndim(result) == 0 else result

    def contains(self, z: Union[complex, np.ndarray], slack: float = 1e-12) -> Union[bool, np.ndarray]:
        inside = np.abs(np.asarray(z, dtype=complex)) < self.radius * (1.0 + slack)
        return bool(inside) if np.ndim(inside) == 0 else inside

    def boundary_points(self, count: int) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(count) / count
        return self.radius * np.exp(1j * theta)

    def describe(self) -> dict:
        return {"kind": "disk", "radius": self.radius}


@dataclass(frozen=True)
class NiceDomainSpec:
    """
    A generic nice domain given only by its distance function on [-1, 1].

    The library never derives delta_D from a boundary curve; callers supply
    the evaluator and say whether the domain is convex. Positivity and the
    1-Lipschitz property are checked on a grid at construction.
    """

    delta_fn: Callable[[np.ndarray], np.ndarray]
    convex: bool
    optional_map: Optional[Any] = None
    grid_size: int = 2001

    def __post_init__(self) -> None:
        grid = np.linspace(-1.0, 1.0, self.grid_size)
        values = np.broadcast_to(np.asarray(self.delta_fn(grid), dtype=float), grid.shape)
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise DomainError("delta_D must be positive on [-1, 1]")
        slopes = np.abs(np.diff(values)) / np.diff(grid)
        if np.max(slopes) > 1.0 + 1e-9:
            raise DomainError("delta_D must be 1-Lipschitz on [-1, 1]")
        object.__setattr__(self, "_grid", grid)
        object.__setattr__(self, "_grid_values", values)

    @property
    def koebe_L(self) -> float:
        return koebe_constant(self.convex)

    def delta_at(self, x: ArrayLike) -> ArrayLike:
        xs = _check_segment(x)
        result = np.broadcast_to(np.asarray(self.delta_fn(xs), dtype=float), xs.shape)
        return float(result) if np.ndim(result) == 0 else np.array(result)

    @property
    def delta_sup(self) -> float:
        """Supremum of delta_D over [-1, 1]: best grid sample refined by bounded search."""
        grid, values = self._grid, self._grid_values
        i = int(np.argmax(values))
        best = float(values[i])
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        if hi > lo:
            res = minimize_scalar(lambda t: -float(self.delta_at(t)), bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-12})
            best = max(best, -float(res.fun))
        return best

    def contains(self, z: Union[complex, np.ndarray], slack: float = 1e-12) -> Union[bool, np.ndarray]:
        if self.optional_map is not None:
            return self.optional_map.domain.contains(z, slack)
        raise DomainError("Membership is unknown for a domain given only by delta_D")

    def describe(self) -> dict:
        return {"kind": "generic", "convex": self.convex, "delta_sup": self.delta_sup}


Domain = Union[EllipseDomain, DiskDomain, NiceDomainSpec]


def ellipse_delta_at(dom: EllipseDomain, x: ArrayLike) -> ArrayLike:
    """Distance delta_D(x) for the ellipse, piecewise in |x| versus 1/a."""
    return dom.delta_at(x)


def delta_sup(dom: Domain) -> float:
    """Supremum of delta_D(x) over [-1, 1]; closed form for ellipses and disks."""
    return dom.delta_sup


def ellipse_contains(dom: EllipseDomain, z: Union[complex, np.ndarray]) -> Union[bool, np.ndarray]:
    return dom.contains(z)


def named_preset(name: str, config_manager: Any) -> EllipseDomain:
    """
    Build an ellipse from a named preset of the configuration.

    Raises:
        DomainError: If the preset is unknown
    """
    c = config_manager.get_preset(name)
    if c is None:
        known = ", ".join(sorted(config_manager.get_section("presets")))
        raise DomainError(f"Unknown domain preset '{name}' (known: {known})")
    logger.debug(f"Preset {name} -> ellipse c={c}")
    return EllipseDomain(c)
