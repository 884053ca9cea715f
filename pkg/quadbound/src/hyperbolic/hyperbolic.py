"""
Hyperbolic geometry on the unit disk and its transport to nice domains.

The Möbius pseudodistance m, the Poincaré distance p, the conformal maps
f_D of ellipses and disks onto the unit disk, the induced pseudodistance
c_D* and the distance lower bound tanh(L|w - z| / delta_D).
"""

import logging
from functools import lru_cache
from typing import Any, Callable, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from quadbound.src.domains import DiskDomain, EllipseDomain, NiceDomainSpec
from quadbound.src.error_handler import DomainError, UnsupportedError

logger = logging.getLogger(__name__)

Complex = Union[complex, np.ndarray]

# Series terms whose exponent drops below exp(-45) are dropped
_SERIES_CUTOFF = 45.0

_BELOW_ONE = float(np.nextafter(1.0, 0.0))


def _check_in_disk(*points: Complex) -> None:
    for p in points:
        if np.any(np.abs(np.asarray(p, dtype=complex)) >= 1.0):
            raise DomainError("Point outside the open unit disk")


def _scalar(value: np.ndarray) -> Any:
    return value.item() if np.ndim(value) == 0 else value


def mobius_m(w: Complex, z: Complex) -> Union[float, np.ndarray]:
    """
    Möbius pseudodistance m(w, z) = |(w - z) / (1 - conj(w) z)|.

    Raises:
        DomainError: If |w| >= 1 or |z| >= 1
    """
    _check_in_disk(w, z)
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)
    value = np.abs(w - z) / np.abs(1.0 - np.conj(w) * z)
    return _scalar(np.minimum(value, np.nextafter(1.0, 0.0)))


def poincare_p(w: Complex, z: Complex) -> Union[float, np.ndarray]:
    """Poincaré distance arctanh(m(w, z))."""
    return _scalar(np.arctanh(np.asarray(mobius_m(w, z))))


def disk_automorphism(eta: complex, theta: float = 0.0) -> Callable[[Complex], Complex]:
    """Return phi(z) = e^{i theta} (eta - z) / (1 - conj(eta) z) for |eta| < 1."""
    _check_in_disk(eta)
    rotation = np.exp(1j * theta)

    def phi(z: Complex) -> Complex:
        z = np.asarray(z, dtype=complex)
        return _scalar(rotation * (eta - z) / (1.0 - np.conj(eta) * z))

    return phi


def _theta_sums(s: np.ndarray, log_q: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Correction sums p, q of the theta quotient at s = arcsin(z) / t, Re s >= 0.

    With P = 1 + p and Q = 1 + q the quotient is (P - Q e^{-2s}) / (P + Q e^{-2s})
    and its artanh is s + (log P - log Q) / 2. Every term has modulus at most
    one on the closed ellipse; the n = 1 term is kept even for narrow ellipses,
    where it is of order one at the ends of the segment.
    """
    decay = -np.pi ** 2 / log_q
    p = np.zeros_like(s)
    q = np.zeros_like(s)
    n = 1
    while n == 1 or decay * (n * n - 1) < _SERIES_CUTOFF:
        base = -decay * (n * n + n)
        if n % 2 == 0:
            p = p + np.exp(base + 2 * n * s)
            q = q + np.exp(base - 2 * n * s)
        else:
            p = p + np.exp(base - (2 * n + 2) * s)
            q = q + np.exp(base + (2 * n + 2) * s)
        n += 1
    return p, q


def _theta_ratio(zeta: np.ndarray, log_q: float) -> np.ndarray:
    """
    theta_1(arcsin zeta, q) / theta_4(arcsin zeta, q) for q = exp(log_q).

    Evaluated after the imaginary transformation, where the conjugate nome
    is exp(pi^2 / log_q), on the half plane Re s >= 0 and extended by oddness.
    """
    t = -log_q / np.pi
    s = np.arcsin(np.asarray(zeta, dtype=complex)) / t
    sign = np.where(s.real < 0, -1.0, 1.0)
    s = sign * s
    p, q = _theta_sums(s, log_q)
    tail = (1.0 + q) * np.exp(-2.0 * s)
    return sign * ((1.0 + p) - tail) / ((1.0 + p) + tail)


def _theta_coordinate(x: np.ndarray, log_q: float) -> np.ndarray:
    """artanh of the theta quotient on real x in [-1, 1]."""
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    t = -log_q / np.pi
    s = np.abs(np.arcsin(x)) / t
    p, q = _theta_sums(s, log_q)
    return np.sign(x) * (s + 0.5 * (np.log1p(p) - np.log1p(q)))


def _on_segment(z: np.ndarray) -> np.ndarray:
    return (z.imag == 0) & (np.abs(z.real) <= 1.0)


class EllipseMap:
    """
    Conformal map of the ellipse E_c onto the unit disk with f(0) = 0.

    The map is the elliptic sine sqrt(k) sn((2K/pi) arcsin z; k), written
    as a ratio of theta functions with nome q. The nominal nome is c^-4;
    it is refined by bounded minimisation of the boundary residual when
    the nominal one misses the residual tolerance.
    """

    def __init__(self, domain: EllipseDomain, boundary_samples: int = 64,
                 residual_tol: float = 1e-8) -> None:
        self.domain = domain
        self.boundary_samples = boundary_samples
        self.residual_tol = residual_tol
        self._boundary = domain.boundary_points(boundary_samples)

        log_q = -4.0 * np.log(domain.c)
        residual = self._residual(log_q)
        if residual >= residual_tol:
            logger.info(f"Refining nome for c={domain.c}: nominal residual {residual:.3e}")
            span = 0.05 * abs(log_q)
            res = minimize_scalar(self._residual, bounds=(log_q - span, log_q + span),
                                  method="bounded", options={"xatol": 1e-14 * abs(log_q)})
            if res.fun < residual:
                log_q, residual = float(res.x), float(res.fun)

        self.log_nome = log_q
        self.boundary_residual = residual
        if residual >= residual_tol:
            logger.warning(f"Conformal map for c={domain.c} has boundary residual {residual:.3e}")
        else:
            logger.info(f"Calibrated conformal map for c={domain.c} (residual {residual:.3e})")

    @property
    def nome(self) -> float:
        return float(np.exp(self.log_nome))

    def _residual(self, log_q: float) -> float:
        values = _theta_ratio(self._boundary, log_q)
        return float(np.max(np.abs(np.abs(values) - 1.0)))

    def __call__(self, z: Complex) -> Complex:
        """
        Evaluate f_D at z.

        Raises:
            DomainError: If z lies outside the closed ellipse
        """
        zs = np.asarray(z, dtype=complex)
        if not np.all(self.domain.contains(zs)):
            raise DomainError(f"Point outside the ellipse c={self.domain.c}")
        values = np.array(_theta_ratio(zs, self.log_nome), dtype=complex)
        on = _on_segment(zs)
        if np.any(on):
            u = _theta_coordinate(zs.real[on], self.log_nome)
            values[on] = np.sign(u) * np.minimum(np.tanh(np.abs(u)), _BELOW_ONE)
        return _scalar(values)

    def coordinate(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """
        Hyperbolic coordinate artanh f_D(x) of real points of [-1, 1].

        Differences of coordinates are Poincaré distances, exact where
        f_D(x) itself rounds to 1.

        Raises:
            DomainError: If some |x| > 1
        """
        xs = np.asarray(x, dtype=float)
        if np.any(np.abs(xs) > 1.0):
            raise DomainError("Coordinate is defined on [-1, 1] only")
        return _scalar(_theta_coordinate(xs, self.log_nome))

    def derivative(self, z: Complex) -> Complex:
        """f_D'(z) by a central difference scaled to the distance from the boundary."""
        zs = np.asarray(z, dtype=complex)
        h = 1e-6 * self.domain.b
        values = (_theta_ratio(zs + h, self.log_nome) - _theta_ratio(zs - h, self.log_nome)) / (2.0 * h)
        return _scalar(values)

    def __repr__(self) -> str:
        return f"EllipseMap(c={self.domain.c}, residual={self.boundary_residual:.2e})"


class DiskMap:
    """Conformal map f_D(z) = z / R of the disk of radius R."""

    def __init__(self, domain: DiskDomain) -> None:
        self.domain = domain
        self.boundary_residual = 0.0

    def __call__(self, z: Complex) -> Complex:
        zs = np.asarray(z, dtype=complex)
        if not np.all(self.domain.contains(zs)):
            raise DomainError(f"Point outside the disk of radius {self.domain.radius}")
        return _scalar(zs / self.domain.radius)

    def derivative(self, z: Complex) -> Complex:
        zs = np.asarray(z, dtype=complex)
        return _scalar(np.full(zs.shape, 1.0 / self.domain.radius, dtype=complex))

    def coordinate(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        xs = np.asarray(x, dtype=float)
        if np.any(np.abs(xs) > 1.0):
            raise DomainError("Coordinate is defined on [-1, 1] only")
        return _scalar(np.arctanh(xs / self.domain.radius))

    def __repr__(self) -> str:
        return f"DiskMap(R={self.domain.radius})"


ConformalMap = Union[EllipseMap, DiskMap]


@lru_cache(maxsize=64)
def ellipse_map(c: float, boundary_samples: int = 64, residual_tol: float = 1e-8) -> EllipseMap:
    """Calibrated map of E_c, cached per parameter set."""
    return EllipseMap(EllipseDomain(c), boundary_samples, residual_tol)


def conformal_map(domain: Union[EllipseDomain, DiskDomain, NiceDomainSpec],
                  config_manager: Optional[object] = None) -> ConformalMap:
    """
    Return the conformal map of a domain.

    Args:
        domain: Ellipse, disk or generic nice domain
        config_manager: Source of the conformal section, if any

    Returns:
        The calibrated map for an ellipse, z / R for a disk, or the map
        attached to a generic domain

    Raises:
        UnsupportedError: For a generic domain without an attached map
    """
    if isinstance(domain, EllipseDomain):
        samples, tol = 64, 1e-8
        if config_manager is not None:
            samples = int(config_manager.get("conformal", "boundary_samples", samples))  # type: ignore[attr-defined]
            tol = float(config_manager.get("conformal", "residual_tol", tol))  # type: ignore[attr-defined]
        return ellipse_map(domain.c, samples, tol)
    if isinstance(domain, DiskDomain):
        return DiskMap(domain)
    if isinstance(domain, NiceDomainSpec) and domain.optional_map is not None:
        return domain.optional_map
    raise UnsupportedError("No conformal map is available for a domain given only by delta_D")


def ellipse_to_disk(fmap: ConformalMap, z: Complex) -> Complex:
    return fmap(z)


def segment_coordinate(fmap: ConformalMap, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    artanh f_D(x) for real x in [-1, 1].

    Maps without a coordinate of their own fall back to artanh of the
    clamped real part of f_D.
    """
    xs = np.real(np.asarray(x)).astype(float)
    coordinate = getattr(fmap, "coordinate", None)
    if coordinate is not None:
        return coordinate(xs)
    if np.any(np.abs(xs) > 1.0):
        raise DomainError("Coordinate is defined on [-1, 1] only")
    values = np.real(np.asarray(fmap(xs.astype(complex))))
    return _scalar(np.arctanh(np.clip(values, -_BELOW_ONE, _BELOW_ONE)))


def cstar(fmap: ConformalMap, w: Complex, z: Complex) -> Union[float, np.ndarray]:
    """
    Induced pseudodistance c_D*(w, z) = m(f_D(w), f_D(z)).

    Pairs on the segment [-1, 1] go through the hyperbolic coordinate, so
    points near the ends of a narrow ellipse stay apart.

    Raises:
        DomainError: If a point lies outside the domain
    """
    ws, zs = np.broadcast_arrays(np.asarray(w, dtype=complex), np.asarray(z, dtype=complex))
    on = _on_segment(ws) & _on_segment(zs)
    value = np.empty(ws.shape, dtype=float)
    if np.any(on):
        gap = np.abs(np.asarray(segment_coordinate(fmap, ws.real[on]))
                     - np.asarray(segment_coordinate(fmap, zs.real[on])))
        value[on] = np.minimum(np.tanh(gap), _BELOW_ONE)
    if not np.all(on):
        off = ~on
        value[off] = mobius_m(fmap(ws[off]), fmap(zs[off]))
    return _scalar(value)


def cstar_koebe_lower(deltaD: float, L: float, dist: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Lower bound tanh(L * dist / deltaD) for c_D* along the segment.

    Args:
        deltaD: Largest distance from the segment to the boundary
        L: Koebe constant, 1/2 for convex domains
        dist: Euclidean distance |w - z|, scalar or array

    Returns:
        The bound, with the shape of dist

    Raises:
        DomainError: If deltaD <= 0 or dist < 0
    """
    if deltaD <= 0:
        raise DomainError(f"delta_D must be positive, got {deltaD}")
    d = np.asarray(dist, dtype=float)
    if np.any(d < 0):
        raise DomainError("Distance must be nonnegative")
    return _scalar(np.tanh(L * d / deltaD))


def _segment_slope(fmap: ConformalMap, x: np.ndarray) -> np.ndarray:
    """Derivative of the hyperbolic coordinate; one-sided second order near +-1."""
    h = 1e-5 * min(1.0, fmap.domain.delta_sup)

    def u(p: np.ndarray) -> np.ndarray:
        return np.asarray(segment_coordinate(fmap, np.clip(p, -1.0, 1.0)), dtype=float)

    slope = np.empty_like(x)
    inside = np.abs(x) <= 1.0 - h
    if np.any(inside):
        xi = x[inside]
        slope[inside] = (u(xi + h) - u(xi - h)) / (2.0 * h)
    if not np.all(inside):
        xe = x[~inside]
        side = np.where(xe < 0, -1.0, 1.0)
        slope[~inside] = side * (3.0 * u(xe) - 4.0 * u(xe - side * h) + u(xe - 2.0 * side * h)) / (2.0 * h)
    return np.abs(slope)


def hyperbolic_density(fmap: ConformalMap, z: Complex) -> Union[float, np.ndarray]:
    """
    Transported Poincaré density gamma_D(z; 1) = |f_D'(z)| / (1 - |f_D(z)|^2).

    On the segment this is the slope of the hyperbolic coordinate.
    """
    zs = np.asarray(z, dtype=complex)
    on = _on_segment(zs)
    density = np.empty(zs.shape, dtype=float)
    if np.any(on):
        density[on] = _segment_slope(fmap, np.atleast_1d(zs.real[on]))
    if not np.all(on):
        off = ~on
        w = np.asarray(fmap(zs[off]))
        density[off] = np.abs(np.asarray(fmap.derivative(zs[off]))) / (1.0 - np.abs(w) ** 2)
    return _scalar(density)
