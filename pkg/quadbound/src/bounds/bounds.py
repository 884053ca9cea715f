"""
Closed-form bound calculators for the worst-case quadrature error on A(D, M).

Lower bounds for the optimal error rho_N come from the distance bound (the
gamma and measure forms, and the closed ellipse form), from Bakhvalov's
kappa_0 c^{-2n} and from Petras' orthonormal-polynomial constant k_n. Upper
bounds are the classical Gauss-Legendre estimates. The node-count estimators
turn both sides into the number of information pieces needed for accuracy
eps on functions bounded by M.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.optimize import minimize_scalar

from quadbound.src.domains import EllipseDomain, ellipse_params
from quadbound.src.error_handler import DomainError, UsageError
from quadbound.src.quadrature import AnalyticFunction, WeightMeasure, omega_modulus, orthonormal_polys

logger = logging.getLogger(__name__)

BOUND_KINDS = ("lower", "upper", "reference", "measured")
GAUSS_UPPER_METHODS = ("rabinowitz", "petras", "petras26")


@dataclass(frozen=True)
class BoundRecord:
    """One evaluated bound with the parameters it consumed."""

    name: str
    kind: str
    value: float
    params: Dict[str, Any] = field(default_factory=dict)
    provenance: str = ""

    def __post_init__(self) -> None:
        if self.kind not in BOUND_KINDS:
            raise DomainError(f"Unknown bound kind: {self.kind}")
        if not math.isfinite(self.value) or self.value < 0:
            raise DomainError(f"Bound {self.name} has invalid value {self.value}")

    def sort_key(self) -> Tuple[str, float, int]:
        return (self.name, float(self.params.get("c", 0.0)), int(self.params.get("n", self.params.get("N", 0))))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind,
            "value": self.value,
            "params": dict(self.params),
            "provenance": self.provenance,
        }


def to_record(name: str, kind: str, value: float, provenance: str, **params: Any) -> BoundRecord:
    return BoundRecord(name, kind, float(value), {k: v for k, v in params.items() if v is not None}, provenance)


def _check_c(c: float) -> None:
    if not math.isfinite(c) or c <= 1.0:
        raise DomainError(f"Ellipse parameter must satisfy c > 1, got {c}")


def _check_count(value: int, name: str, minimum: int = 1) -> None:
    if int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value}")


def koebe_form(deltaD: float, N: int, L: float) -> float:
    """
    2 L^{2N} delta^{2N delta / L} / (delta + L)^{(2N/L)(delta + L)}, evaluated in logs.

    This is the lower bound for J_+(D; N) in terms of delta_D and L.
    """
    if deltaD <= 0:
        raise DomainError(f"delta_D must be positive, got {deltaD}")
    _check_count(N, "N")
    log_value = math.log(2.0) - (2.0 * N / L) * (
        deltaD * math.log1p(L / deltaD) + L * math.log1p(deltaD / L)
    )
    return math.exp(log_value)


def new_lower_gamma(deltaD: float, N: int, convex: bool) -> float:
    """
    gamma: guaranteed worst-case error constant, half the Koebe form.

    For convex domains (L = 1/2) this is ((1 + 1/(2 delta))^{2 delta} (2 delta + 1))^{-2N}.

    Args:
        deltaD: Largest distance from the segment to the boundary
        N: Total information count
        convex: Whether the domain is convex (L = 1/2, else L = 1/4)

    Returns:
        The constant gamma, so that rho_N >= M gamma

    Raises:
        DomainError: If deltaD <= 0 or N < 1
    """
    L = 0.5 if convex else 0.25
    return 0.5 * koebe_form(deltaD, N, L)


def new_lower_simple(deltaD: float, N: int) -> float:
    """Simplified convex form exp(-2N) (2 delta + 1)^{-2N}; never exceeds new_lower_gamma."""
    if deltaD <= 0:
        raise DomainError(f"delta_D must be positive, got {deltaD}")
    _check_count(N, "N")
    return math.exp(-2.0 * N * (1.0 + math.log1p(2.0 * deltaD)))


def new_lower_measure(w: WeightMeasure, deltaD: float, L: float, N: int,
                      grid_points: int = 64) -> float:
    """
    sup over eps of tanh(L eps / delta)^{2N} (alpha([-1, 1]) - omega(2N eps)).

    The sup is taken on a logarithmic eps-grid over [1e-6 delta, 1/N] and
    refined by bounded search around the best grid point.

    Args:
        w: Weight measure
        deltaD: Largest distance from the segment to the boundary
        L: Koebe constant of the domain
        N: Total information count
        grid_points: Size of the eps-grid

    Returns:
        Lower bound for J_+(D; N) against the weight

    Raises:
        DomainError: If deltaD <= 0 or N < 1
    """
    if deltaD <= 0:
        raise DomainError(f"delta_D must be positive, got {deltaD}")
    _check_count(N, "N")

    def value(eps: float) -> float:
        lost = omega_modulus(w, min(2.0 * N * eps, 2.0))
        return math.tanh(L * eps / deltaD) ** (2 * N) * max(w.total_mass - lost, 0.0)

    lo, hi = 1e-6 * deltaD, 1.0 / N
    if lo >= hi:
        lo = 1e-6 * hi
    grid = np.geomspace(lo, hi, grid_points)
    values = np.array([value(e) for e in grid])
    i = int(np.argmax(values))
    best = float(values[i])
    left, right = np.log(grid[max(i - 1, 0)]), np.log(grid[min(i + 1, grid_points - 1)])
    if right > left:
        res = minimize_scalar(lambda s: -value(math.exp(s)), bounds=(left, right), method="bounded",
                              options={"xatol": 1e-10})
        best = max(best, -float(res.fun))
    return best


def ellipse_log_base(c: float) -> float:
    """ln of ((c^2 - 1 + c)/(c^2 - 1))^{(c^2 - 1)/c} ((c^2 - 1 + c)/c)."""
    _check_c(c)
    s = (c - 1.0) * (c + 1.0)
    return (s / c) * math.log1p(c / s) + math.log1p(s / c)


def new_lower_ellipse(c: float, N: int) -> float:
    """
    Closed-form lower bound for J_+(E_c; N): 2 base(c)^{-2N}.

    Args:
        c: Ellipse parameter, c > 1
        N: Total information count

    Returns:
        Lower bound for the Lebesgue J_+ on E_c

    Raises:
        DomainError: If c <= 1 or N < 1
    """
    _check_count(N, "N")
    return 2.0 * math.exp(-2.0 * N * ellipse_log_base(c))


BAKHVALOV_PRESETS = {"lebesgue": (2, 1.0), "chebyshev": (0, 1.0)}


def bakhvalov_kappa0(c: float, weight_kind: str, m: Optional[int] = None,
                     P0: Optional[float] = None) -> float:
    """
    kappa_0 = pi P0 (1 - 1/c) c^{-2m} ((c - 1/c)/2)^m.

    Lebesgue uses m = 2, Chebyshev m = 0, both with P0 = 1; custom weights
    must supply m and P0.

    Raises:
        DomainError: For c <= 1 or invalid custom parameters
    """
    _check_c(c)
    if weight_kind in BAKHVALOV_PRESETS:
        m, P0 = BAKHVALOV_PRESETS[weight_kind]
    elif weight_kind == "custom":
        if m is None or P0 is None or int(m) != m or m < 0 or P0 <= 0:
            raise DomainError("Custom weight needs an integer m >= 0 and P0 > 0")
    else:
        raise DomainError(f"Unknown weight kind for kappa_0: {weight_kind}")
    return math.pi * P0 * (1.0 - 1.0 / c) * c ** (-2 * m) * (0.5 * (c - 1.0 / c)) ** m


def petras_kn(w: WeightMeasure, c: float, n: int, samples: int = 512) -> float:
    """
    k_n = (sum_{nu <= n} (sup over E_c of |p_nu|)^2)^{-1}.

    The suprema are taken on the boundary ellipse: 512 samples, then a
    bounded search around each sampled maximum.

    Args:
        w: Weight measure defining the orthonormal polynomials
        c: Ellipse parameter
        n: Highest degree
        samples: Boundary samples before refinement

    Returns:
        k_n, a lower bound constant for rho_n on A(E_c, 1)
    """
    _check_c(c)
    _check_count(n, "n", 0)
    a, b = ellipse_params(c)
    polys = orthonormal_polys(w, n)
    theta = 2.0 * np.pi * np.arange(samples) / samples
    values = np.abs(polys.evaluate(a * np.cos(theta) + 1j * b * np.sin(theta)))
    step = 2.0 * np.pi / samples

    total = 0.0
    for nu in range(n + 1):
        i = int(np.argmax(values[nu]))
        peak = float(values[nu, i])
        if nu > 0:
            def negated(t: float, _nu: int = nu) -> float:
                z = a * np.cos(t) + 1j * b * np.sin(t)
                return -float(np.abs(polys.evaluate(np.array([z]), _nu)[_nu, 0]))

            res = minimize_scalar(negated, bounds=(theta[i] - step, theta[i] + step), method="bounded",
                                  options={"xatol": 1e-12})
            peak = max(peak, -float(res.fun))
        total += peak * peak
    return 1.0 / total


def szego_limit(w: WeightMeasure, c: float, samples: int = 4096, circle_points: int = 256) -> float:
    """
    lim c^{2n} k_n = 2 pi (1 - c^-2) min_{|z| = c} |D(1/z)|^2.

    D is the Szego function of w(cos t)|sin t|; the |sin t| factor has the
    exact outer function sqrt((1 - z^2)/2), the rest goes through the
    trapezoid rule. A reference value, not a finite-n bound.

    Raises:
        DomainError: If the weight is not in the Szego class
    """
    _check_c(c)
    if not w.szego_class:
        raise DomainError("Weight is not in the Szego class")
    if w.kind == "chebyshev":
        return 2.0 * math.pi * (1.0 - c ** -2)

    phi = 2.0 * np.pi * np.arange(circle_points) / circle_points
    u = np.exp(-1j * phi) / c
    d_squared = 0.5 * (1.0 - u * u)
    if w.kind != "lebesgue":
        t = 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
        log_w = np.log(np.asarray(w.density(np.cos(t)), dtype=float))
        kernel = (np.exp(1j * t)[None, :] + u[:, None]) / (np.exp(1j * t)[None, :] - u[:, None])
        d_squared = d_squared * np.exp(np.mean(log_w[None, :] * kernel, axis=1))
    return 2.0 * math.pi * (1.0 - c ** -2) * float(np.min(np.abs(d_squared)))


def petras_explicit_lower(weight_kind: str, c: float, n: int) -> float:
    """
    Explicit finite-n lower bounds for rho_n(A(E_c), d alpha).

    Lebesgue: pi (1 - c^-2)^2 c^{-2n} / (1 + eps_n) with the printed upper
    estimate of eps_n. Chebyshev: pi (1 - c^-2)^3 / (2 c^{2n}) times the
    correction factor, falling back to the uncorrected floor when the
    factor is not positive.

    Args:
        weight_kind: "lebesgue" or "chebyshev"
        c: Ellipse parameter
        n: Number of nodes

    Returns:
        The lower bound for unit M

    Raises:
        DomainError: For other weight kinds
    """
    _check_c(c)
    _check_count(n, "n")
    if weight_kind == "lebesgue":
        eps_n = (c ** 4 + 4 * c * c + 18) / (4 * n * c * c * (c * c - 1)) + (n + 2) ** 1.5 / c ** (n + 2)
        return math.pi * (1.0 - c ** -2) ** 2 * c ** (-2 * n) / (1.0 + eps_n)
    if weight_kind == "chebyshev":
        floor = math.pi * (1.0 - c ** -2) ** 3 / (2.0 * c ** (2 * n))
        correction = 1.0 - ((2 * n + 3) * (c * c - 1) + c ** (-2 * n - 2)) / c ** (2 * n + 4)
        if correction <= 0:
            logger.debug(f"Chebyshev correction factor not positive at c={c}, n={n}; using floor")
            return floor
        return floor / correction
    raise DomainError(f"No explicit lower bound for weight kind {weight_kind}")


def osipenko_chebyshev(c: float, n: int) -> float:
    """Leading term 2 pi / c^{2n} of the optimal Chebyshev-weight error (reference value)."""
    _check_c(c)
    _check_count(n, "n")
    return 2.0 * math.pi * c ** (-2 * n)


def gauss_legendre_upper(c: float, n: int, method: str = "petras") -> float:
    """
    Upper bound for r_n(c), the worst-case error of G_n on A_0(E_c, 1).

    Args:
        c: Ellipse parameter
        n: Number of Gauss-Legendre nodes
        method: One of GAUSS_UPPER_METHODS

    Returns:
        The upper bound; rabinowitz is capped at the trivial 4

    Raises:
        UsageError: For an unknown method
    """
    _check_c(c)
    _check_count(n, "n")
    if method == "rabinowitz":
        return min(4.0, 64.0 / (15.0 * (1.0 - c ** -2)) * c ** (-2 * n))
    if method == "petras":
        return 4.0 * c ** (-2 * n) * (1.0 + 3.0 / (2.0 * n * c * c) + 4.0 / c ** (n + 1))
    if method == "petras26":
        return 26.0 * c ** (-2 * n)
    raise UsageError(f"Unknown Gauss-Legendre bound method '{method}' (use one of {', '.join(GAUSS_UPPER_METHODS)})")


def chebyshev_witness_lower(c: float, n: int) -> Tuple[float, AnalyticFunction]:
    """
    Lower bound for |I(f) - G_n(f)| and its witness (2 c^{2n}/(c^{4n} + 1)) T_{2n}.

    The witness is bounded by 1 on E_c.

    Returns:
        Tuple of the bound and the witness function
    """
    _check_c(c)
    _check_count(n, "n")
    scale = 2.0 / (c ** (2 * n) + c ** (-2 * n))
    basis = cheb.Chebyshev.basis(2 * n)

    def witness(z: Any) -> Any:
        return scale * basis(z)

    bound = math.pi * (1.0 - 1.0 / (4 * n)) / (c ** (2 * n) * (1.0 + c ** (-4 * n)))
    return bound, AnalyticFunction(witness, EllipseDomain(c), 1.0, True, f"chebyshev_witness_{2 * n}")


def info_bounds(M_over_eps: float, c: float, kappa_l: float, kappa_g: float) -> Tuple[float, float]:
    """
    (N_l, N_g) = max(1, ln(M/eps kappa) / (2 ln c)) for the lower and upper constants.

    Args:
        M_over_eps: Ratio of the sup bound to the target accuracy
        c: Ellipse parameter
        kappa_l: Constant of the lower bound kappa_l c^{-2n}
        kappa_g: Constant of the upper bound kappa_g c^{-2n}

    Returns:
        Tuple (N_l, N_g)
    """
    _check_c(c)
    if M_over_eps <= 0 or kappa_l <= 0 or kappa_g <= 0:
        raise DomainError("M/eps and the kappa constants must be positive")
    two_log_c = 2.0 * math.log(c)
    n_l = max(1.0, (math.log(M_over_eps) + math.log(kappa_l)) / two_log_c)
    n_g = max(1.0, (math.log(M_over_eps) + math.log(kappa_g)) / two_log_c)
    return n_l, n_g


def optimality_ratio(M_over_eps: float, c: float, kappa_l: float, kappa_g: float) -> float:
    n_l, n_g = info_bounds(M_over_eps, c, kappa_l, kappa_g)
    return n_l / n_g


def kappa_g(c: float, method: str = "petras") -> float:
    """Smallest kappa with gauss_legendre_upper(c, n, method) <= kappa c^{-2n} for all n >= 1."""
    _check_c(c)
    if method == "rabinowitz":
        return 64.0 / (15.0 * (1.0 - c ** -2))
    if method == "petras":
        return c * c * gauss_legendre_upper(c, 1, "petras")
    if method == "petras26":
        return 26.0
    raise UsageError(f"Unknown Gauss-Legendre bound method '{method}'")


def ellipse_node_estimates(M_over_eps: float, c: float) -> Tuple[float, float, float]:
    """
    Node counts from the closed ellipse bound.

    Returns (N_l exact, N_l asymptotic for c near 1, N_l / N_g) where
    N_g = ln(M/eps)/ln c; the ratio is a positive magnitude. The asymptotic
    count is NaN for c >= 2.

    Raises:
        DomainError: If c <= 1 or M/eps <= 1
    """
    _check_c(c)
    if M_over_eps <= 1:
        raise DomainError(f"M/eps must exceed 1, got {M_over_eps}")
    log_ratio = math.log(M_over_eps)
    n_l = 0.5 * log_ratio / ellipse_log_base(c)
    if c < 2.0:
        asymptotic = -log_ratio / (4.0 * (c - 1.0) * math.log(c - 1.0))
    else:
        asymptotic = math.nan
    n_g = log_ratio / math.log(c)
    return n_l, asymptotic, n_l / n_g


def gauss_loss_bound(c: float, n: int) -> float:
    """Upper estimate of how far G_n can be from optimal: its upper bound over the best lower bound."""
    delta = ellipse_params(c)[1]
    lower = max(
        new_lower_gamma(delta, n, True),
        bakhvalov_kappa0(c, "lebesgue") * c ** (-2 * n),
        petras_explicit_lower("lebesgue", c, n),
    )
    return gauss_legendre_upper(c, n, "petras") / lower
