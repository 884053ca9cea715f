"""
Extremal functions, the quantity J_+ and worst-case adversaries.

For nodes x_j with multiplicities k_j the extremal function is the squared
Blaschke product composed with the conformal map,

    f(z) = prod_j ((F(z) - F_j) / (1 - F_j F(z)))^{r(k_j)},   F = f_D, F_j = F(x_j),

with r(k) the least even integer >= k. It is nonnegative on [-1, 1],
vanishes to order r(k_j) at every node and J_+(D; X; K) is its integral.
Products are formed in log space since they reach c^{-4N} scales.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from quadbound.src.bounds import new_lower_gamma, new_lower_measure
from quadbound.src.error_handler import BoundViolationError, DomainError
from quadbound.src.hyperbolic import ConformalMap, segment_coordinate
from quadbound.src.quadrature import (
    AnalyticFunction,
    IntegrationSettings,
    QuadratureRule,
    WeightMeasure,
    gauss_rule,
    integrate_weighted,
)

logger = logging.getLogger(__name__)

START_KINDS = ("chebyshev", "equispaced", "gauss", "random")


def round_even(k: int) -> int:
    """
    Least even integer >= k.

    Raises:
        DomainError: If k < 1
    """
    if int(k) != k or k < 1:
        raise DomainError(f"Multiplicity must be a positive integer, got {k}")
    k = int(k)
    return k if k % 2 == 0 else k + 1


@dataclass(frozen=True)
class NodeScheme:
    """Ascending nodes in [-1, 1] with positive multiplicities."""

    nodes: Tuple[float, ...]
    mults: Tuple[int, ...]

    def __post_init__(self) -> None:
        nodes = tuple(float(x) for x in self.nodes)
        mults = tuple(int(k) for k in self.mults)
        if not nodes or len(nodes) != len(mults):
            raise DomainError("A node scheme needs matching, nonempty nodes and multiplicities")
        if any(abs(x) > 1.0 for x in nodes):
            raise DomainError("Scheme nodes must lie in [-1, 1]")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise DomainError("Scheme nodes must be strictly ascending")
        for k in mults:
            round_even(k)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "mults", mults)

    @property
    def N(self) -> int:
        return sum(self.mults)

    @property
    def even_mults(self) -> Tuple[int, ...]:
        return tuple(round_even(k) for k in self.mults)

    @classmethod
    def from_rule(cls, rule: QuadratureRule) -> "NodeScheme":
        return cls(tuple(rule.nodes), tuple(rule.orders))

    def to_dict(self) -> Dict[str, Any]:
        return {"nodes": list(self.nodes), "mults": list(self.mults), "N": self.N}


def _map_values(fmap: ConformalMap, xs: Any) -> np.ndarray:
    return np.asarray(fmap(np.asarray(xs, dtype=complex)))


def _node_images(fmap: ConformalMap, scheme: NodeScheme) -> np.ndarray:
    return np.real(_map_values(fmap, np.array(scheme.nodes)))


def _node_coordinates(fmap: ConformalMap, scheme: NodeScheme) -> np.ndarray:
    return np.atleast_1d(np.asarray(segment_coordinate(fmap, np.array(scheme.nodes)), dtype=float))


def _log_segment_product(fmap: ConformalMap, xs: np.ndarray, coords: np.ndarray,
                         powers: np.ndarray) -> np.ndarray:
    """sum_j r_j log m(F(x), F_j) on real x, from gaps of hyperbolic coordinates."""
    u = np.asarray(segment_coordinate(fmap, xs), dtype=float)
    gap = np.abs(u[..., None] - coords)
    # log tanh(gap), exact for large gaps and -inf at a node
    decay = np.exp(-2.0 * gap)
    with np.errstate(divide="ignore"):
        log_factors = np.log1p(-decay) - np.log1p(decay)
    return log_factors @ powers


def extremal_function(fmap: ConformalMap, scheme: NodeScheme) -> AnalyticFunction:
    """
    The extremal function of the scheme: bounded by 1, real and >= 0 on [-1, 1].

    Raises:
        DomainError: If a node lies outside the domain segment
    """
    images = _node_images(fmap, scheme)
    coords = _node_coordinates(fmap, scheme)
    powers = np.array(scheme.even_mults, dtype=float)

    def evaluate(z: Any) -> Any:
        zs = np.asarray(z, dtype=complex)
        shape = zs.shape
        zs = zs.reshape(-1)
        values = np.empty(zs.shape, dtype=complex)
        on = (zs.imag == 0) & (np.abs(zs.real) <= 1.0)
        if np.any(on):
            values[on] = np.exp(_log_segment_product(fmap, zs.real[on], coords, powers))
        if not np.all(on):
            F = _map_values(fmap, zs[~on]).reshape(-1, 1)
            factors = (F - images[None, :]) / (1.0 - images[None, :] * F)
            with np.errstate(divide="ignore"):
                log_modulus = np.log(np.abs(factors)) @ powers
            phase = np.angle(factors) @ powers
            values[~on] = np.exp(log_modulus) * np.exp(1j * phase)
        return values.reshape(shape) if shape else values[0]

    return AnalyticFunction(evaluate, fmap.domain, 1.0, True, "extremal")


def competitor_function(fmap: ConformalMap, scheme: NodeScheme, extra: int = 1) -> AnalyticFunction:
    """Extremal function of the same nodes with every r(k_j) raised by 2 * extra."""
    if extra < 1:
        raise DomainError(f"extra must be positive, got {extra}")
    raised = tuple(round_even(k) + 2 * extra - 1 for k in scheme.mults)
    competitor = extremal_function(fmap, NodeScheme(scheme.nodes, raised))
    competitor.name = "competitor"
    return competitor


def _jplus_integrand(fmap: ConformalMap, scheme: NodeScheme) -> Callable[[np.ndarray], np.ndarray]:
    coords = _node_coordinates(fmap, scheme)
    powers = np.array(scheme.even_mults, dtype=float)

    def integrand(xs: np.ndarray) -> np.ndarray:
        return np.exp(_log_segment_product(fmap, np.asarray(xs, dtype=float), coords, powers))

    return integrand


def jplus_exact(fmap: ConformalMap, w: WeightMeasure, scheme: NodeScheme, tol: float,
                settings: Optional[IntegrationSettings] = None) -> float:
    """
    J_+(D; X; K) = integral of prod_j m(F(x), F_j)^{r(k_j)} d alpha(x).

    Args:
        fmap: Conformal map of the domain
        w: Weight measure on [-1, 1]
        scheme: Nodes and multiplicities
        tol: Absolute tolerance of the integration
        settings: Panel order and panel budget

    Returns:
        The integral, within tol

    Raises:
        IntegrationError: If the panel budget runs out before tol is met
    """
    return integrate_weighted(_jplus_integrand(fmap, scheme), w, tol, settings).value


@dataclass(frozen=True)
class OptimizerConfig:
    """Multistart coordinate descent settings for jplus_minimize."""

    starts: Tuple[str, ...] = ("chebyshev", "equispaced", "gauss")
    max_sweeps: int = 25
    step_tol: float = 1e-10
    search_multiplicities: bool = False
    workers: int = 3
    seed: int = 0
    tol: float = 1e-10
    check_bounds: bool = True

    def __post_init__(self) -> None:
        unknown = [s for s in self.starts if s not in START_KINDS]
        if unknown:
            raise DomainError(f"Unknown optimizer start kinds: {unknown}")

    @classmethod
    def from_config(cls, config_manager: Optional[Any], **overrides: Any) -> "OptimizerConfig":
        section = config_manager.get_section("optimizer") if config_manager is not None else {}
        values: Dict[str, Any] = {
            "starts": tuple(section.get("starts", cls.starts)),
            "max_sweeps": int(section.get("max_sweeps", cls.max_sweeps)),
            "step_tol": float(section.get("step_tol", cls.step_tol)),
            "search_multiplicities": bool(section.get("search_multiplicities", cls.search_multiplicities)),
            "workers": int(section.get("workers", cls.workers)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def compositions(N: int) -> List[Tuple[int, ...]]:
    """All ordered splits of N into positive parts."""
    result = []
    for cuts in itertools.product((False, True), repeat=N - 1):
        parts, size = [], 1
        for cut in cuts:
            if cut:
                parts.append(size)
                size = 1
            else:
                size += 1
        parts.append(size)
        result.append(tuple(parts))
    return sorted(result)


def start_nodes(kind: str, n: int, w: WeightMeasure, seed: int = 0) -> List[float]:
    if kind == "chebyshev":
        j = np.arange(n, 0, -1)
        return list(np.cos((2 * j - 1) * np.pi / (2 * n)))
    if kind == "equispaced":
        return list(np.linspace(-1.0, 1.0, n + 2)[1:-1])
    if kind == "gauss":
        return list(gauss_rule(w, n).nodes)
    if kind == "random":
        rng = np.random.default_rng(seed)
        return list(np.sort(rng.uniform(-1.0, 1.0, n)))
    raise DomainError(f"Unknown start kind: {kind}")


class _Objective:
    """J_+ as a function of the node vector for fixed multiplicities, with the bound check."""

    def __init__(self, fmap: ConformalMap, w: WeightMeasure, mults: Tuple[int, ...], tol: float,
                 lower: float, settings: Optional[IntegrationSettings]) -> None:
        self.fmap = fmap
        self.w = w
        self.mults = mults
        self.tol = tol
        self.lower = lower
        self.settings = settings
        self.evaluations = 0

    def __call__(self, nodes: Sequence[float]) -> float:
        scheme = NodeScheme(tuple(nodes), self.mults)
        value = jplus_exact(self.fmap, self.w, scheme, self.tol, self.settings)
        self.evaluations += 1
        if value < self.lower - self.tol - 1e-9 * self.lower:
            raise BoundViolationError(
                f"J_+ = {value:.6e} at {scheme.nodes} is below the lower bound {self.lower:.6e}"
            )
        return value


def _descend(objective: _Objective, nodes: List[float], cfg: OptimizerConfig) -> Tuple[float, List[float]]:
    nodes = list(nodes)
    value = objective(nodes)
    n = len(nodes)
    for sweep in range(cfg.max_sweeps):
        before = value
        largest_move = 0.0
        for j in range(n):
            lo = nodes[j - 1] + 1e-9 if j > 0 else -1.0
            hi = nodes[j + 1] - 1e-9 if j < n - 1 else 1.0
            if hi <= lo:
                continue

            def along(t: float, _j: int = j) -> float:
                trial = list(nodes)
                trial[_j] = t
                return objective(trial)

            res = minimize_scalar(along, bounds=(lo, hi), method="bounded",
                                  options={"xatol": cfg.step_tol})
            if res.fun < value:
                largest_move = max(largest_move, abs(float(res.x) - nodes[j]))
                nodes[j] = float(res.x)
                value = float(res.fun)
        logger.debug(f"Sweep {sweep}: J_+ = {value:.12e}, largest move {largest_move:.2e}")
        if largest_move <= 10 * cfg.step_tol or before - value <= 1e-13 * before:
            break
    return value, nodes


def _scheme_lower_bound(fmap: ConformalMap, w: WeightMeasure, N: int) -> float:
    domain = fmap.domain
    delta = domain.delta_sup
    lower = new_lower_measure(w, delta, domain.koebe_L, N)
    if w.kind == "lebesgue":
        lower = max(lower, 2.0 * new_lower_gamma(delta, N, domain.convex))
    return lower


def jplus_minimize(fmap: ConformalMap, w: WeightMeasure, N: int,
                   cfg: Optional[OptimizerConfig] = None,
                   settings: Optional[IntegrationSettings] = None) -> Tuple[float, NodeScheme]:
    """
    Smallest J_+(D; X; K) found over node placements with sum K = N.

    Multiplicities are all ones unless cfg.search_multiplicities is set and
    N <= 6, in which case every composition of N is tried. Each start runs
    coordinate descent; ties between starts go to the lexicographically
    smallest node vector.

    Args:
        fmap: Conformal map of the domain
        w: Weight measure on [-1, 1]
        N: Total multiplicity sum K
        cfg: Starts, sweep limits and worker count
        settings: Integration settings for every J_+ evaluation

    Returns:
        Tuple of the smallest J_+ found and the scheme attaining it

    Raises:
        DomainError: If N < 1
        BoundViolationError: If a visited scheme falls below the lower bound
    """
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    cfg = cfg or OptimizerConfig()
    lower = _scheme_lower_bound(fmap, w, N) if cfg.check_bounds else 0.0
    splits = compositions(N) if cfg.search_multiplicities and N <= 6 else [(1,) * N]

    jobs: List[Tuple[Tuple[int, ...], List[float]]] = []
    for mults in splits:
        for i, kind in enumerate(cfg.starts):
            jobs.append((mults, start_nodes(kind, len(mults), w, cfg.seed + i)))

    def run(job: Tuple[Tuple[int, ...], List[float]]) -> Tuple[float, Tuple[float, ...], Tuple[int, ...]]:
        mults, nodes = job
        reference = jplus_exact(fmap, w, NodeScheme(tuple(nodes), mults), cfg.tol, settings)
        tol = min(cfg.tol, max(1e-12 * reference, 1e-300))
        objective = _Objective(fmap, w, mults, tol, lower, settings)
        value, best = _descend(objective, nodes, cfg)
        return value, tuple(best), mults

    logger.info(f"Minimising J_+ for N={N}: {len(jobs)} starts on {fmap!r}")
    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        results = list(pool.map(run, jobs))

    value, nodes, mults = min(results, key=lambda r: (r[0], r[1]))
    logger.info(f"Best J_+ for N={N}: {value:.6e}")
    return value, NodeScheme(nodes, mults)


@dataclass
class AdversaryResult:
    """Worst-case function for a rule and the error it is guaranteed to cause."""

    function: AnalyticFunction
    guaranteed_error: float
    scheme: NodeScheme
    M: float
    domain_info: Dict[str, Any] = field(default_factory=dict)

    def descriptor(self) -> Dict[str, Any]:
        return {
            "c": self.domain_info.get("c"),
            "domain": dict(self.domain_info),
            "nodes": list(self.scheme.nodes),
            "mults": list(self.scheme.mults),
            "M": self.M,
            "guaranteed_error": self.guaranteed_error,
        }


def adversary_for_rule(fmap: ConformalMap, w: WeightMeasure, rule: QuadratureRule, M: float, tol: float = 1e-10,
                       settings: Optional[IntegrationSettings] = None) -> AdversaryResult:
    """
    M times the extremal function of the rule's own nodes and orders.

    The rule sees only zeros on it, so it returns 0 while the integral is
    M J_+; this holds for rules linear in the data.

    Args:
        fmap: Conformal map of the domain
        w: Weight measure the rule integrates against
        rule: The rule under attack
        M: Sup bound of the adversary on the domain
        tol: Absolute tolerance of the guaranteed error
        settings: Integration settings

    Returns:
        AdversaryResult with the function, its guaranteed error and the scheme

    Raises:
        IntegrationError: If J_+ cannot be resolved to tol
        DomainError: If M < 0
    """
    if M < 0:
        raise DomainError(f"Bound M must be nonnegative, got {M}")
    scheme = NodeScheme.from_rule(rule)
    base = extremal_function(fmap, scheme)

    def scaled(z: Any) -> Any:
        return M * base.eval(z)

    f0 = AnalyticFunction(scaled, fmap.domain, float(M), True, "adversary")
    guaranteed = M * jplus_exact(fmap, w, scheme, tol / max(M, 1.0), settings) if M > 0 else 0.0
    return AdversaryResult(f0, guaranteed, scheme, float(M), fmap.domain.describe())


def symmetrize_real(g: AnalyticFunction, omega: complex) -> AnalyticFunction:
    """
    h(z) = (omega g(z) + conj(omega g(conj z))) / 2, real on the real line.

    Raises:
        DomainError: If |omega| != 1
    """
    if abs(abs(omega) - 1.0) > 1e-12:
        raise DomainError(f"omega must have modulus 1, got |omega| = {abs(omega)}")

    def h(z: Any) -> Any:
        z = np.asarray(z, dtype=complex)
        values = 0.5 * (omega * np.asarray(g.eval(z)) + np.conj(omega * np.asarray(g.eval(np.conj(z)))))
        return values.item() if values.ndim == 0 else values

    return AnalyticFunction(h, g.domain, g.bound_M, True, f"symmetrized_{g.name}" if g.name else "symmetrized")


def sample_table(f: AnalyticFunction, points: Sequence[float]) -> List[Tuple[float, float]]:
    """[(x, f(x))] on the given real points."""
    xs = np.asarray(points, dtype=float)
    values = np.real(np.asarray(f(xs.astype(complex))))
    return [(float(x), float(v)) for x, v in zip(xs, values)]
