"""
Command implementations for the quadbound CLI.

Each command turns a validated RunConfig into a Report (or, for verify, a
VerificationReport). Parsing lives in quadbound.main; this module only
merges parsed flags over the configured defaults and runs the pipelines.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, TextIO, Tuple

import numpy as np

from quadbound.src.bounds import (
    BoundRecord,
    bakhvalov_kappa0,
    chebyshev_witness_lower,
    ellipse_node_estimates,
    gauss_legendre_upper,
    gauss_loss_bound,
    info_bounds,
    kappa_g,
    new_lower_ellipse,
    new_lower_gamma,
    new_lower_measure,
    optimality_ratio,
    osipenko_chebyshev,
    petras_explicit_lower,
    petras_kn,
    szego_limit,
    to_record,
)
from quadbound.src.config_manager import ConfigManager
from quadbound.src.domains import EllipseDomain, named_preset
from quadbound.src.error_handler import (
    DomainError,
    ErrorHandler,
    IntegrationError,
    UsageError,
    VerificationError,
)
from quadbound.src.extremal import OptimizerConfig, adversary_for_rule, jplus_minimize, sample_table
from quadbound.src.hyperbolic import conformal_map
from quadbound.src.quadrature import (
    DerivativeSettings,
    IntegrationSettings,
    WeightMeasure,
    gauss_rule,
    measure_error,
)
from quadbound.src.report_writer import FORMATS, Report, ReportWriter
from quadbound.src.verification import VerificationReport, run_acceptance

logger = logging.getLogger(__name__)

COMMANDS = ("bounds", "adversary", "sweep", "verify")
CLI_WEIGHTS = ("lebesgue", "chebyshev")
ADVERSARY_SAMPLES = 201


@dataclass
class RunConfig:
    """Everything one command needs, after flags were merged over the config file."""

    command: str
    c_list: Tuple[float, ...] = ()
    n_list: Tuple[int, ...] = (4,)
    N_list: Tuple[int, ...] = ()
    weight: str = "lebesgue"
    M: float = 1.0
    eps: float = 1e-6
    tol: float = 1e-10
    seed: int = 0
    out: Optional[str] = None
    fmt: str = "csv"
    gamma_scale: float = 1.0
    search_multiplicities: bool = False
    workers: int = 4

    def validate(self) -> "RunConfig":
        """
        Check the RunConfig invariants.

        Raises:
            UsageError: If any invariant fails
        """
        if self.command not in COMMANDS:
            raise UsageError(f"Unknown command '{self.command}' (use one of {', '.join(COMMANDS)})")
        if self.command != "verify" and not self.c_list:
            raise UsageError("No ellipse given: use --ellipse c=<r> or --preset <name>")
        if any(not math.isfinite(c) or c <= 1.0 for c in self.c_list):
            raise UsageError(f"Every ellipse parameter must satisfy c > 1, got {list(self.c_list)}")
        if any(n < 1 for n in self.n_list) or any(N < 1 for N in self.N_list):
            raise UsageError("Every n and N must be at least 1")
        if self.command != "verify" and not self.n_list:
            raise UsageError("The n-list is empty")
        if not self.tol > 0:
            raise UsageError(f"--tol must be positive, got {self.tol}")
        if self.weight not in CLI_WEIGHTS:
            raise UsageError(f"Unknown weight '{self.weight}' (use one of {', '.join(CLI_WEIGHTS)})")
        if self.M < 0:
            raise UsageError(f"--M must be nonnegative, got {self.M}")
        if not self.eps > 0:
            raise UsageError(f"--eps must be positive, got {self.eps}")
        if self.command == "sweep" and not self.M > self.eps:
            raise UsageError("sweep needs M > eps for the node-count estimates")
        if self.fmt not in FORMATS:
            raise UsageError(f"Unknown format '{self.fmt}' (use csv or json)")
        if self.workers < 1:
            raise UsageError("workers must be at least 1")
        return self


def parse_number_list(text: str, kind: Callable[[str], Any] = float) -> List[Any]:
    """
    Parse '1.5,2' (optionally 'c=1.5,2') into numbers.

    Raises:
        UsageError: If an item is not a number of the given kind
    """
    if "=" in text:
        key, _, text = text.partition("=")
        if key.strip() != "c":
            raise UsageError(f"Expected c=<value>, got '{key}='")
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            values.append(kind(item))
        except ValueError:
            raise UsageError(f"Not a valid {kind.__name__}: '{item}'")
    return values


def _arg(args: Any, name: str) -> Any:
    return getattr(args, name, None)


def build_run_config(args: Any, config_manager: Optional[ConfigManager]) -> RunConfig:
    """
    Merge parsed CLI flags over the configured defaults.

    Args:
        args: Parsed argparse namespace; absent flags are None
        config_manager: Source of the run, sweep and output defaults

    Returns:
        A validated RunConfig

    Raises:
        UsageError: For malformed flags or a config violating the invariants
    """
    command = _arg(args, "command") or ""
    section = "sweep" if command == "sweep" else "run"

    c_list: List[float] = []
    for item in _arg(args, "ellipse") or []:
        c_list.extend(parse_number_list(item, float))
    for name in _arg(args, "preset") or []:
        try:
            c_list.append(named_preset(name, config_manager).c)
        except DomainError as e:
            raise UsageError(str(e))
    if not c_list:
        c_list = [float(c) for c in config_manager.get(section, "c_list", [])]

    n_list = (parse_number_list(args.n, int) if _arg(args, "n")
              else [int(n) for n in config_manager.get(section, "n_list", [4])])
    if _arg(args, "N"):
        N_list = parse_number_list(args.N, int)
    elif command == "sweep":
        N_list = [int(N) for N in config_manager.get("sweep", "N_list", [])]
    else:
        N_list = []

    def pick(flag: str, key: str, default: Any, section_name: str = "run") -> Any:
        value = _arg(args, flag)
        return value if value is not None else config_manager.get(section_name, key, default)

    cfg = RunConfig(
        command=command,
        c_list=tuple(sorted(set(c_list))),
        n_list=tuple(sorted(set(n_list))),
        N_list=tuple(sorted(set(N_list))),
        weight=pick("weight", "weight", "lebesgue"),
        M=float(pick("M", "M", 1.0)),
        eps=float(pick("eps", "eps", 1e-6)),
        tol=float(pick("tol", "tol", 1e-10)),
        seed=int(pick("seed", "seed", 0)),
        out=pick("out", "directory", None, "output"),
        fmt=pick("format", "format", "csv", "output"),
        gamma_scale=float(_arg(args, "dev_gamma_scale") or 1.0),
        search_multiplicities=bool(_arg(args, "search_multiplicities")
                                   or config_manager.get("optimizer", "search_multiplicities", False)),
        workers=int(config_manager.get("sweep", "workers", 4)),
    )
    logger.debug(f"Run configuration: {cfg}")
    return cfg.validate()


def bound_rows(c: float, n: int, w: WeightMeasure) -> List[BoundRecord]:
    """All lower, upper and reference values for one (c, n) cell."""
    domain = EllipseDomain(c)
    delta = domain.delta_sup
    weight = w.kind
    common = {"c": c, "n": n, "weight": weight}
    rows = [
        to_record("delta", "reference", delta, "delta_D of E_c, (c - 1/c)/2", **common),
        to_record("new_lower_gamma", "lower", new_lower_gamma(delta, n, domain.convex),
                  "gamma bound on the optimal error", N=n, **common),
        to_record("new_lower_ellipse", "lower", new_lower_ellipse(c, n),
                  "closed-form bound on J_+(E_c; N)", N=n, **common),
        to_record("new_lower_measure", "lower", new_lower_measure(w, delta, domain.koebe_L, n),
                  "measure-form bound on J_+(E_c; N)", N=n, **common),
        to_record("bakhvalov", "lower", bakhvalov_kappa0(c, weight) * c ** (-2 * n),
                  "kappa_0 c^-2n", **common),
        to_record("petras_explicit", "lower", petras_explicit_lower(weight, c, n),
                  "explicit finite-n bound", **common),
        to_record("petras_kn", "lower", petras_kn(w, c, n),
                  "k_n from orthonormal polynomials", **common),
        to_record("szego_limit", "reference", szego_limit(w, c) * c ** (-2 * n),
                  "Szego asymptotic of k_n", **common),
    ]
    if weight == "chebyshev":
        rows.append(to_record("osipenko", "reference", osipenko_chebyshev(c, n),
                              "leading term of the optimal Chebyshev error", **common))
    else:
        witness, _ = chebyshev_witness_lower(c, n)
        rows.append(to_record("chebyshev_witness", "lower", witness,
                              "error of G_n on the scaled T_2n", **common))

    legendre = {"c": c, "n": n, "weight": "lebesgue"}
    for method in ("rabinowitz", "petras", "petras26"):
        rows.append(to_record(method, "upper", gauss_legendre_upper(c, n, method),
                              "Gauss-Legendre worst-case error", **legendre))
    rows.append(to_record("gauss_loss", "reference", gauss_loss_bound(c, n),
                          "Gauss-Legendre upper bound over the best lower bound", **legendre))
    return rows


def node_count_rows(c: float, weight: str, M_over_eps: float) -> List[BoundRecord]:
    """Information counts N_l and N_g needed for accuracy eps on functions bounded by M."""
    common = {"c": c, "weight": weight, "M_over_eps": M_over_eps}
    exact, asymptotic, ratio = ellipse_node_estimates(M_over_eps, c)
    kappa_l = bakhvalov_kappa0(c, weight)
    kappa_u = kappa_g(c, "petras")
    n_l, n_g = info_bounds(M_over_eps, c, kappa_l, kappa_u)
    rows = [
        to_record("N_l_new", "lower", exact, "information count from the ellipse bound", **common),
        to_record("N_l_new_over_N_g", "reference", ratio, "N_l_new / (ln(M/eps) / ln c)", **common),
        to_record("N_l_bakhvalov", "lower", n_l, "information count from kappa_0", **common),
        to_record("N_g", "upper", n_g, "Gauss-Legendre information count", **common),
        to_record("optimality_ratio", "reference", optimality_ratio(M_over_eps, c, kappa_l, kappa_u),
                  "N_l_bakhvalov / N_g", **common),
    ]
    if math.isfinite(asymptotic):
        rows.append(to_record("N_l_asymptotic", "reference", asymptotic,
                              "-ln(M/eps) / (4 (c - 1) ln(c - 1))", **common))
    return rows


def run_bounds(cfg: RunConfig, config_manager: Optional[ConfigManager] = None) -> Report:
    """One block of bound rows per (c, n)."""
    w = WeightMeasure.from_name(cfg.weight)
    report = Report("bounds", metadata={"weight": cfg.weight})
    for c in cfg.c_list:
        for n in cfg.n_list:
            report.extend(bound_rows(c, n, w))
    logger.info(f"bounds: {len(report.records)} rows for {len(cfg.c_list)} ellipses")
    return report


def run_adversary(cfg: RunConfig, config_manager: Optional[ConfigManager] = None,
                  error_handler: Optional[ErrorHandler] = None,
                  writer: Optional[ReportWriter] = None) -> Report:
    """
    Build G_n, its adversary and the measured error for every (c, n).

    A measured error below the guaranteed one (less the tolerance) becomes a
    failure in the report; the rows are kept as diagnostics. A grid point
    whose integrals do not converge is tracked and skipped.
    """
    error_handler = error_handler or ErrorHandler(config_manager)
    w = WeightMeasure.from_name(cfg.weight)
    integration = IntegrationSettings.from_config(config_manager)
    derivatives = DerivativeSettings.from_config(config_manager)
    report = Report("adversary", metadata={"weight": cfg.weight, "M": cfg.M})
    slack = 2.0 * cfg.tol * max(cfg.M, 1.0)

    for c in cfg.c_list:
        fmap = conformal_map(EllipseDomain(c), config_manager)
        delta = fmap.domain.delta_sup
        for n in cfg.n_list:
            rule = gauss_rule(w, n)
            try:
                adversary = adversary_for_rule(fmap, w, rule, cfg.M, cfg.tol, integration)
                measured = measure_error(rule, adversary.function, w, cfg.tol, integration, derivatives)
            except IntegrationError as e:
                context = {"c": c, "n": n, "estimate": e.estimate,
                           "error_estimate": e.error_estimate, "panels": e.panels}
                error_handler.track_failure("integration", f"c={c}, n={n}", str(e), context)
                report.failures.append({**context, "reason": str(e)})
                continue
            error = abs(measured.error)
            gamma_bound = cfg.M * new_lower_gamma(delta, n, True)
            common = {"c": c, "n": n, "N": rule.info_count, "weight": cfg.weight, "M": cfg.M}
            report.extend([
                to_record("adversary_guaranteed", "lower", adversary.guaranteed_error,
                          "M J_+ of the rule's own nodes", **common),
                to_record("adversary_measured", "measured", error,
                          "|I(f0) - G_n(f0)|", **common),
                to_record("adversary_gamma_bound", "lower", gamma_bound, "M gamma", **common),
            ])
            if error < adversary.guaranteed_error - slack or error < gamma_bound - slack:
                failure = {"c": c, "n": n, "measured": error,
                           "guaranteed": adversary.guaranteed_error, "gamma_bound": gamma_bound}
                error_handler.track_failure("adversary", f"c={c}, n={n}",
                                            "measured error below the guaranteed error", failure)
                report.failures.append(failure)
            if writer is not None and cfg.out is not None:
                points = np.linspace(-1.0, 1.0, ADVERSARY_SAMPLES)
                writer.save_adversary_table(c, n, sample_table(adversary.function, points),
                                            adversary.descriptor(), cfg.out)
    return report


def _jplus_rows(c: float, N: int, w: WeightMeasure, opt: OptimizerConfig,
                config_manager: Optional[ConfigManager]) -> List[BoundRecord]:
    fmap = conformal_map(EllipseDomain(c), config_manager)
    value, scheme = jplus_minimize(fmap, w, N, opt, IntegrationSettings.from_config(config_manager))
    return [to_record("jplus_min", "upper", value,
                      f"smallest J_+ found, nodes {', '.join(f'{x:.6f}' for x in scheme.nodes)}",
                      c=c, N=N, weight=w.kind)]


def run_sweep(cfg: RunConfig, config_manager: Optional[ConfigManager] = None) -> Report:
    """
    The bound grid of every (c, n), node counts per c and J_+ minima per (c, N).

    Grid points run concurrently; the report is sorted when rendered.
    """
    w = WeightMeasure.from_name(cfg.weight)
    opt = OptimizerConfig.from_config(config_manager, seed=cfg.seed, tol=cfg.tol,
                                      search_multiplicities=cfg.search_multiplicities)
    M_over_eps = cfg.M / cfg.eps
    tasks = [(bound_rows, (c, n, w)) for c in cfg.c_list for n in cfg.n_list]
    tasks += [(node_count_rows, (c, cfg.weight, M_over_eps)) for c in cfg.c_list]
    tasks += [(_jplus_rows, (c, N, w, opt, config_manager)) for c in cfg.c_list for N in cfg.N_list]

    report = Report("sweep", metadata={"weight": cfg.weight, "M_over_eps": M_over_eps})
    logger.info(f"sweep: {len(tasks)} grid points on {cfg.workers} workers")
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        for rows in pool.map(lambda task: task[0](*task[1]), tasks):
            report.extend(rows)
    return report


def run_verify(cfg: RunConfig, config_manager: Optional[ConfigManager] = None) -> VerificationReport:
    return run_acceptance(config_manager, cfg.tol, cfg.seed, cfg.gamma_scale)


def emit(report: Report, cfg: RunConfig, writer: ReportWriter, stream: Optional[TextIO] = None) -> None:
    """Print the report, or save it when --out is given."""
    if cfg.out is None:
        print(writer.render(report, cfg.fmt), end="", file=stream)
    else:
        writer.save_report(report, cfg.fmt, cfg.out)


def execute(cfg: RunConfig, config_manager: Optional[ConfigManager], error_handler: ErrorHandler,
            stream: Optional[TextIO] = None) -> int:
    """
    Run a command; returns 0 once its report is out.

    Args:
        cfg: The merged run configuration
        config_manager: Configuration for the maps, integrator and optimizer
        error_handler: Collects failures for the end-of-run summary
        stream: Where reports are printed when no --out is given

    Returns:
        0 on success

    Raises:
        UsageError: For the caller to map to exit status 2
        VerificationError: After the report, when a criterion or adversary check failed
    """
    writer = ReportWriter()
    if cfg.command == "verify":
        result = run_verify(cfg, config_manager)
        for line in result.lines():
            print(line, file=stream)
        for failed in result.failed():
            error_handler.track_failure("verification", failed.name, failed.detail)
        if not result.passed:
            raise VerificationError(f"Failed criteria: {', '.join(r.name for r in result.failed())}")
        return 0

    if cfg.command == "bounds":
        report = run_bounds(cfg, config_manager)
    elif cfg.command == "adversary":
        report = run_adversary(cfg, config_manager, error_handler, writer)
    else:
        report = run_sweep(cfg, config_manager)
    emit(report, cfg, writer, stream)
    if not report.ok:
        raise VerificationError(f"{len(report.failures)} adversary grid points failed")
    return 0

