"""Outer majorize-minimize loops over the configuration matrix H.

Each outer iteration linearizes the information matrix at the current H_t,
solves the resulting surrogate subproblem through its Lagrange dual (the
coordinate-descent inner solver over the 3x3 factor Q), and recovers the
next configuration by normalizing the rows of S* C_t with S* = Q* Q*^T.

The mean-squared-error objective Tr((H^T R^-1 H)^-1) runs this step with an
identity inner weight. The log-det objective wraps the same step with one
extra tangent bound: at each iteration the weight W_t = H_t^T R^-1 H_t is
formed and the inner solver runs with V_t = sym_sqrt(W_t), which minimizes
Tr(W_t (H^T R^-1 H)^-1) over unit-row H and therefore descends the log-det.
Both loops produce monotone non-increasing objective traces.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from math import isfinite

import numpy as np

from rimu_opt import numerics
from rimu_opt.errors import (
    DegenerateDirection,
    DegenerateInit,
    DimensionMismatch,
    InvalidConfiguration,
    NotPositiveDefinite,
    SingularInformation,
    SurrogateIndefinite,
)
from rimu_opt.inner import InnerState, init_inner, solve_inner
from rimu_opt.model import (
    FomKind,
    NoiseModel,
    SensorConfiguration,
    evaluate_fom,
    optimality_defect,
)

log = logging.getLogger("rimu_opt")

ROW_UPDATE_TOL = 1e-14


@dataclass(frozen=True)
class SolverSettings:
    """Knobs of one solver run; defaults favor accuracy over speed."""

    fom: FomKind = FomKind.A_TRACE
    eps_outer: float = 1e-9
    max_outer_iters: int = 1000
    eps_inner: float = 1e-10
    max_inner_sweeps: int = 500
    seed: int = 0
    restarts: int = 1

    def __post_init__(self) -> None:
        if self.fom not in (FomKind.A_TRACE, FomKind.D_LOG_DET):
            raise ValueError("only the trace and log-det objectives can be optimized")
        if not (self.eps_outer > 0.0 and self.eps_inner > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_outer_iters < 1 or self.max_inner_sweeps < 1:
            raise ValueError("iteration caps must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass(frozen=True)
class TraceRecord:
    """One outer iteration: objective, inner effort, distance from the
    equal-variance optimality condition, and the iterate itself."""

    iteration: int
    objective: float
    inner_sweeps: int
    optimality_defect: float
    config: SensorConfiguration = field(repr=False)
    inner_gammas: tuple[float, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class ConvergenceTrace:
    """Per-iteration records; the objective column is non-increasing."""

    records: tuple[TraceRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, idx):
        return self.records[idx]

    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    def csv_lines(self) -> list[str]:
        lines = ["iter,objective,inner_sweeps,optimality_defect"]
        for r in self.records:
            lines.append(f"{r.iteration},{r.objective!r},{r.inner_sweeps},{r.optimality_defect!r}")
        return lines


@dataclass(frozen=True)
class Solution:
    """Converged (or capped) solver output."""

    configuration: SensorConfiguration
    objective: float
    fom: FomKind
    trace: ConvergenceTrace
    converged: bool
    outer_iters: int
    seed: int | None
    restart_objectives: tuple[float, ...] | None = None


def random_configuration(m: int, seed: int) -> SensorConfiguration:
    """m independent uniformly distributed unit axes, deterministic in seed.

    Rows are normalized standard-Gaussian draws; the whole matrix is
    resampled while H^T H stays numerically rank deficient (at most 100
    attempts, then DegenerateInit).
    """
    if m < 3:
        raise InvalidConfiguration(f"need at least 3 sensors, got {m}")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        draws = rng.standard_normal((m, 3))
        norms = np.sqrt((draws * draws).sum(axis=1))
        if np.any(norms < 1e-12):
            continue
        axes = draws / norms[:, None]
        gram = axes.T @ axes
        if numerics.min_eigen_sym(0.5 * (gram + gram.T)) >= 1e-6:
            return SensorConfiguration(axes)
    raise DegenerateInit(f"no full-rank random configuration for m={m} after 100 attempts")


def update_H(state: InnerState) -> SensorConfiguration:
    """Next configuration from the inner optimum: rows of S* C normalized.

    Each new axis is the unit vector along S* c_i with S* = Q* Q*^T; a
    vanishing direction raises DegenerateDirection.
    """
    s_star = state.Q @ state.Q.T
    rows = state.C @ s_star
    norms = np.sqrt((rows * rows).sum(axis=1))
    if np.any(norms <= ROW_UPDATE_TOL):
        bad = int(np.argmin(norms))
        raise DegenerateDirection(f"update direction for sensor {bad} has norm {norms[bad]:.3e}")
    return SensorConfiguration(rows / norms[:, None])


def surrogate_value(
    config: SensorConfiguration,
    anchor: SensorConfiguration,
    noise: NoiseModel,
    weight: np.ndarray | None = None,
) -> float:
    """Tr(W Phi^-1) for the linearized information matrix
    Phi(H; H_t) = -H_t^T R^-1 H_t + H^T R^-1 H_t + H_t^T R^-1 H.

    With W = I this is the tangent upper bound of the trace objective: it
    touches it at H = H_t and majorizes it wherever Phi is positive
    definite. Raises SurrogateIndefinite outside that region.
    """
    if config.m != anchor.m or noise.m != config.m:
        raise DimensionMismatch("configuration, anchor and noise dimensions must agree")
    cross = config.axes.T @ (noise.inverse @ anchor.axes)
    a_t = anchor.axes.T @ (noise.inverse @ anchor.axes)
    phi = cross + cross.T - 0.5 * (a_t + a_t.T)
    phi = 0.5 * (phi + phi.T)
    w = np.eye(3) if weight is None else numerics.require_symmetric(weight)
    try:
        x = numerics.solve_spd(phi, w)
    except NotPositiveDefinite as exc:
        raise SurrogateIndefinite("linearized information matrix has a non-positive eigenvalue") from exc
    return float(np.trace(x))


def _objective(config: SensorConfiguration, noise: NoiseModel, fom: FomKind) -> float:
    return evaluate_fom(config, noise, fom)


def _run(noise: NoiseModel, settings: SolverSettings, h0: SensorConfiguration | None, fom: FomKind) -> Solution:
    seed: int | None
    if h0 is None:
        config = random_configuration(noise.m, settings.seed)
        seed = settings.seed
    else:
        if h0.m != noise.m:
            raise DimensionMismatch(f"H0 has {h0.m} rows but noise is {noise.m}x{noise.m}")
        config = h0
        seed = None
    objective = _objective(config, noise, fom)
    records = [TraceRecord(0, objective, 0, optimality_defect(config), config)]
    q_warm = np.eye(3)
    converged = False
    iters = 0
    for t in range(1, settings.max_outer_iters + 1):
        if fom is FomKind.D_LOG_DET:
            w_t = config.axes.T @ (noise.inverse @ config.axes)
            weight = numerics.sym_sqrt(0.5 * (w_t + w_t.T))
        else:
            weight = None
        state = init_inner(config, noise, weight=weight, q0=q_warm)
        try:
            result = solve_inner(state, settings.eps_inner, settings.max_inner_sweeps)
            config_next = update_H(state)
        except (DegenerateDirection, SingularInformation) as exc:
            raise type(exc)(f"outer iteration {t}: {exc}") from exc
        new_objective = _objective(config_next, noise, fom)
        records.append(
            TraceRecord(
                t,
                new_objective,
                result.sweeps,
                optimality_defect(config_next),
                config_next,
                result.gammas,
            )
        )
        config = config_next
        q_warm = state.Q.copy()
        iters = t
        if not isfinite(new_objective):
            raise SingularInformation(f"outer iteration {t}: objective became non-finite")
        if abs(objective - new_objective) <= settings.eps_outer * max(1.0, abs(objective)):
            objective = new_objective
            converged = True
            break
        objective = new_objective
    log.info(
        "%s solve: m=%d objective=%.12g iters=%d converged=%s",
        fom.value,
        noise.m,
        objective,
        iters,
        converged,
    )
    return Solution(
        configuration=config,
        objective=objective,
        fom=fom,
        trace=ConvergenceTrace(tuple(records)),
        converged=converged,
        outer_iters=iters,
        seed=seed,
    )


def solve(noise: NoiseModel, settings: SolverSettings, h0: SensorConfiguration | None = None) -> Solution:
    """Run the solver for the objective selected in ``settings.fom``."""
    return _run(noise, settings, h0, settings.fom)


def solve_a_optimal(
    noise: NoiseModel, settings: SolverSettings, h0: SensorConfiguration | None = None
) -> Solution:
    """Minimize the estimation-error trace Tr((H^T R^-1 H)^-1)."""
    return _run(noise, settings, h0, FomKind.A_TRACE)


def solve_d_optimal(
    noise: NoiseModel, settings: SolverSettings, h0: SensorConfiguration | None = None
) -> Solution:
    """Minimize the confidence-ellipsoid volume log det((H^T R^-1 H)^-1)."""
    return _run(noise, settings, h0, FomKind.D_LOG_DET)


def multi_start(noise: NoiseModel, settings: SolverSettings) -> Solution:
    """Run ``settings.restarts`` solves from distinct seeds; keep the best.

    Restart k uses seed ``settings.seed + k``. The final objectives of every
    restart are recorded on the returned Solution so their spread (max - min)
    is available; ties in objective break toward the earlier seed.
    """
    solutions = []
    for k in range(settings.restarts):
        solutions.append(solve(noise, replace(settings, seed=settings.seed + k)))
    best = min(enumerate(solutions), key=lambda item: (item[1].objective, item[0]))[1]
    finals = tuple(s.objective for s in solutions)
    return replace(best, restart_objectives=finals)
