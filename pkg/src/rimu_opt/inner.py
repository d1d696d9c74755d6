"""Inner solver: majorize-minimize over the 3x3 dual factor Q.

For one outer iterate H_t the dual problem is the unconstrained minimization
of gamma(Q) = 2 sum_i ||Q Q^T c_i|| + 2 Tr(Q^T V) - Tr(Q^T A Q), with
c_i the rows of C = R^-1 H_t and A = H_t^T R^-1 H_t. V is the identity for
the mean-squared-error objective; the log-det solver passes the symmetric
square root of its per-iteration weight instead, which carries the whole
derivation through unchanged (P = V - Q^T A below).

Each cycle freezes the majorizer (u, F, P) at the current Q and then runs
one row-major coordinate-descent pass of exact quartic minimizations. The
majorizer is refreshed once per full pass, not per coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rimu_opt import numerics
from rimu_opt._backend import kernels
from rimu_opt.errors import IndexOutOfRange, SingularInformation
from rimu_opt.model import NoiseModel, SensorConfiguration
from rimu_opt.quartic import QuarticPoly

U_CLAMP = 1e-12
DEFAULT_EPS_INNER = 1e-10
DEFAULT_MAX_SWEEPS = 500


@dataclass
class InnerState:
    """Working state of one inner solve; owned by a single solver run.

    C is m x 3 with rows c_i = (R^-1 H_t)_i; A = H_t^T R^-1 H_t; V is the
    3x3 symmetric PSD weight. u, F, P are the majorizer pieces frozen at the
    Q of the most recent refresh.
    """

    C: np.ndarray
    A: np.ndarray
    V: np.ndarray
    Q: np.ndarray
    u: np.ndarray
    F: np.ndarray
    P: np.ndarray


@dataclass(frozen=True)
class InnerResult:
    """Outcome of solve_inner: optimal factor, per-sweep objective, status."""

    Q: np.ndarray
    gammas: tuple[float, ...]
    sweeps: int
    converged: bool


def _as_c3(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=float))


def init_inner(
    config: SensorConfiguration,
    noise: NoiseModel,
    weight: np.ndarray | None = None,
    q0: np.ndarray | None = None,
) -> InnerState:
    """Build the inner state for one outer iterate.

    Q starts at the identity unless ``q0`` is given (warm starts use the
    previous outer iteration's optimum). The majorizer is refreshed
    immediately, with the weight clamp guarding ||Q Q^T c_i|| = 0.
    """
    c = _as_c3(noise.inverse @ config.axes)
    a = c.T @ config.axes
    a = _as_c3(0.5 * (a + a.T))
    if numerics.min_eigen_sym(a) < 1e-12:
        raise SingularInformation("information matrix is numerically singular")
    if weight is None:
        v = np.eye(3)
    else:
        v = numerics.require_symmetric(weight)
    v = _as_c3(v)
    if q0 is None:
        q = np.eye(3)
    else:
        q = np.array(q0, dtype=float)
        if q.shape != (3, 3):
            raise ValueError(f"Q0 must be 3x3, got {q.shape}")
    q = _as_c3(q)
    u, f, p = kernels.refresh(c, a, v, q, U_CLAMP)
    return InnerState(C=c, A=a, V=v, Q=q, u=u, F=_as_c3(f), P=_as_c3(p))


def refresh_majorizer(state: InnerState) -> InnerState:
    """Refreeze (u, F, P) at the current Q."""
    u, f, p = kernels.refresh(state.C, state.A, state.V, state.Q, U_CLAMP)
    state.u, state.F, state.P = u, _as_c3(f), _as_c3(p)
    return state


def inner_objective(state: InnerState) -> float:
    """gamma(Q) at the state's current Q."""
    return kernels.gamma_value(state.C, state.A, state.V, state.Q)


def majorized_objective(state: InnerState) -> float:
    """Frozen-majorizer objective Tr(F QQ^T QQ^T) + 2 Tr(Q P) at the current Q."""
    return kernels.majorized_objective(state.F, state.P, state.Q)


def gamma_surrogate(state: InnerState, q_probe: np.ndarray) -> float:
    """Value of the tangent surrogate of gamma, built at the state's frozen
    majorizer, evaluated at an arbitrary probe Q.

    Touches gamma at the Q the majorizer was refreshed at and upper-bounds it
    everywhere (the sqrt tangent plus the concave-trace linearization).
    """
    q_probe = _as_c3(q_probe)
    beta_sqrt = 0.0
    s = state.Q @ state.Q.T
    for i in range(state.C.shape[0]):
        w = s @ state.C[i]
        beta_sqrt += float(np.sqrt(w @ w))
    psi2_tau = 2.0 * float(np.sum(state.Q * state.V)) - float(
        np.trace(state.Q.T @ state.A @ state.Q)
    )
    const = beta_sqrt + psi2_tau - 2.0 * float(np.sum(state.Q.T * state.P))
    return const + kernels.majorized_objective(state.F, state.P, q_probe)


def quartic_coefficients(state: InnerState, i: int, j: int) -> QuarticPoly:
    """Quartic coefficients of the coordinate problem at 1-based (i, j).

    The polynomial satisfies r(q) = Tr(F ZZ^T ZZ^T) + 2 Tr(Z P) for
    Z = q e_i e_j^T + Q with entry (i, j) zeroed, with F and P frozen.
    """
    if not (1 <= i <= 3 and 1 <= j <= 3):
        raise IndexOutOfRange(f"coordinate indices must lie in 1..3, got ({i}, {j})")
    return QuarticPoly(*kernels.quartic_coeffs(state.F, state.P, state.Q, i - 1, j - 1))


def sweep(state: InnerState) -> InnerState:
    """One full row-major coordinate-descent pass updating every entry of Q.

    Uses the frozen majorizer (F, P); each of the nine updates is an exact
    quartic minimization, so the majorized objective never increases within
    the pass.
    """
    kernels.sweep(state.F, state.P, state.Q)
    return state


RESCUE_FLOOR_STAGES = (1e-1, 1e-3, 1e-6)


def solve_inner(
    state: InnerState,
    eps_inner: float = DEFAULT_EPS_INNER,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> InnerResult:
    """Iterate refresh/sweep cycles until the gamma decrease stalls.

    Stops when |gamma_prev - gamma| <= eps_inner * max(1, |gamma_prev|) or at
    ``max_sweeps`` cycles; hitting the cap is reported through the converged
    flag, not an exception. The state's Q is advanced to the optimum and its
    majorizer is refreshed there.

    The sqrt tangent bound behind the weights u_i degenerates as
    ||Q Q^T c_i|| -> 0: its curvature blows up and the sweep can stall far
    from the optimum on badly conditioned instances. When the plain
    iteration exhausts ``max_sweeps`` without converging, it is re-run with
    a graded sequence of larger weight floors (each stage caps the weights,
    a Huber-style smoothing of the norm terms) that walks the iterate off
    the kink, finishing with the exact tiny-clamp iteration. Each stage gets
    its own ``max_sweeps`` budget; ``sweeps`` reports the total and
    ``gammas`` the per-sweep objective of the final exact-clamp pass.
    """
    gammas, sweeps, converged = kernels.solve(
        state.C, state.A, state.V, state.Q, eps_inner, max_sweeps, U_CLAMP
    )
    if not converged:
        scale = float(np.max(np.sqrt((state.C * state.C).sum(axis=1))))
        for floor in RESCUE_FLOOR_STAGES:
            _, used, _ = kernels.solve(
                state.C, state.A, state.V, state.Q, eps_inner, max_sweeps,
                max(floor * scale, U_CLAMP),
            )
            sweeps += used
        gammas, used, converged = kernels.solve(
            state.C, state.A, state.V, state.Q, eps_inner, max_sweeps, U_CLAMP
        )
        sweeps += used
    refresh_majorizer(state)
    return InnerResult(Q=state.Q.copy(), gammas=tuple(gammas), sweeps=sweeps, converged=converged)
