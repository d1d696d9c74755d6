"""Optimal orientation of redundant single-axis inertial sensors.

Given m >= 3 single-axis accelerometers or gyros whose measurement noise has
an arbitrary positive-definite covariance, this package computes sensing-axis
configurations minimizing either the trace or the log-determinant of the
weighted least-squares error covariance, verifies them against closed-form
reference geometries, and validates the underlying estimation model by
Monte-Carlo simulation.
"""

__version__ = "0.1.0"

from rimu_opt._backend import kernel_backend
from rimu_opt.errors import (
    DegenerateDirection,
    DegenerateInit,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidConfiguration,
    InvalidSensorCount,
    NonFiniteCoefficient,
    NotOrthogonal,
    NotPositiveDefinite,
    NotSymmetric,
    RimuOptError,
    SingularInformation,
    SurrogateIndefinite,
    UnboundedBelow,
)
from rimu_opt.model import (
    FomKind,
    NoiseModel,
    SensorConfiguration,
    error_covariance,
    evaluate_fom,
    information_matrix,
    optimality_defect,
    rotate_configuration,
    wls_estimate,
)
from rimu_opt.montecarlo import MonteCarloReport, simulate_measurements, verify_covariance
from rimu_opt.quartic import QuarticPoly, minimize_quartic
from rimu_opt.references import (
    PlatonicSolid,
    ReferenceComparison,
    build_reference,
    class_one_cone,
    class_two_cone,
    compare_against_reference,
    orthogonal_triad,
    platonic_axes,
)
from rimu_opt.solver import (
    ConvergenceTrace,
    Solution,
    SolverSettings,
    TraceRecord,
    multi_start,
    random_configuration,
    solve,
    solve_a_optimal,
    solve_d_optimal,
    surrogate_value,
    update_H,
)

__all__ = [
    "ConvergenceTrace",
    "DegenerateDirection",
    "DegenerateInit",
    "DimensionMismatch",
    "FomKind",
    "IndexOutOfRange",
    "InvalidConfiguration",
    "InvalidSensorCount",
    "MonteCarloReport",
    "NoiseModel",
    "NonFiniteCoefficient",
    "NotOrthogonal",
    "NotPositiveDefinite",
    "NotSymmetric",
    "PlatonicSolid",
    "QuarticPoly",
    "ReferenceComparison",
    "RimuOptError",
    "SensorConfiguration",
    "SingularInformation",
    "Solution",
    "SolverSettings",
    "SurrogateIndefinite",
    "TraceRecord",
    "UnboundedBelow",
    "build_reference",
    "class_one_cone",
    "class_two_cone",
    "compare_against_reference",
    "error_covariance",
    "evaluate_fom",
    "information_matrix",
    "kernel_backend",
    "minimize_quartic",
    "multi_start",
    "optimality_defect",
    "orthogonal_triad",
    "platonic_axes",
    "random_configuration",
    "rotate_configuration",
    "simulate_measurements",
    "solve",
    "solve_a_optimal",
    "solve_d_optimal",
    "surrogate_value",
    "update_H",
    "verify_covariance",
    "wls_estimate",
]
