"""Problem data model: sensor configurations, noise, figures of merit, WLS.

The design variable is an m x 3 matrix H whose rows are unit sensing axes;
measurements follow y = H x + eps with eps ~ N(0, R). The estimation error
covariance of the weighted least-squares estimate is C_e = (H^T R^-1 H)^-1,
and every figure of merit here is a scalar summary of C_e.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from rimu_opt import numerics
from rimu_opt.errors import (
    DimensionMismatch,
    InvalidConfiguration,
    NotOrthogonal,
    SingularInformation,
)

ROW_NORM_TOL = 1e-6
RANK_EIGEN_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True)
class SensorConfiguration:
    """m >= 3 unit sensing axes stacked as rows of an (m, 3) matrix.

    Rows within ``ROW_NORM_TOL`` of unit norm are renormalized on
    construction (absorbs file round-trip noise); anything farther off is
    rejected. Rank is deliberately not checked here: rank enters through the
    information matrix, whose operations raise SingularInformation.
    """

    axes: np.ndarray

    def __post_init__(self) -> None:
        axes = np.asarray(self.axes, dtype=float)
        if axes.ndim != 2 or axes.shape[1] != 3:
            raise InvalidConfiguration(f"expected an (m, 3) array, got shape {axes.shape}")
        if axes.shape[0] < 3:
            raise InvalidConfiguration(f"need at least 3 sensors, got {axes.shape[0]}")
        if not np.all(np.isfinite(axes)):
            raise InvalidConfiguration("axes contain non-finite entries")
        norms = np.sqrt((axes * axes).sum(axis=1))
        if np.any(np.abs(norms - 1.0) > ROW_NORM_TOL):
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise InvalidConfiguration(
                f"row {worst} has norm {norms[worst]:.9f}, farther than {ROW_NORM_TOL:.0e} from 1"
            )
        axes = axes / norms[:, None]
        axes.setflags(write=False)
        object.__setattr__(self, "axes", axes)

    @property
    def m(self) -> int:
        return self.axes.shape[0]

    def gram(self) -> np.ndarray:
        """H^T H, symmetrized."""
        g = self.axes.T @ self.axes
        return 0.5 * (g + g.T)


@dataclass(frozen=True)
class NoiseModel:
    """Measurement-noise covariance with cached Cholesky factor and inverse."""

    covariance: np.ndarray
    cholesky_factor: np.ndarray = field(repr=False)
    inverse: np.ndarray = field(repr=False)

    @classmethod
    def from_covariance(cls, r: np.ndarray) -> "NoiseModel":
        r = numerics.require_symmetric(r)
        lower = numerics.cholesky(r)
        inv = numerics.spd_inverse(r)
        for a in (r, lower, inv):
            a.setflags(write=False)
        return cls(covariance=r, cholesky_factor=lower, inverse=inv)

    @property
    def m(self) -> int:
        return self.covariance.shape[0]


class FomKind(enum.Enum):
    """Scalar figures of merit ranking configurations by the size of C_e."""

    A_TRACE = "a_trace"
    D_LOG_DET = "d_log_det"
    DETERMINANT = "determinant"
    GDOP = "gdop"
    MAX_EIGENVALUE = "max_eigenvalue"
    ELLIPSOID_VOLUME = "ellipsoid_volume"


def _check_dims(config: SensorConfiguration, noise: NoiseModel) -> None:
    if noise.m != config.m:
        raise DimensionMismatch(f"noise is {noise.m}x{noise.m} but configuration has {config.m} rows")


def information_matrix(config: SensorConfiguration, noise: NoiseModel) -> np.ndarray:
    """H^T R^-1 H, symmetric positive definite for full-rank H."""
    _check_dims(config, noise)
    h = config.axes
    g = h.T @ (noise.inverse @ h)
    g = 0.5 * (g + g.T)
    if numerics.min_eigen_sym(g) < RANK_EIGEN_TOL:
        raise SingularInformation("information matrix is numerically singular (configuration rank < 3)")
    return g


def error_covariance(config: SensorConfiguration, noise: NoiseModel) -> np.ndarray:
    """C_e = (H^T R^-1 H)^-1."""
    return numerics.spd_inverse(information_matrix(config, noise))


def _fom_from_information(g: np.ndarray, kind: FomKind, ellipsoid_k: float) -> float:
    if kind is FomKind.A_TRACE:
        return float(np.trace(numerics.spd_inverse(g)))
    if kind is FomKind.D_LOG_DET:
        return -numerics.logdet_spd(g)
    if kind is FomKind.DETERMINANT:
        return math.exp(-numerics.logdet_spd(g))
    if kind is FomKind.GDOP:
        return math.sqrt(float(np.trace(numerics.spd_inverse(g))))
    if kind is FomKind.MAX_EIGENVALUE:
        return numerics.max_eigen_sym(numerics.spd_inverse(g))
    if kind is FomKind.ELLIPSOID_VOLUME:
        if ellipsoid_k <= 0.0:
            raise ValueError("ellipsoid scale k must be positive")
        return (4.0 / 3.0) * ellipsoid_k**1.5 * math.pi * math.sqrt(math.exp(-numerics.logdet_spd(g)))
    raise ValueError(f"unknown figure of merit {kind!r}")


def evaluate_fom(
    config: SensorConfiguration,
    noise: NoiseModel,
    kind: FomKind,
    *,
    ellipsoid_k: float = 1.0,
) -> float:
    """Evaluate one figure of merit of the error covariance.

    The ellipsoid volume (4/3) k^(3/2) pi sqrt(det C_e) takes the contour
    scale ``k`` as a free parameter, defaulting to 1. The determinant is
    computed from the Cholesky factor of the information matrix as
    1/det(H^T R^-1 H) for numerical stability.
    """
    g = information_matrix(config, noise)
    return _fom_from_information(g, kind, ellipsoid_k)


def wls_estimate(config: SensorConfiguration, noise: NoiseModel, y: np.ndarray) -> np.ndarray:
    """Weighted least-squares estimate (H^T R^-1 H)^-1 H^T R^-1 y."""
    _check_dims(config, noise)
    y = np.asarray(y, dtype=float)
    if y.shape != (config.m,):
        raise DimensionMismatch(f"expected {config.m} measurements, got shape {y.shape}")
    g = information_matrix(config, noise)
    rhs = config.axes.T @ (noise.inverse @ y)
    return numerics.solve_spd(g, rhs)


def optimality_defect(config: SensorConfiguration) -> float:
    """Frobenius distance of H^T H from (m/3) I.

    Zero exactly when the equal-variance optimality condition
    H^T H = (m/3) I holds.
    """
    d = config.gram() - (config.m / 3.0) * np.eye(3)
    return float(np.sqrt((d * d).sum()))


def rotate_configuration(config: SensorConfiguration, rotation: np.ndarray) -> SensorConfiguration:
    """Apply one rotation C to every sensing axis: H -> H C^T.

    Every figure of merit is invariant under this map. Raises NotOrthogonal
    when ||C^T C - I||_F exceeds tolerance.
    """
    c = np.asarray(rotation, dtype=float)
    if c.shape != (3, 3):
        raise DimensionMismatch(f"rotation must be 3x3, got {c.shape}")
    gap = c.T @ c - np.eye(3)
    if math.sqrt(float((gap * gap).sum())) > ORTHOGONALITY_TOL:
        raise NotOrthogonal("matrix is not orthogonal within 1e-10")
    return SensorConfiguration(config.axes @ c.T)


__all__ = [
    "FomKind",
    "NoiseModel",
    "SensorConfiguration",
    "error_covariance",
    "evaluate_fom",
    "information_matrix",
    "optimality_defect",
    "rotate_configuration",
    "wls_estimate",
]
