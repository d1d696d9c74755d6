"""Exact global minimization of bounded-below univariate quartics.

This is the innermost kernel of the coordinate-descent solver: each
coordinate update minimizes one quartic exactly by solving the derivative
cubic analytically (trigonometric branch for three real roots), polishing
each real critical point with a few Newton steps, and keeping the best.
"""

from __future__ import annotations

from dataclasses import dataclass

from rimu_opt._backend import kernels


@dataclass(frozen=True)
class QuarticPoly:
    """Coefficients of r(q) = a q^4 + b q^3 + c q^2 + d q + e."""

    a: float
    b: float
    c: float
    d: float
    e: float

    def __call__(self, q: float) -> float:
        return (((self.a * q + self.b) * q + self.c) * q + self.d) * q + self.e


def minimize_quartic(poly: QuarticPoly) -> tuple[float, float]:
    """Global minimizer q* and value r(q*) of a bounded-below quartic.

    Ties between equal-value global minimizers break toward the smaller q.
    Raises UnboundedBelow when no finite minimum exists (negative leading
    coefficient, a cubic term with no quartic term, a negative quadratic
    term, or a pure linear polynomial) and NonFiniteCoefficient for NaN or
    infinite coefficients.
    """
    return kernels.minimize_quartic(poly.a, poly.b, poly.c, poly.d, poly.e)
