import math

import numpy as np
import pytest

from conftest import grid_polish_minimum
from rimu_opt.errors import NonFiniteCoefficient, UnboundedBelow
from rimu_opt.quartic import QuarticPoly, minimize_quartic


def random_bounded_below(rng: np.random.Generator, n: int) -> np.ndarray:
    """Coefficient sets whose global minimizer stays well inside [-50, 50]."""
    coeffs = np.empty((n, 5))
    coeffs[:, 0] = rng.uniform(0.1, 2.0, size=n)
    coeffs[:, 1:] = rng.uniform(-5.0, 5.0, size=(n, 4))
    quad = rng.random(n) < 0.1
    coeffs[quad, 0] = 0.0
    coeffs[quad, 1] = 0.0
    coeffs[quad, 2] = rng.uniform(0.1, 3.0, size=int(quad.sum()))
    return coeffs


class TestExamples:
    def test_symmetric_double_well_tie_breaks_low(self):
        q, value = minimize_quartic(QuarticPoly(1.0, 0.0, -2.0, 0.0, 1.0))
        assert q == pytest.approx(-1.0, abs=1e-12)
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_quadratic_case(self):
        q, value = minimize_quartic(QuarticPoly(0.0, 0.0, 1.0, -2.0, 0.0))
        assert q == pytest.approx(1.0, abs=1e-14)
        assert value == pytest.approx(-1.0, abs=1e-14)

    def test_constant_polynomial(self):
        assert minimize_quartic(QuarticPoly(0.0, 0.0, 0.0, 0.0, 4.5)) == (0.0, 4.5)

    def test_pure_quartic(self):
        q, value = minimize_quartic(QuarticPoly(2.0, 0.0, 0.0, 0.0, 0.0))
        assert q == 0.0 and value == 0.0

    def test_grid_polish_oracle(self, rng):
        for coeffs in random_bounded_below(rng, 300):
            _, value = minimize_quartic(QuarticPoly(*coeffs))
            oracle = grid_polish_minimum(coeffs)
            assert value <= oracle + 1e-9
            assert abs(value - oracle) <= 1e-6 * max(1.0, abs(oracle))


class TestErrors:
    def test_cubic_unbounded(self):
        with pytest.raises(UnboundedBelow):
            minimize_quartic(QuarticPoly(0.0, 1.0, 0.0, 0.0, 0.0))

    def test_negative_leading_coefficient(self):
        with pytest.raises(UnboundedBelow):
            minimize_quartic(QuarticPoly(-1.0, 0.0, 0.0, 0.0, 0.0))

    def test_negative_quadratic(self):
        with pytest.raises(UnboundedBelow):
            minimize_quartic(QuarticPoly(0.0, 0.0, -1.0, 0.0, 0.0))

    def test_pure_linear(self):
        with pytest.raises(UnboundedBelow):
            minimize_quartic(QuarticPoly(0.0, 0.0, 0.0, 2.0, 0.0))

    def test_non_finite(self):
        with pytest.raises(NonFiniteCoefficient):
            minimize_quartic(QuarticPoly(1.0, math.nan, 0.0, 0.0, 0.0))
        with pytest.raises(NonFiniteCoefficient):
            minimize_quartic(QuarticPoly(1.0, 0.0, math.inf, 0.0, 0.0))


class TestInvariants:
    def test_local_and_sampled_global_minimality(self, rng):
        for coeffs in random_bounded_below(rng, 100):
            poly = QuarticPoly(*coeffs)
            q, value = minimize_quartic(poly)
            for delta in (1e-4, 1e-2, 1.0):
                assert value <= poly(q + delta) + 1e-9 * max(1.0, abs(value))
                assert value <= poly(q - delta) + 1e-9 * max(1.0, abs(value))

    def test_value_equals_direct_evaluation(self, rng):
        for coeffs in random_bounded_below(rng, 100):
            poly = QuarticPoly(*coeffs)
            q, value = minimize_quartic(poly)
            assert value == pytest.approx(poly(q), rel=1e-12, abs=1e-300)

    def test_positive_scaling_preserves_minimizer(self, rng):
        for coeffs in random_bounded_below(rng, 50):
            q0, v0 = minimize_quartic(QuarticPoly(*coeffs))
            for lam in (1e-3, 0.5, 7.0, 1e4):
                q1, v1 = minimize_quartic(QuarticPoly(*(lam * coeffs)))
                assert q1 == pytest.approx(q0, rel=1e-9, abs=1e-9)
                assert v1 == pytest.approx(lam * v0, rel=1e-9, abs=1e-9)

    def test_tiny_leading_coefficient_clamped(self):
        # |a| below 1e-12 relative to the rest behaves as a = 0.
        q, value = minimize_quartic(QuarticPoly(1e-14, 0.0, 1.0, -2.0, 0.0))
        assert q == pytest.approx(1.0, abs=1e-12)
        assert value == pytest.approx(-1.0, abs=1e-12)
