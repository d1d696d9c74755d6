import numpy as np
import pytest

from conftest import random_spd
from rimu_opt import numerics
from rimu_opt.errors import NotPositiveDefinite, NotSymmetric


def frob(a):
    return float(np.sqrt((np.asarray(a) ** 2).sum()))


class TestCholesky:
    def test_identity(self):
        assert np.array_equal(numerics.cholesky(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        lower = numerics.cholesky(np.diag([4.0, 9.0, 16.0]))
        assert np.allclose(lower, np.diag([2.0, 3.0, 4.0]), rtol=0, atol=1e-15)

    def test_reconstruction_random(self, rng):
        for m in (3, 5, 12, 30):
            a = random_spd(m, rng)
            lower = numerics.cholesky(a)
            assert frob(lower @ lower.T - a) <= 1e-10 * frob(a)
            assert np.all(np.diagonal(lower) > 0)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            numerics.cholesky(np.diag([1.0, -1.0, 2.0]))

    def test_near_singular_pivot(self):
        a = np.diag([1.0, 1.0, 1e-16])
        with pytest.raises(NotPositiveDefinite):
            numerics.cholesky(a)

    def test_asymmetric_rejected(self):
        a = np.eye(3)
        a[0, 1] = 0.1
        with pytest.raises(NotSymmetric):
            numerics.cholesky(a)

    def test_small_asymmetry_absorbed(self):
        a = np.eye(3)
        a[0, 1] = 2e-11
        lower = numerics.cholesky(a)
        assert frob(lower @ lower.T - np.eye(3)) < 1e-10


class TestSpdInverse:
    def test_scaled_identity(self):
        assert np.allclose(numerics.spd_inverse(3.0 * np.eye(3)), np.eye(3) / 3.0, rtol=1e-14)

    def test_diagonal(self):
        inv = numerics.spd_inverse(np.diag([1.0, 2.0, 4.0]))
        assert np.allclose(inv, np.diag([1.0, 0.5, 0.25]), rtol=1e-14)

    def test_product_with_identity(self, rng):
        for m in (3, 7, 20):
            a = random_spd(m, rng)
            assert frob(a @ numerics.spd_inverse(a) - np.eye(m)) <= 1e-9

    def test_double_inverse_round_trip(self, rng):
        for _ in range(5):
            a = random_spd(4, rng)
            back = numerics.spd_inverse(numerics.spd_inverse(a))
            assert frob(back - a) <= 1e-8 * frob(a)


class TestLogDet:
    def test_identity_is_zero(self):
        assert numerics.logdet_spd(np.eye(3)) == 0.0

    def test_scaled_identity(self):
        assert numerics.logdet_spd(3.0 * np.eye(3)) == pytest.approx(3.0 * np.log(3.0), abs=1e-12)

    def test_diagonal(self):
        assert numerics.logdet_spd(np.diag([2.0, 3.0])) == pytest.approx(np.log(6.0), abs=1e-12)

    def test_logdet_of_inverse_cancels(self, rng):
        for m in (3, 6, 15):
            a = random_spd(m, rng)
            total = numerics.logdet_spd(a) + numerics.logdet_spd(numerics.spd_inverse(a))
            assert abs(total) <= 1e-8


class TestSymSqrt:
    def test_identity(self):
        assert np.allclose(numerics.sym_sqrt(np.eye(3)), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        root = numerics.sym_sqrt(np.diag([4.0, 9.0, 1.0]))
        assert np.allclose(root, np.diag([2.0, 3.0, 1.0]), atol=1e-13)

    def test_squaring_random(self, rng):
        for _ in range(10):
            a = random_spd(3, rng)
            root = numerics.sym_sqrt(a)
            assert frob(root @ root - a) <= 1e-9 * frob(a)
            assert frob(root - root.T) == 0.0

    def test_commutes_with_input(self, rng):
        for _ in range(10):
            a = random_spd(3, rng)
            root = numerics.sym_sqrt(a)
            assert frob(root @ a - a @ root) <= 1e-8

    def test_tiny_negative_eigenvalue_clamped(self):
        v, _ = np.linalg.qr(np.array([[1.0, 2.0, 0.5], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]]))
        a = v @ np.diag([2.0, 1.0, -1e-13]) @ v.T
        root = numerics.sym_sqrt(0.5 * (a + a.T))
        assert frob(root @ root - a) <= 1e-9

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            numerics.sym_sqrt(np.diag([1.0, 1.0, -1e-3]))

    def test_asymmetric_rejected(self):
        a = np.eye(3)
        a[2, 0] = 0.5
        with pytest.raises(NotSymmetric):
            numerics.sym_sqrt(a)


def characteristic_max_eigenvalue(a: np.ndarray) -> float:
    """Oracle: largest root of the characteristic cubic of a symmetric 3x3."""
    tr = float(np.trace(a))
    m2 = 0.5 * (tr * tr - float(np.trace(a @ a)))
    det = float(np.linalg.det(a))
    roots = np.roots([1.0, -tr, m2, -det])
    return float(np.max(roots.real))


class TestMaxEigen:
    def test_diagonal(self):
        assert numerics.max_eigen_sym(np.diag([1.0, 5.0, 2.0])) == pytest.approx(5.0, abs=1e-12)

    def test_identity(self):
        assert numerics.max_eigen_sym(np.eye(3)) == pytest.approx(1.0, abs=1e-14)

    def test_against_characteristic_cubic(self, rng):
        for _ in range(20):
            a = rng.standard_normal((3, 3))
            a = 0.5 * (a + a.T)
            got = numerics.max_eigen_sym(a)
            want = characteristic_max_eigenvalue(a)
            assert got == pytest.approx(want, rel=1e-10, abs=1e-10)

    def test_asymmetric_rejected(self):
        a = np.eye(3)
        a[1, 0] = 0.3
        with pytest.raises(NotSymmetric):
            numerics.max_eigen_sym(a)
