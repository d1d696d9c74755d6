"""Shared test helpers: random instances and independent oracles."""

from __future__ import annotations

import numpy as np
import pytest


def random_spd(m: int, rng: np.random.Generator, ridge: float = 0.5) -> np.ndarray:
    """Random symmetric positive-definite matrix M M^T + ridge I."""
    mat = rng.standard_normal((m, m))
    a = mat @ mat.T + ridge * np.eye(m)
    return 0.5 * (a + a.T)


def correlated_spd(m: int, rng: np.random.Generator, rho: float | None = None) -> np.ndarray:
    """Strongly correlated covariance D^(1/2) [(1-rho) I + rho 11^T] D^(1/2)."""
    if rho is None:
        rho = float(rng.uniform(0.6, 0.95))
    scales = rng.uniform(0.2, 4.0, size=m)
    corr = (1.0 - rho) * np.eye(m) + rho * np.ones((m, m))
    d = np.sqrt(scales)
    a = corr * np.outer(d, d)
    return 0.5 * (a + a.T)


def random_orthogonal(rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random 3x3 orthogonal matrix from a sign-fixed QR factorization."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    return q * np.sign(np.diagonal(r))


def random_unit_rows(m: int, rng: np.random.Generator) -> np.ndarray:
    rows = rng.standard_normal((m, 3))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def grid_polish_minimum(coeffs: np.ndarray, lo: float = -50.0, hi: float = 50.0, step: float = 1e-3) -> float:
    """Derivative-free oracle for the quartic minimum value.

    Coarse grid search with the given step, then two zoom refinements around
    the best cell. Independent of the analytic solver under test.
    """
    a, b, c, d, e = (float(v) for v in coeffs)

    def values(q: np.ndarray) -> np.ndarray:
        return (((a * q + b) * q + c) * q + d) * q + e

    grid = np.arange(lo, hi + step, step)
    best = grid[int(np.argmin(values(grid)))]
    width = step
    for _ in range(2):
        local = np.linspace(best - 2.0 * width, best + 2.0 * width, 4001)
        best = local[int(np.argmin(values(local)))]
        width = local[1] - local[0]
    return float(values(np.array([best]))[0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
