"""Monte-Carlo validation of the estimation-theoretic model.

Simulates correlated Gaussian sensor noise through the Cholesky factor of R,
runs the weighted least-squares estimator on every sample, and compares the
empirical covariance of the estimation error against the predicted
C_e = (H^T R^-1 H)^-1.

Sampling is chunked with per-chunk seeds spawned from one SeedSequence, so
results are bit-identical however the chunks are consumed, and the seed is
recorded in the report.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from rimu_opt.model import NoiseModel, SensorConfiguration, error_covariance

CHUNK = 4096


@dataclass(frozen=True)
class MonteCarloReport:
    """Empirical vs predicted error covariance over one simulation run."""

    samples: int
    seed: int
    empirical_cov: np.ndarray
    predicted_cov: np.ndarray
    relative_frobenius_error: float
    empirical_mean_error: np.ndarray


def _noise_chunks(m: int, cholesky_factor: np.ndarray, count: int, seed: int) -> Iterator[np.ndarray]:
    n_chunks = (count + CHUNK - 1) // CHUNK
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    produced = 0
    for child in children:
        size = min(CHUNK, count - produced)
        rng = np.random.default_rng(child)
        z = rng.standard_normal((size, m))
        yield z @ cholesky_factor.T
        produced += size


def simulate_measurements(
    config: SensorConfiguration,
    noise: NoiseModel,
    x: np.ndarray,
    count: int,
    seed: int,
) -> Iterator[np.ndarray]:
    """Yield ``count`` measurement vectors y = H x + L z, deterministic in seed."""
    if count < 1:
        raise ValueError("count must be at least 1")
    x = np.asarray(x, dtype=float)
    base = config.axes @ x
    for eps in _noise_chunks(config.m, noise.cholesky_factor, count, seed):
        for row in base + eps:
            yield row


def verify_covariance(
    config: SensorConfiguration,
    noise: NoiseModel,
    x: np.ndarray,
    count: int,
    seed: int,
) -> MonteCarloReport:
    """Empirical covariance of the WLS error x_hat - x over ``count`` trials.

    Requires at least 1000 samples. The estimator is applied to every
    simulated measurement vector; the error distribution does not depend on
    the true x, and its mean shrinks at the usual 1/sqrt(count) rate.
    """
    if count < 1000:
        raise ValueError("minimum 1000 samples")
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError(f"true state must be a 3-vector, got shape {x.shape}")
    predicted = error_covariance(config, noise)
    # WLS as one 3 x m map: x_hat = K y with K = C_e H^T R^-1.
    k_map = predicted @ config.axes.T @ noise.inverse
    base = config.axes @ x
    err_sum = np.zeros(3)
    outer_sum = np.zeros((3, 3))
    for eps in _noise_chunks(config.m, noise.cholesky_factor, count, seed):
        errors = (base + eps) @ k_map.T - x
        err_sum += errors.sum(axis=0)
        outer_sum += errors.T @ errors
    mean = err_sum / count
    empirical = (outer_sum - count * np.outer(mean, mean)) / (count - 1)
    empirical = 0.5 * (empirical + empirical.T)
    gap = empirical - predicted
    rel = float(np.sqrt((gap * gap).sum()) / np.sqrt((predicted * predicted).sum()))
    return MonteCarloReport(
        samples=count,
        seed=seed,
        empirical_cov=empirical,
        predicted_cov=predicted,
        relative_frobenius_error=rel,
        empirical_mean_error=mean,
    )
