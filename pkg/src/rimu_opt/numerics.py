"""Small dense symmetric linear-algebra kernels.

Everything here is direct (Cholesky, cyclic Jacobi sweeps): the matrices are
3x3 up to a few dozen square, so determinism and simplicity beat asymptotics.
All functions are pure and accept/return float64 numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np

from rimu_opt.errors import DimensionMismatch, NotPositiveDefinite, NotSymmetric

SYMMETRY_TOL = 1e-10
PIVOT_REL_TOL = 1e-14
PSD_CLAMP_REL = 1e-12


def require_symmetric(a: np.ndarray, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Return the symmetrized copy of ``a``; reject asymmetry beyond ``tol``.

    Asymmetry below tolerance is absorbed by A <- (A + A^T)/2 so round-off
    does not propagate; anything larger raises NotSymmetric.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    gap = np.abs(a - a.T)
    ref = np.maximum(1.0, np.abs(a))
    if np.any(gap > tol * ref):
        worst = float(np.max(gap / ref))
        raise NotSymmetric(f"asymmetry {worst:.3e} exceeds tolerance {tol:.1e}")
    return 0.5 * (a + a.T)


def cholesky(a: np.ndarray) -> np.ndarray:
    """Lower-triangular L with A = L L^T.

    Raises NotPositiveDefinite when any pivot falls at or below
    ``PIVOT_REL_TOL`` times the largest diagonal entry.
    """
    a = require_symmetric(a)
    n = a.shape[0]
    max_diag = float(np.max(np.diagonal(a))) if n else 0.0
    if max_diag <= 0.0:
        raise NotPositiveDefinite("no positive diagonal entry")
    threshold = PIVOT_REL_TOL * max_diag
    lower = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - float(lower[j, :j] @ lower[j, :j])
        if pivot <= threshold:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at column {j} below threshold {threshold:.3e}")
        ljj = math.sqrt(pivot)
        lower[j, j] = ljj
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / ljj
    return lower


def _cho_solve(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve (L L^T) x = b by forward/back substitution."""
    n = lower.shape[0]
    b = np.asarray(b, dtype=float)
    vector = b.ndim == 1
    y = np.zeros((n, 1) if vector else b.shape, dtype=float)
    rhs = b.reshape(n, -1)
    for i in range(n):
        y[i] = (rhs[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    x = np.zeros_like(y)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - lower[i + 1 :, i] @ x[i + 1 :]) / lower[i, i]
    return x[:, 0] if vector else x


def solve_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for symmetric positive-definite A."""
    lower = cholesky(a)
    if lower.shape[0] != np.asarray(b).shape[0]:
        raise DimensionMismatch("right-hand side rows do not match matrix dimension")
    return _cho_solve(lower, b)


def spd_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive-definite matrix, symmetrized."""
    lower = cholesky(a)
    inv = _cho_solve(lower, np.eye(lower.shape[0]))
    return 0.5 * (inv + inv.T)


def logdet_spd(a: np.ndarray) -> float:
    """log det A computed as 2 * sum(log diag(L)) from the Cholesky factor."""
    lower = cholesky(a)
    return 2.0 * float(np.sum(np.log(np.diagonal(lower))))


def symmetric_eigen(a: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns (w, V) with A V = V diag(w); columns of V are orthonormal
    eigenvectors. ``a`` must already be symmetric (use require_symmetric).
    The sweep order is fixed, so results are deterministic.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = math.sqrt(float((a * a).sum()))
    if scale == 0.0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if math.sqrt(2.0 * off) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp, akq = a[k, p], a[k, q]
                    a[k, p] = a[p, k] = c * akp - s * akq
                    a[k, q] = a[q, k] = s * akp + c * akq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diagonal(a).copy(), v


def sym_sqrt(a: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root B with B B = A.

    Eigenvalues in (-PSD_CLAMP_REL * lambda_max, 0) are clamped to zero;
    more negative eigenvalues raise NotPositiveDefinite.
    """
    a = require_symmetric(a)
    w, v = symmetric_eigen(a)
    lam_max = max(float(np.max(w)), 0.0)
    floor = -PSD_CLAMP_REL * lam_max
    clamped = np.empty_like(w)
    for k, lam in enumerate(w):
        if lam < floor:
            raise NotPositiveDefinite(f"eigenvalue {lam:.3e} below PSD clamp floor {floor:.3e}")
        clamped[k] = math.sqrt(max(lam, 0.0))
    root = (v * clamped) @ v.T
    return 0.5 * (root + root.T)


def max_eigen_sym(a: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric matrix."""
    a = require_symmetric(a)
    w, _ = symmetric_eigen(a)
    return float(np.max(w))


def min_eigen_sym(a: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    a = require_symmetric(a)
    w, _ = symmetric_eigen(a)
    return float(np.min(w))
