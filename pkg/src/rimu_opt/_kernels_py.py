"""Pure-Python coordinate-descent kernels (fallback backend).

The compiled extension ``rimu_opt._kernels`` implements the same module
surface with identical arithmetic ordering; whichever is selected at import
time behaves the same. Hot loops here run on plain Python floats (lists),
which keeps the fallback usable when the extension is not built.

The inner problem minimized by ``solve`` is

    gamma(Q) = 2 sum_i ||Q Q^T c_i|| + 2 Tr(Q^T V) - Tr(Q^T A Q)

over the 3x3 dual factor Q, by alternating a majorization step (weights
u_i = 1 / max(||Q Q^T c_i||, delta), F = C^T diag(u) C, P = V - Q^T A) with
one cyclic pass of exact univariate quartic minimizations over the nine
entries of Q.
"""

from __future__ import annotations

import math

import numpy as np

from rimu_opt.errors import NonFiniteCoefficient, UnboundedBelow

A_CLAMP_REL = 1e-12
TIE_TOL = 1e-12
NEWTON_STEPS = 5


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _poly_value(a: float, b: float, c: float, d: float, e: float, q: float) -> float:
    return (((a * q + b) * q + c) * q + d) * q + e


def _derivative_roots(a: float, b: float, c: float, d: float) -> tuple[float, ...]:
    """Real roots of 4a q^3 + 3b q^2 + 2c q + d for a > 0 (1 or 3 roots)."""
    c3 = 4.0 * a
    bb = (3.0 * b) / c3
    cc = (2.0 * c) / c3
    dd = d / c3
    off = bb / 3.0
    p = cc - bb * bb / 3.0
    s = bb * (2.0 * bb * bb - 9.0 * cc) / 27.0 + dd
    half = 0.5 * s
    third = p / 3.0
    disc = half * half + third * third * third
    if disc > 0.0:
        sq = math.sqrt(disc)
        u = _cbrt(-half + sq)
        v = _cbrt(-half - sq)
        return (u + v - off,)
    if p == 0.0:
        # disc <= 0 with p == 0 forces s == 0: triple root.
        return (-off,)
    rp = math.sqrt(-third)
    arg = -half / (rp * rp * rp)
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    phi = math.acos(arg)
    two_pi = 2.0 * math.pi
    return (
        2.0 * rp * math.cos(phi / 3.0) - off,
        2.0 * rp * math.cos((phi - two_pi) / 3.0) - off,
        2.0 * rp * math.cos((phi + two_pi) / 3.0) - off,
    )


def _polish_root(a: float, b: float, c: float, d: float, q: float) -> float:
    """Up to NEWTON_STEPS Newton steps on the derivative cubic, keeping the best."""
    best_q = q
    best = abs(((4.0 * a * q + 3.0 * b) * q + 2.0 * c) * q + d)
    for _ in range(NEWTON_STEPS):
        slope = (12.0 * a * q + 6.0 * b) * q + 2.0 * c
        if slope == 0.0:
            break
        q = q - (((4.0 * a * q + 3.0 * b) * q + 2.0 * c) * q + d) / slope
        if not math.isfinite(q):
            break
        cur = abs(((4.0 * a * q + 3.0 * b) * q + 2.0 * c) * q + d)
        if cur < best:
            best = cur
            best_q = q
        if cur == 0.0:
            break
    return best_q


def minimize_quartic(a: float, b: float, c: float, d: float, e: float) -> tuple[float, float]:
    """Global minimizer and value of a q^4 + b q^3 + c q^2 + d q + e.

    The leading coefficient is clamped to zero when it is negligible against
    the remaining scale; the degenerate cascade quartic -> quadratic ->
    linear/constant is handled explicitly. Ties between equal-value global
    minimizers break toward the smaller q.
    """
    for v in (a, b, c, d, e):
        if not math.isfinite(v):
            raise NonFiniteCoefficient("polynomial coefficients must be finite")
    scale = max(abs(b), abs(c), abs(d), 1.0)
    if abs(a) <= A_CLAMP_REL * scale:
        a = 0.0
    if a < 0.0:
        raise UnboundedBelow("negative quartic coefficient")
    if a == 0.0:
        if b != 0.0:
            raise UnboundedBelow("cubic term with no quartic term")
        if c > 0.0:
            q = -d / (2.0 * c)
            return q, _poly_value(0.0, 0.0, c, d, e, q)
        if c < 0.0:
            raise UnboundedBelow("negative quadratic term")
        if d != 0.0:
            raise UnboundedBelow("pure linear polynomial")
        return 0.0, e
    candidates = [_polish_root(a, b, c, d, q) for q in _derivative_roots(a, b, c, d)]
    values = [_poly_value(a, b, c, d, e, q) for q in candidates]
    vmin = min(values)
    tie = TIE_TOL * max(1.0, abs(vmin))
    best_q = math.inf
    for q, val in zip(candidates, values):
        if val <= vmin + tie and q < best_q:
            best_q = q
    return best_q, _poly_value(a, b, c, d, e, best_q)


def _mat_mul3(x, y):
    out = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    for p in range(3):
        xp = x[p]
        op = out[p]
        for q in range(3):
            acc = 0.0
            for k in range(3):
                acc += xp[k] * y[k][q]
            op[q] = acc
    return out


def _tr_prod3(x, y):
    acc = 0.0
    for p in range(3):
        for q in range(3):
            acc += x[p][q] * y[q][p]
    return acc


def _coeffs(f, p_mat, q_mat, i: int, j: int, want_e: bool):
    """Quartic coefficients of the (i, j) coordinate problem (0-based).

    ``q_mat`` must already hold 0 at (i, j); builder matrices follow
    K = E_ij E_ji, L = Q0 E_ji + E_ij Q0^T, M = Q0 Q0^T.
    """
    lmat = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    for r in range(3):
        lmat[r][i] += q_mat[r][j]
        lmat[i][r] += q_mat[r][j]
    mmat = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    for r in range(3):
        qr = q_mat[r]
        mr = mmat[r]
        for s in range(3):
            qs = q_mat[s]
            acc = 0.0
            for k in range(3):
                acc += qr[k] * qs[k]
            mr[s] = acc
    a = f[i][i]
    # b = Tr(F (K L + L K)); K = e_i e_i^T picks row/column i.
    b = 0.0
    for r in range(3):
        b += f[r][i] * lmat[i][r] + f[i][r] * lmat[r][i]
    ll = _mat_mul3(lmat, lmat)
    c = 0.0
    for r in range(3):
        c += f[i][r] * mmat[r][i] + f[r][i] * mmat[i][r]
    c += _tr_prod3(f, ll)
    ml = _mat_mul3(mmat, lmat)
    lm = _mat_mul3(lmat, mmat)
    d = _tr_prod3(f, ml) + _tr_prod3(f, lm) + 2.0 * p_mat[j][i]
    if not want_e:
        return a, b, c, d, 0.0
    mm = _mat_mul3(mmat, mmat)
    e = _tr_prod3(f, mm) + 2.0 * _tr_prod3(q_mat, p_mat)
    return a, b, c, d, e


def quartic_coeffs(f, p_mat, q_mat, i: int, j: int) -> tuple[float, float, float, float, float]:
    """Coefficients (a, b, c, d, e) of the coordinate problem at 0-based (i, j)."""
    if not (0 <= i <= 2 and 0 <= j <= 2):
        raise IndexError(f"kernel coordinate indices must lie in 0..2, got ({i}, {j})")
    f = np.asarray(f, dtype=float).tolist()
    p_mat = np.asarray(p_mat, dtype=float).tolist()
    q0 = np.asarray(q_mat, dtype=float).tolist()
    q0[i][j] = 0.0
    return _coeffs(f, p_mat, q0, i, j, True)


def _sweep_lists(f, p_mat, q_mat) -> None:
    for i in range(3):
        for j in range(3):
            q_mat[i][j] = 0.0
            a, b, c, d, _ = _coeffs(f, p_mat, q_mat, i, j, False)
            q_mat[i][j] = minimize_quartic(a, b, c, d, 0.0)[0]


def sweep(f, p_mat, q_mat: np.ndarray) -> None:
    """One row-major coordinate-descent pass over the nine entries of Q, in place."""
    f_l = np.asarray(f, dtype=float).tolist()
    p_l = np.asarray(p_mat, dtype=float).tolist()
    q_l = q_mat.tolist()
    _sweep_lists(f_l, p_l, q_l)
    q_mat[:, :] = q_l


def _refresh_lists(c_rows, a_mat, v_mat, q_mat, u_clamp):
    s_mat = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    for p in range(3):
        qp = q_mat[p]
        for r in range(3):
            qr = q_mat[r]
            acc = 0.0
            for k in range(3):
                acc += qp[k] * qr[k]
            s_mat[p][r] = acc
    u = []
    f = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    for ci in c_rows:
        w0 = s_mat[0][0] * ci[0] + s_mat[0][1] * ci[1] + s_mat[0][2] * ci[2]
        w1 = s_mat[1][0] * ci[0] + s_mat[1][1] * ci[1] + s_mat[1][2] * ci[2]
        w2 = s_mat[2][0] * ci[0] + s_mat[2][1] * ci[1] + s_mat[2][2] * ci[2]
        nrm = math.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
        if nrm < u_clamp:
            nrm = u_clamp
        ui = 1.0 / nrm
        u.append(ui)
        for p in range(3):
            cip = ui * ci[p]
            fp = f[p]
            for r in range(3):
                fp[r] += cip * ci[r]
    p_out = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    for p in range(3):
        pp = p_out[p]
        for r in range(3):
            acc = 0.0
            for k in range(3):
                acc += q_mat[k][p] * a_mat[k][r]
            pp[r] = v_mat[p][r] - acc
    return u, f, p_out


def refresh(c, a_mat, v_mat, q_mat, u_clamp: float):
    """Majorizer pieces at the current Q: weights u, F = C^T diag(u) C, P = V - Q^T A."""
    u, f, p_out = _refresh_lists(
        np.asarray(c, dtype=float).tolist(),
        np.asarray(a_mat, dtype=float).tolist(),
        np.asarray(v_mat, dtype=float).tolist(),
        np.asarray(q_mat, dtype=float).tolist(),
        u_clamp,
    )
    return np.array(u), np.array(f), np.array(p_out)


def _gamma_lists(c_rows, a_mat, v_mat, q_mat) -> float:
    s_mat = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    for p in range(3):
        qp = q_mat[p]
        for r in range(3):
            qr = q_mat[r]
            acc = 0.0
            for k in range(3):
                acc += qp[k] * qr[k]
            s_mat[p][r] = acc
    norm_sum = 0.0
    for ci in c_rows:
        w0 = s_mat[0][0] * ci[0] + s_mat[0][1] * ci[1] + s_mat[0][2] * ci[2]
        w1 = s_mat[1][0] * ci[0] + s_mat[1][1] * ci[1] + s_mat[1][2] * ci[2]
        w2 = s_mat[2][0] * ci[0] + s_mat[2][1] * ci[1] + s_mat[2][2] * ci[2]
        norm_sum += math.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
    lin = 0.0
    for p in range(3):
        for r in range(3):
            lin += q_mat[p][r] * v_mat[p][r]
    quad = 0.0
    for p in range(3):
        for r in range(3):
            apr = a_mat[p][r]
            for k in range(3):
                quad += q_mat[p][k] * apr * q_mat[r][k]
    return 2.0 * norm_sum + 2.0 * lin - quad


def gamma_value(c, a_mat, v_mat, q_mat) -> float:
    """Inner objective gamma(Q) = 2 sum ||QQ^T c_i|| + 2 Tr(Q^T V) - Tr(Q^T A Q)."""
    return _gamma_lists(
        np.asarray(c, dtype=float).tolist(),
        np.asarray(a_mat, dtype=float).tolist(),
        np.asarray(v_mat, dtype=float).tolist(),
        np.asarray(q_mat, dtype=float).tolist(),
    )


def majorized_objective(f, p_mat, q_mat) -> float:
    """Frozen-majorizer objective Tr(F QQ^T QQ^T) + 2 Tr(Q P)."""
    f = np.asarray(f, dtype=float).tolist()
    p_l = np.asarray(p_mat, dtype=float).tolist()
    q_l = np.asarray(q_mat, dtype=float).tolist()
    q_t = [[q_l[p][r] for p in range(3)] for r in range(3)]
    s_mat = _mat_mul3(q_l, q_t)
    ss = _mat_mul3(s_mat, s_mat)
    return _tr_prod3(f, ss) + 2.0 * _tr_prod3(q_l, p_l)


def solve(
    c,
    a_mat,
    v_mat,
    q_mat: np.ndarray,
    eps_inner: float,
    max_sweeps: int,
    u_clamp: float,
) -> tuple[list[float], int, bool]:
    """Alternate majorize/sweep until the gamma decrease is below tolerance.

    Q is updated in place; returns (per-sweep gamma values starting at
    gamma(Q0), sweeps used, converged flag).
    """
    c_rows = np.asarray(c, dtype=float).tolist()
    a_l = np.asarray(a_mat, dtype=float).tolist()
    v_l = np.asarray(v_mat, dtype=float).tolist()
    q_l = q_mat.tolist()
    g_prev = _gamma_lists(c_rows, a_l, v_l, q_l)
    gammas = [g_prev]
    converged = False
    sweeps = 0
    for _ in range(max_sweeps):
        _, f_l, p_l = _refresh_lists(c_rows, a_l, v_l, q_l, u_clamp)
        _sweep_lists(f_l, p_l, q_l)
        g = _gamma_lists(c_rows, a_l, v_l, q_l)
        gammas.append(g)
        sweeps += 1
        if abs(g_prev - g) <= eps_inner * max(1.0, abs(g_prev)):
            converged = True
            break
        g_prev = g
    q_mat[:, :] = q_l
    return gammas, sweeps, converged
