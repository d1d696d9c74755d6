# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled coordinate-descent kernels.

Twin of ``rimu_opt._kernels_py`` with identical arithmetic ordering; the two
backends produce matching iterates. See the pure-Python module for the
algorithm description.
"""

from libc.math cimport INFINITY, M_PI, acos, copysign, cos, fabs, isfinite, pow, sqrt
from libc.stdlib cimport free, malloc

import numpy as np

from rimu_opt.errors import NonFiniteCoefficient, UnboundedBelow

cdef double A_CLAMP_REL = 1e-12
cdef double TIE_TOL = 1e-12
cdef int NEWTON_STEPS = 5


cdef inline double _cbrt(double x) noexcept nogil:
    return copysign(pow(fabs(x), 1.0 / 3.0), x)


cdef inline double _poly_value(double a, double b, double c, double d, double e, double q) noexcept nogil:
    return (((a * q + b) * q + c) * q + d) * q + e


cdef int _derivative_roots(double a, double b, double c, double d, double* roots) noexcept nogil:
    cdef double c3 = 4.0 * a
    cdef double bb = (3.0 * b) / c3
    cdef double cc = (2.0 * c) / c3
    cdef double dd = d / c3
    cdef double off = bb / 3.0
    cdef double p = cc - bb * bb / 3.0
    cdef double s = bb * (2.0 * bb * bb - 9.0 * cc) / 27.0 + dd
    cdef double half = 0.5 * s
    cdef double third = p / 3.0
    cdef double disc = half * half + third * third * third
    cdef double sq, u, v, rp, arg, phi, two_pi
    if disc > 0.0:
        sq = sqrt(disc)
        u = _cbrt(-half + sq)
        v = _cbrt(-half - sq)
        roots[0] = u + v - off
        return 1
    if p == 0.0:
        # disc <= 0 with p == 0 forces s == 0: triple root.
        roots[0] = -off
        return 1
    rp = sqrt(-third)
    arg = -half / (rp * rp * rp)
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    phi = acos(arg)
    two_pi = 2.0 * M_PI
    roots[0] = 2.0 * rp * cos(phi / 3.0) - off
    roots[1] = 2.0 * rp * cos((phi - two_pi) / 3.0) - off
    roots[2] = 2.0 * rp * cos((phi + two_pi) / 3.0) - off
    return 3


cdef double _polish_root(double a, double b, double c, double d, double q) noexcept nogil:
    cdef double best_q = q
    cdef double best = fabs(((4.0 * a * q + 3.0 * b) * q + 2.0 * c) * q + d)
    cdef double slope, cur
    cdef int it
    for it in range(NEWTON_STEPS):
        slope = (12.0 * a * q + 6.0 * b) * q + 2.0 * c
        if slope == 0.0:
            break
        q = q - (((4.0 * a * q + 3.0 * b) * q + 2.0 * c) * q + d) / slope
        if not isfinite(q):
            break
        cur = fabs(((4.0 * a * q + 3.0 * b) * q + 2.0 * c) * q + d)
        if cur < best:
            best = cur
            best_q = q
        if cur == 0.0:
            break
    return best_q


cdef int _minimize(double a, double b, double c, double d, double e,
                   double* out_q, double* out_val) noexcept nogil:
    """Status codes: 0 ok, 1 non-finite, 2..5 unbounded-below variants."""
    cdef double roots[3]
    cdef double cands[3]
    cdef double vals[3]
    cdef double scale, q, vmin, tie, best_q
    cdef int n, k
    if not (isfinite(a) and isfinite(b) and isfinite(c) and isfinite(d) and isfinite(e)):
        return 1
    scale = fabs(b)
    if fabs(c) > scale:
        scale = fabs(c)
    if fabs(d) > scale:
        scale = fabs(d)
    if scale < 1.0:
        scale = 1.0
    if fabs(a) <= A_CLAMP_REL * scale:
        a = 0.0
    if a < 0.0:
        return 2
    if a == 0.0:
        if b != 0.0:
            return 3
        if c > 0.0:
            q = -d / (2.0 * c)
            out_q[0] = q
            out_val[0] = _poly_value(0.0, 0.0, c, d, e, q)
            return 0
        if c < 0.0:
            return 4
        if d != 0.0:
            return 5
        out_q[0] = 0.0
        out_val[0] = e
        return 0
    n = _derivative_roots(a, b, c, d, roots)
    vmin = INFINITY
    for k in range(n):
        cands[k] = _polish_root(a, b, c, d, roots[k])
        vals[k] = _poly_value(a, b, c, d, e, cands[k])
        if vals[k] < vmin:
            vmin = vals[k]
    tie = TIE_TOL * (fabs(vmin) if fabs(vmin) > 1.0 else 1.0)
    best_q = INFINITY
    for k in range(n):
        if vals[k] <= vmin + tie and cands[k] < best_q:
            best_q = cands[k]
    out_q[0] = best_q
    out_val[0] = _poly_value(a, b, c, d, e, best_q)
    return 0


cdef int _raise_for(int status) except -1:
    if status == 1:
        raise NonFiniteCoefficient("polynomial coefficients must be finite")
    if status == 2:
        raise UnboundedBelow("negative quartic coefficient")
    if status == 3:
        raise UnboundedBelow("cubic term with no quartic term")
    if status == 4:
        raise UnboundedBelow("negative quadratic term")
    if status == 5:
        raise UnboundedBelow("pure linear polynomial")
    return 0


def minimize_quartic(double a, double b, double c, double d, double e):
    """Global minimizer and value of a bounded-below quartic (see fallback twin)."""
    cdef double q, val
    cdef int status = _minimize(a, b, c, d, e, &q, &val)
    if status != 0:
        _raise_for(status)
    return q, val


cdef void _mat_mul3(double* x, double* y, double* out) noexcept nogil:
    cdef int p, q, k
    cdef double acc
    for p in range(3):
        for q in range(3):
            acc = 0.0
            for k in range(3):
                acc += x[p * 3 + k] * y[k * 3 + q]
            out[p * 3 + q] = acc


cdef double _tr_prod3(double* x, double* y) noexcept nogil:
    cdef int p, q
    cdef double acc = 0.0
    for p in range(3):
        for q in range(3):
            acc += x[p * 3 + q] * y[q * 3 + p]
    return acc


cdef void _coeffs(double* f, double* p_mat, double* q_mat, int i, int j,
                  bint want_e, double* out) noexcept nogil:
    """Quartic coefficients at 0-based (i, j); q_mat must hold 0 at (i, j)."""
    cdef double lmat[9]
    cdef double mmat[9]
    cdef double ll[9]
    cdef double ml[9]
    cdef double lm[9]
    cdef double mm[9]
    cdef int r, s, k
    cdef double acc, a, b, c, d, e
    for r in range(9):
        lmat[r] = 0.0
    for r in range(3):
        lmat[r * 3 + i] += q_mat[r * 3 + j]
        lmat[i * 3 + r] += q_mat[r * 3 + j]
    for r in range(3):
        for s in range(3):
            acc = 0.0
            for k in range(3):
                acc += q_mat[r * 3 + k] * q_mat[s * 3 + k]
            mmat[r * 3 + s] = acc
    a = f[i * 3 + i]
    b = 0.0
    for r in range(3):
        b += f[r * 3 + i] * lmat[i * 3 + r] + f[i * 3 + r] * lmat[r * 3 + i]
    _mat_mul3(lmat, lmat, ll)
    c = 0.0
    for r in range(3):
        c += f[i * 3 + r] * mmat[r * 3 + i] + f[r * 3 + i] * mmat[i * 3 + r]
    c += _tr_prod3(f, ll)
    _mat_mul3(mmat, lmat, ml)
    _mat_mul3(lmat, mmat, lm)
    d = _tr_prod3(f, ml) + _tr_prod3(f, lm) + 2.0 * p_mat[j * 3 + i]
    out[0] = a
    out[1] = b
    out[2] = c
    out[3] = d
    if want_e:
        _mat_mul3(mmat, mmat, mm)
        e = _tr_prod3(f, mm) + 2.0 * _tr_prod3(q_mat, p_mat)
        out[4] = e
    else:
        out[4] = 0.0


cdef int _sweep(double* f, double* p_mat, double* q_mat) noexcept nogil:
    cdef double coeffs[5]
    cdef double q, val
    cdef int i, j, status
    for i in range(3):
        for j in range(3):
            q_mat[i * 3 + j] = 0.0
            _coeffs(f, p_mat, q_mat, i, j, 0, coeffs)
            status = _minimize(coeffs[0], coeffs[1], coeffs[2], coeffs[3], 0.0, &q, &val)
            if status != 0:
                return status
            q_mat[i * 3 + j] = q
    return 0


cdef void _refresh(double* c_rows, int m, double* a_mat, double* v_mat, double* q_mat,
                   double u_clamp, double* u, double* f, double* p_out) noexcept nogil:
    cdef double s_mat[9]
    cdef int p, r, k, i
    cdef double acc, w0, w1, w2, nrm, ui, cip
    for p in range(3):
        for r in range(3):
            acc = 0.0
            for k in range(3):
                acc += q_mat[p * 3 + k] * q_mat[r * 3 + k]
            s_mat[p * 3 + r] = acc
    for p in range(9):
        f[p] = 0.0
    for i in range(m):
        w0 = s_mat[0] * c_rows[i * 3 + 0] + s_mat[1] * c_rows[i * 3 + 1] + s_mat[2] * c_rows[i * 3 + 2]
        w1 = s_mat[3] * c_rows[i * 3 + 0] + s_mat[4] * c_rows[i * 3 + 1] + s_mat[5] * c_rows[i * 3 + 2]
        w2 = s_mat[6] * c_rows[i * 3 + 0] + s_mat[7] * c_rows[i * 3 + 1] + s_mat[8] * c_rows[i * 3 + 2]
        nrm = sqrt(w0 * w0 + w1 * w1 + w2 * w2)
        if nrm < u_clamp:
            nrm = u_clamp
        ui = 1.0 / nrm
        u[i] = ui
        for p in range(3):
            cip = ui * c_rows[i * 3 + p]
            for r in range(3):
                f[p * 3 + r] += cip * c_rows[i * 3 + r]
    for p in range(3):
        for r in range(3):
            acc = 0.0
            for k in range(3):
                acc += q_mat[k * 3 + p] * a_mat[k * 3 + r]
            p_out[p * 3 + r] = v_mat[p * 3 + r] - acc


cdef double _gamma(double* c_rows, int m, double* a_mat, double* v_mat, double* q_mat) noexcept nogil:
    cdef double s_mat[9]
    cdef int p, r, k, i
    cdef double acc, w0, w1, w2, norm_sum, lin, quad, apr
    for p in range(3):
        for r in range(3):
            acc = 0.0
            for k in range(3):
                acc += q_mat[p * 3 + k] * q_mat[r * 3 + k]
            s_mat[p * 3 + r] = acc
    norm_sum = 0.0
    for i in range(m):
        w0 = s_mat[0] * c_rows[i * 3 + 0] + s_mat[1] * c_rows[i * 3 + 1] + s_mat[2] * c_rows[i * 3 + 2]
        w1 = s_mat[3] * c_rows[i * 3 + 0] + s_mat[4] * c_rows[i * 3 + 1] + s_mat[5] * c_rows[i * 3 + 2]
        w2 = s_mat[6] * c_rows[i * 3 + 0] + s_mat[7] * c_rows[i * 3 + 1] + s_mat[8] * c_rows[i * 3 + 2]
        norm_sum += sqrt(w0 * w0 + w1 * w1 + w2 * w2)
    lin = 0.0
    for p in range(3):
        for r in range(3):
            lin += q_mat[p * 3 + r] * v_mat[p * 3 + r]
    quad = 0.0
    for p in range(3):
        for r in range(3):
            apr = a_mat[p * 3 + r]
            for k in range(3):
                quad += q_mat[p * 3 + k] * apr * q_mat[r * 3 + k]
    return 2.0 * norm_sum + 2.0 * lin - quad


cdef _as_c(arr):
    return np.ascontiguousarray(np.asarray(arr, dtype=np.float64))


def quartic_coeffs(f, p_mat, q_mat, int i, int j):
    """Coefficients (a, b, c, d, e) of the coordinate problem at 0-based (i, j)."""
    if i < 0 or i > 2 or j < 0 or j > 2:
        raise IndexError(f"kernel coordinate indices must lie in 0..2, got ({i}, {j})")
    cdef double[:, ::1] f_mv = _as_c(f)
    cdef double[:, ::1] p_mv = _as_c(p_mat)
    q0 = np.array(q_mat, dtype=np.float64, order="C")
    q0[i, j] = 0.0
    cdef double[:, ::1] q_mv = q0
    cdef double out[5]
    _coeffs(&f_mv[0, 0], &p_mv[0, 0], &q_mv[0, 0], i, j, 1, out)
    return out[0], out[1], out[2], out[3], out[4]


def sweep(f, p_mat, q_mat):
    """One row-major coordinate-descent pass over the nine entries of Q, in place."""
    cdef double[:, ::1] f_mv = _as_c(f)
    cdef double[:, ::1] p_mv = _as_c(p_mat)
    cdef double[:, ::1] q_mv = q_mat
    cdef int status = _sweep(&f_mv[0, 0], &p_mv[0, 0], &q_mv[0, 0])
    if status != 0:
        _raise_for(status)


def refresh(c, a_mat, v_mat, q_mat, double u_clamp):
    """Majorizer pieces at the current Q: weights u, F = C^T diag(u) C, P = V - Q^T A."""
    cdef double[:, ::1] c_mv = _as_c(c)
    cdef double[:, ::1] a_mv = _as_c(a_mat)
    cdef double[:, ::1] v_mv = _as_c(v_mat)
    cdef double[:, ::1] q_mv = _as_c(q_mat)
    cdef int m = c_mv.shape[0]
    u_arr = np.empty(m, dtype=np.float64)
    f_arr = np.empty((3, 3), dtype=np.float64)
    p_arr = np.empty((3, 3), dtype=np.float64)
    cdef double[::1] u_mv = u_arr
    cdef double[:, ::1] f_mv = f_arr
    cdef double[:, ::1] p_mv = p_arr
    _refresh(&c_mv[0, 0], m, &a_mv[0, 0], &v_mv[0, 0], &q_mv[0, 0], u_clamp,
             &u_mv[0], &f_mv[0, 0], &p_mv[0, 0])
    return u_arr, f_arr, p_arr


def gamma_value(c, a_mat, v_mat, q_mat):
    """Inner objective gamma(Q) = 2 sum ||QQ^T c_i|| + 2 Tr(Q^T V) - Tr(Q^T A Q)."""
    cdef double[:, ::1] c_mv = _as_c(c)
    cdef double[:, ::1] a_mv = _as_c(a_mat)
    cdef double[:, ::1] v_mv = _as_c(v_mat)
    cdef double[:, ::1] q_mv = _as_c(q_mat)
    return _gamma(&c_mv[0, 0], c_mv.shape[0], &a_mv[0, 0], &v_mv[0, 0], &q_mv[0, 0])


def majorized_objective(f, p_mat, q_mat):
    """Frozen-majorizer objective Tr(F QQ^T QQ^T) + 2 Tr(Q P)."""
    cdef double[:, ::1] f_mv = _as_c(f)
    cdef double[:, ::1] p_mv = _as_c(p_mat)
    cdef double[:, ::1] q_mv = _as_c(q_mat)
    cdef double qt[9]
    cdef double s_mat[9]
    cdef double ss[9]
    cdef int p, r
    for r in range(3):
        for p in range(3):
            qt[r * 3 + p] = q_mv[p, r]
    _mat_mul3(&q_mv[0, 0], qt, s_mat)
    _mat_mul3(s_mat, s_mat, ss)
    return _tr_prod3(&f_mv[0, 0], ss) + 2.0 * _tr_prod3(&q_mv[0, 0], &p_mv[0, 0])


def solve(c, a_mat, v_mat, q_mat, double eps_inner, int max_sweeps, double u_clamp):
    """Alternate majorize/sweep cycles until the gamma decrease is below tolerance.

    Q is updated in place; returns (per-sweep gamma values starting at
    gamma(Q0), sweeps used, converged flag).
    """
    cdef double[:, ::1] c_mv = _as_c(c)
    cdef double[:, ::1] a_mv = _as_c(a_mat)
    cdef double[:, ::1] v_mv = _as_c(v_mat)
    cdef double[:, ::1] q_mv = q_mat
    cdef int m = c_mv.shape[0]
    cdef double* c_ptr = &c_mv[0, 0]
    cdef double* a_ptr = &a_mv[0, 0]
    cdef double* v_ptr = &v_mv[0, 0]
    cdef double* q_ptr = &q_mv[0, 0]
    cdef double* u_buf = <double*> malloc(m * sizeof(double))
    if u_buf == NULL:
        raise MemoryError()
    cdef double f_buf[9]
    cdef double p_buf[9]
    cdef double g_prev, g, ref
    cdef int sweeps = 0
    cdef int status = 0
    cdef bint converged = False
    gammas = []
    try:
        g_prev = _gamma(c_ptr, m, a_ptr, v_ptr, q_ptr)
        gammas.append(g_prev)
        while sweeps < max_sweeps:
            _refresh(c_ptr, m, a_ptr, v_ptr, q_ptr, u_clamp, u_buf, f_buf, p_buf)
            status = _sweep(f_buf, p_buf, q_ptr)
            if status != 0:
                _raise_for(status)
            g = _gamma(c_ptr, m, a_ptr, v_ptr, q_ptr)
            gammas.append(g)
            sweeps += 1
            ref = fabs(g_prev) if fabs(g_prev) > 1.0 else 1.0
            if fabs(g_prev - g) <= eps_inner * ref:
                converged = True
                break
            g_prev = g
    finally:
        free(u_buf)
    return gammas, sweeps, converged
