# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Lindblad RK4 stepper; mirrors lindblad_py.step_interval.

The density matrix is propagated in split real form (R, S); each
right-hand side costs two real dgemm calls plus O(dim^2) elementwise
work and the decay gathers.  Buffers are allocated once per call and the
stepping loop never touches Python objects.
"""

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

BACKEND = "cython"


cdef void _rhs(double[:, ::1] r, double[:, ::1] s,
               double[:, ::1] h0, double[:, :, ::1] h_terms, double[:] coeffs,
               double[:, ::1] damp,
               long long[:, ::1] decay_src, long long[:, ::1] decay_dst, double[:] decay_w,
               double[:, ::1] htmp, double[:, ::1] p, double[:, ::1] q,
               double[:, ::1] out_r, double[:, ::1] out_s) noexcept nogil:
    cdef int dim = r.shape[0]
    cdef int nt = h_terms.shape[0]
    cdef int nops = decay_w.shape[0]
    cdef int half = decay_src.shape[1] if nops > 0 else 0
    cdef int i, j, m, o, kk, mm
    cdef double c, w
    cdef double one = 1.0
    cdef double zero = 0.0

    for i in range(dim):
        for j in range(dim):
            htmp[i, j] = h0[i, j]
    for m in range(nt):
        c = coeffs[m]
        if c != 0.0:
            for i in range(dim):
                for j in range(dim):
                    htmp[i, j] = htmp[i, j] + c * h_terms[m, i, j]

    # p = htmp @ r, q = htmp @ s.  Row-major arrays read as transposed by
    # Fortran BLAS: computing p^T = r^T htmp^T yields p in C layout.
    dgemm("N", "N", &dim, &dim, &dim, &one, &r[0, 0], &dim, &htmp[0, 0], &dim,
          &zero, &p[0, 0], &dim)
    dgemm("N", "N", &dim, &dim, &dim, &one, &s[0, 0], &dim, &htmp[0, 0], &dim,
          &zero, &q[0, 0], &dim)

    # dR = Q + Q^T + damp*R ; dS = P^T - P + damp*S
    for i in range(dim):
        for j in range(dim):
            out_r[i, j] = q[i, j] + q[j, i] + damp[i, j] * r[i, j]
            out_s[i, j] = p[j, i] - p[i, j] + damp[i, j] * s[i, j]

    for o in range(nops):
        w = decay_w[o]
        for kk in range(half):
            for mm in range(half):
                out_r[decay_dst[o, kk], decay_dst[o, mm]] = (
                    out_r[decay_dst[o, kk], decay_dst[o, mm]]
                    + w * r[decay_src[o, kk], decay_src[o, mm]]
                )
                out_s[decay_dst[o, kk], decay_dst[o, mm]] = (
                    out_s[decay_dst[o, kk], decay_dst[o, mm]]
                    + w * s[decay_src[o, kk], decay_src[o, mm]]
                )


def step_interval(rho, h0, h_terms, coeff_nodes, damp, decay_src, decay_dst, decay_w, dt, nsteps):
    """Advance rho (complex, in place) by nsteps fixed RK4 steps."""
    r_arr = np.ascontiguousarray(rho.real)
    s_arr = np.ascontiguousarray(rho.imag)
    cdef double[:, ::1] r = r_arr
    cdef double[:, ::1] s = s_arr
    cdef double[:, ::1] h0_v = np.ascontiguousarray(h0, dtype=np.float64)
    cdef double[:, :, ::1] ht_v = np.ascontiguousarray(h_terms, dtype=np.float64)
    cdef double[:, ::1] nodes_v = np.ascontiguousarray(coeff_nodes, dtype=np.float64)
    cdef double[:, ::1] damp_v = np.ascontiguousarray(damp, dtype=np.float64)
    cdef long long[:, ::1] src_v = np.ascontiguousarray(decay_src, dtype=np.int64)
    cdef long long[:, ::1] dst_v = np.ascontiguousarray(decay_dst, dtype=np.int64)
    cdef double[:] w_v = np.ascontiguousarray(decay_w, dtype=np.float64)

    cdef int dim = r_arr.shape[0]
    cdef int n, i, j
    cdef int nsteps_c = nsteps
    cdef double dt_c = dt
    cdef double sixth = dt_c / 6.0
    cdef double half_dt = 0.5 * dt_c

    buf = [np.empty((dim, dim), dtype=np.float64) for _ in range(9)]
    cdef double[:, ::1] yr = buf[0]
    cdef double[:, ::1] ys = buf[1]
    cdef double[:, ::1] kr = buf[2]
    cdef double[:, ::1] ks = buf[3]
    cdef double[:, ::1] ar = buf[4]
    cdef double[:, ::1] asum = buf[5]
    cdef double[:, ::1] htmp = buf[6]
    cdef double[:, ::1] p = buf[7]
    cdef double[:, ::1] q = buf[8]

    with nogil:
        for n in range(nsteps_c):
            _rhs(r, s, h0_v, ht_v, nodes_v[:, 2 * n], damp_v, src_v, dst_v, w_v,
                 htmp, p, q, kr, ks)
            for i in range(dim):
                for j in range(dim):
                    ar[i, j] = kr[i, j]
                    asum[i, j] = ks[i, j]
                    yr[i, j] = r[i, j] + half_dt * kr[i, j]
                    ys[i, j] = s[i, j] + half_dt * ks[i, j]
            _rhs(yr, ys, h0_v, ht_v, nodes_v[:, 2 * n + 1], damp_v, src_v, dst_v, w_v,
                 htmp, p, q, kr, ks)
            for i in range(dim):
                for j in range(dim):
                    ar[i, j] = ar[i, j] + 2.0 * kr[i, j]
                    asum[i, j] = asum[i, j] + 2.0 * ks[i, j]
                    yr[i, j] = r[i, j] + half_dt * kr[i, j]
                    ys[i, j] = s[i, j] + half_dt * ks[i, j]
            _rhs(yr, ys, h0_v, ht_v, nodes_v[:, 2 * n + 1], damp_v, src_v, dst_v, w_v,
                 htmp, p, q, kr, ks)
            for i in range(dim):
                for j in range(dim):
                    ar[i, j] = ar[i, j] + 2.0 * kr[i, j]
                    asum[i, j] = asum[i, j] + 2.0 * ks[i, j]
                    yr[i, j] = r[i, j] + dt_c * kr[i, j]
                    ys[i, j] = s[i, j] + dt_c * ks[i, j]
            _rhs(yr, ys, h0_v, ht_v, nodes_v[:, 2 * n + 2], damp_v, src_v, dst_v, w_v,
                 htmp, p, q, kr, ks)
            for i in range(dim):
                for j in range(dim):
                    r[i, j] = r[i, j] + sixth * (ar[i, j] + kr[i, j])
                    s[i, j] = s[i, j] + sixth * (asum[i, j] + ks[i, j])

    rho.real = r_arr
    rho.imag = s_arr
    return rho
