"""Pure-numpy Lindblad RK4 stepper (reference backend).

The Hamiltonians built here are real symmetric, so the density matrix is
propagated in split form rho = R + iS (R symmetric, S antisymmetric):

    dR/dt = H S + (H S)^T + damp * R + gathers(R)
    dS/dt = (H R)^T - H R + damp * S + gathers(S)

with H(t) = H0 + sum_m c_m(t) H_m, all real.  This costs two real
matrix products per right-hand side and keeps every RK4 stage exactly
Hermitian.  The elementwise ``damp`` matrix carries the anticommutator
part of the decay dissipator plus the full dephasing dissipator; the
gather term is the recycling part C rho C^dag of the decay channels.
All inputs are in rad/us.
"""

import numpy as np

BACKEND = "python"


def _rhs(r, s, h0, h_terms, coeffs, damp, decay_src, decay_dst, decay_w, out_r, out_s):
    ht = h0 if h_terms.shape[0] == 0 else h0 + np.tensordot(coeffs, h_terms, axes=1)
    p = ht @ r
    q = ht @ s
    np.add(q, q.T, out=out_r)
    out_r += damp * r
    np.subtract(p.T, p, out=out_s)
    out_s += damp * s
    for o in range(decay_w.size):
        ds = np.ix_(decay_dst[o], decay_dst[o])
        sr = np.ix_(decay_src[o], decay_src[o])
        out_r[ds] += decay_w[o] * r[sr]
        out_s[ds] += decay_w[o] * s[sr]


def step_interval(rho, h0, h_terms, coeff_nodes, damp, decay_src, decay_dst, decay_w, dt, nsteps):
    """Advance rho (complex, in place) by nsteps fixed RK4 steps.

    coeff_nodes has shape (n_terms, 2*nsteps + 1): the time-dependent term
    coefficients evaluated on the half-step grid.
    """
    r = np.ascontiguousarray(rho.real)
    s = np.ascontiguousarray(rho.imag)
    buf = [np.empty_like(r) for _ in range(6)]
    yr, ys, kr, ks, ar, as_ = buf

    def rhs(rr, ss, node):
        _rhs(rr, ss, h0, h_terms, coeff_nodes[:, node], damp, decay_src, decay_dst, decay_w, kr, ks)

    for n in range(nsteps):
        rhs(r, s, 2 * n)
        np.copyto(ar, kr)
        np.copyto(as_, ks)
        np.multiply(kr, 0.5 * dt, out=yr)
        yr += r
        np.multiply(ks, 0.5 * dt, out=ys)
        ys += s
        rhs(yr, ys, 2 * n + 1)
        ar += 2.0 * kr
        as_ += 2.0 * ks
        np.multiply(kr, 0.5 * dt, out=yr)
        yr += r
        np.multiply(ks, 0.5 * dt, out=ys)
        ys += s
        rhs(yr, ys, 2 * n + 1)
        ar += 2.0 * kr
        as_ += 2.0 * ks
        np.multiply(kr, dt, out=yr)
        yr += r
        np.multiply(ks, dt, out=ys)
        ys += s
        rhs(yr, ys, 2 * n + 2)
        ar += kr
        as_ += ks
        r += (dt / 6.0) * ar
        s += (dt / 6.0) * as_

    rho.real = r
    rho.imag = s
    return rho
