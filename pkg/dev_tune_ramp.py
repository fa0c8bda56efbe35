"""Dev-only: scan ramp schedule parameters with a fast pure-state propagator.

Noiseless dynamics: |psi(t)> stepped with the midpoint exponential
U = expm(-i H(t_mid) dt) via eigh of the 64x64 H. Good enough to rank
schedules; the champion is re-validated with the production integrator.
"""

import numpy as np

from dipsim.hamiltonian import SpinSystem, build_drive, build_xy_hamiltonian, sector_basis
from dipsim.edsolver import ground_state
from dipsim.observables import full_bond_report
from dipsim.lindblad import PiecewiseCosine, staggered_amplitudes
from dipsim.units import TWO_PI

L, j1 = 6, 100.0
j2 = 0.5 * j1

h_sec = build_xy_hamiltonian(SpinSystem(L=L, coupling=(j1, j2), sector=L // 2))
gs_sec = ground_state(h_sec).ground_state
rep = full_bond_report(gs_sec, L, sector=L // 2)
target_bz = rep.bz

sysF = SpinSystem(L=L, coupling=(j1, j2))
h0 = build_xy_hamiltonian(sysF).toarray()
hx = build_drive(staggered_amplitudes(1.0, L), np.zeros(L)).toarray()
hz = build_drive(np.zeros(L), np.ones(L)).toarray()

# embed sector ground state in full space for overlap
basis = sector_basis(L, L // 2)
gs_full = np.zeros(2**L, dtype=complex)
gs_full[basis] = gs_sec

nvec = np.array([bin(s).count("1") for s in range(2**L)])


def run(T_over_j1, om_peak, d_init, slices=3000, d_off=0.4, om_full=0.5, om_off=0.6):
    T = T_over_j1 / (TWO_PI * j1)
    om_env = PiecewiseCosine(((0.0, om_full * T, 0.0, om_peak), (om_off * T, T, om_peak, 0.0)))
    de_env = PiecewiseCosine(((0.0, d_off * T, d_init, 0.0),))
    psi = np.zeros(2**L, dtype=complex)
    psi[0] = 1.0
    dt = T / slices
    mids = (np.arange(slices) + 0.5) * dt
    oms = np.asarray(om_env(mids))
    des = np.asarray(de_env(mids))
    for k in range(slices):
        h = h0 + oms[k] * hx + des[k] * hz
        w, v = np.linalg.eigh(h)
        psi = v @ (np.exp(-1j * TWO_PI * w * dt) * (v.conj().T @ psi))
    rep = full_bond_report(psi, L)
    ov = abs(np.vdot(gs_full, psi)) ** 2
    nex = float(np.real(np.vdot(psi, nvec * psi)))
    return rep.bz / target_bz, rep.bx, ov, nex


if __name__ == "__main__":
    import itertools, sys

    results = []
    for T_over, om, dI in itertools.product(
        [100.0, 200.0, 300.0], [0.3, 0.55, 0.8, 1.2, 1.8], [1.7, 2.0, 2.5]
    ):
        frac, bx, ov, nex = run(T_over, om * j1, dI * j1)
        results.append((frac, T_over, om, dI, ov, nex))
        print(
            "T=%5.0f om=%4.2f dI=%3.1f -> Bz/ED=%+.4f overlap=%.4f <N>=%.3f"
            % (T_over, om, dI, frac, ov, nex),
            flush=True,
        )
    results.sort(reverse=True)
    print("\nbest:", results[:5])
