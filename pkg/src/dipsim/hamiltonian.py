"""Sparse spin-1/2 Hamiltonians for the dipolar XY model and its ladder limit.

Basis convention: computational states are bitstrings with bit j = site j
(1 = up = one excitation), ordered lexicographically, i.e. by increasing
integer value.  In an excitation-number sector the basis is the sorted
list of integers with that popcount.  The XY flip-flop terms and the S^z
fields commute with total S^z, so sector bases are closed under them; the
S^x drive is only available on the full 2^L space.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

MAX_L_PURE = 14  # state-vector methods
MAX_L_DENSITY = 10  # density-matrix methods

HERMITICITY_TOL = 1e-12


class DimensionError(ValueError):
    pass


def sector_basis(L, n_ex=None):
    """Sorted integer basis states; the n_ex sector or the full space."""
    if n_ex is None:
        return np.arange(2**L, dtype=np.int64)
    if not 0 <= n_ex <= L:
        raise DimensionError("n_ex=%r outside 0..L" % (n_ex,))
    states = np.arange(2**L, dtype=np.int64)
    pop = np.zeros(2**L, dtype=np.int64)
    for j in range(L):
        pop += (states >> j) & 1
    return states[pop == n_ex]


def state_index(basis, states):
    """Index of each state in a sorted basis (-1 if absent)."""
    idx = np.searchsorted(basis, states)
    idx = np.clip(idx, 0, basis.size - 1)
    ok = basis[idx] == states
    return np.where(ok, idx, -1)


def _bits(basis, j):
    return (basis >> j) & 1


def _check_hermitian(h):
    d = abs(h - h.conj().T)
    err = d.max() if d.nnz else 0.0
    scale = abs(h).max() if h.nnz else 1.0
    if err > HERMITICITY_TOL * max(scale, 1.0):
        raise AssertionError("constructed operator is not Hermitian (err=%g)" % err)


@dataclass
class SpinSystem:
    """L sites with either a full coupling matrix or (J1, J2) ladder couplings.

    ``fields`` is the per-site longitudinal field h_j (2*pi*MHz); ``sector``
    restricts to an excitation-number subspace when set.
    """

    L: int
    coupling: object  # (n, n) array or (J1, J2) tuple
    fields: np.ndarray = None
    sector: int = None

    def __post_init__(self):
        if not 1 <= self.L <= MAX_L_PURE:
            raise DimensionError("L=%d outside 1..%d" % (self.L, MAX_L_PURE))
        if self.fields is None:
            self.fields = np.zeros(self.L)
        self.fields = np.asarray(self.fields, dtype=float)
        if self.fields.shape != (self.L,):
            raise DimensionError("fields must have length L")
        if self.sector is not None and not 0 <= self.sector <= self.L:
            raise DimensionError("sector outside 0..L")

    def coupling_matrix(self):
        if isinstance(self.coupling, tuple):
            j1, j2 = self.coupling
            return ladder_coupling_matrix(self.L, j1, j2)
        mat = np.asarray(self.coupling, dtype=float)
        if mat.shape != (self.L, self.L):
            raise DimensionError("coupling matrix must be (L, L)")
        return mat

    def basis(self):
        return sector_basis(self.L, self.sector)


def ladder_coupling_matrix(L, J1, J2):
    """NN + NNN couplings along the zigzag path, open boundaries."""
    mat = np.zeros((L, L))
    for i in range(L - 1):
        mat[i, i + 1] = mat[i + 1, i] = J1
    for i in range(L - 2):
        mat[i, i + 2] = mat[i + 2, i] = J2
    return mat


def build_xy_hamiltonian(system: SpinSystem):
    """H = sum_{i<j} J_ij (S+_i S-_j + h.c.) + sum_j h_j S^z_j as sparse CSR."""
    basis = system.basis()
    dim = basis.size
    jmat = system.coupling_matrix()

    diag = np.zeros(dim)
    for j in range(system.L):
        diag += system.fields[j] * (_bits(basis, j) - 0.5)
    rows, cols, vals = [np.arange(dim)], [np.arange(dim)], [diag]

    for i in range(system.L):
        for j in range(i + 1, system.L):
            jij = jmat[i, j]
            if jij == 0.0:
                continue
            # states with site i up, site j down; flip-flop to the partner
            mask = (_bits(basis, i) == 1) & (_bits(basis, j) == 0)
            src = basis[mask]
            dst = src - (1 << i) + (1 << j)
            di = state_index(basis, dst)
            si = np.nonzero(mask)[0]
            keep = di >= 0
            si, di = si[keep], di[keep]
            rows.append(di)
            cols.append(si)
            vals.append(np.full(si.size, jij))
            rows.append(si)
            cols.append(di)
            vals.append(np.full(si.size, jij))

    h = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    _check_hermitian(h)
    return h


def build_ladder_hamiltonian(L, J1, J2, fields=None, sector=None):
    """Open-boundary J1-J2 XY ladder Hamiltonian."""
    return build_xy_hamiltonian(SpinSystem(L=L, coupling=(J1, J2), fields=fields, sector=sector))


def build_drive(omega_j, delta_j):
    """Drive H_d = sum_j Omega_j S^x_j + sum_j Delta_j S^z_j on the full space.

    The S^x terms change the excitation number, so no sector variant exists.
    """
    omega_j = np.asarray(omega_j, dtype=float)
    delta_j = np.asarray(delta_j, dtype=float)
    L = omega_j.size
    if delta_j.size != L:
        raise DimensionError("Omega_j and Delta_j must have equal length")
    if L > MAX_L_PURE:
        raise DimensionError("L=%d above cap %d" % (L, MAX_L_PURE))
    basis = sector_basis(L)
    dim = basis.size

    diag = np.zeros(dim)
    for j in range(L):
        diag += delta_j[j] * (_bits(basis, j) - 0.5)
    rows, cols, vals = [np.arange(dim)], [np.arange(dim)], [diag]
    for j in range(L):
        if omega_j[j] == 0.0:
            continue
        flipped = basis ^ (1 << j)
        rows.append(flipped)
        cols.append(basis)
        vals.append(np.full(dim, omega_j[j] / 2.0))

    h = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    _check_hermitian(h)
    return h


def site_sz_diagonal(L, basis=None):
    """Per-site S^z diagonals, shape (L, dim); used by observables and noise."""
    if basis is None:
        basis = sector_basis(L)
    return np.array([_bits(basis, j) - 0.5 for j in range(L)])


def mg_product_state(L, gauge="singlet", sector=True):
    """Dimer product state: bonds (0,1), (2,3), ... each (|ud> +/- |du>)/sqrt(2).

    For J1 > 0 the ladder ground state at the dimer point matches the
    ``singlet`` gauge; the ``triplet`` gauge is its sublattice-rotated
    partner (same physics, J1 < 0).  Returned in the n_ex = L/2 sector
    basis by default, or the full space with sector=False.
    """
    if L % 2:
        raise DimensionError("the dimer product state needs even L")
    if gauge not in ("singlet", "triplet"):
        raise ValueError("gauge must be 'singlet' or 'triplet'")
    sign = -1.0 if gauge == "singlet" else 1.0
    basis = sector_basis(L, L // 2 if sector else None)
    index = {int(s): i for i, s in enumerate(basis)}
    vec = np.zeros(basis.size, dtype=complex)
    norm = (1.0 / np.sqrt(2.0)) ** (L // 2)
    for pattern in range(2 ** (L // 2)):
        state = 0
        amp = norm
        for bond in range(L // 2):
            if (pattern >> bond) & 1:
                state |= 1 << (2 * bond)  # |up down> on (2b, 2b+1)
            else:
                state |= 1 << (2 * bond + 1)  # |down up>, carries the gauge sign
                amp *= sign
        vec[index[state]] = amp
    return vec
