"""Lumped-element circuit model: qubits as LC dipoles, optional cavity.

Networks are assembled from the qubit shunt capacitances, a qubit-qubit
coupling capacitance (given directly or reduced exactly from the four
pad-to-pad capacitors of two dipole antennas), and optionally a cavity
node coupled through C0 to each qubit.  Normal modes solve the
generalized eigenproblem |Linv - w^2 C| = 0; couplings come either from
golden-section minimization of the avoided-crossing gap under an L1
sweep, or from the quantized local-mode expressions

    lambda_ij = Cinv_ij * Q_i^ZPF * Q_j^ZPF / hbar,
    J_ij = lambda_ij + lambda_iR lambda_jR / (2 Delta_j),
    Delta_j = omega_R - omega_j.

Sign convention: couplings are reported in the quantized-Hamiltonian
(lambda) convention, where a side-by-side parallel pair is positive and
the lower hybridized mode is then antisymmetric on the qubit nodes.  The
dipolar-law convention of the analytic coupling engine is the global
opposite; zero loci and gap magnitudes are convention-free.

Units: fF, nH, mm; mode frequencies in 2*pi*GHz; couplings in 2*pi*MHz.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
from scipy.constants import e as E_CHARGE
from scipy.constants import hbar as HBAR

PHI0 = HBAR / (2.0 * E_CHARGE)  # reduced flux quantum, Wb

# numeric-unit conversions
_OMEGA_SCALE = 1.0e12  # sqrt(1/(nH*fF)) -> rad/s
_TO_2PI_GHZ = _OMEGA_SCALE / (2.0 * math.pi * 1.0e9)
_TO_2PI_MHZ_FROM_RAD_S = 1.0 / (2.0 * math.pi * 1.0e6)

GOLDEN_XTOL_FRAC = 1e-6  # of the sweep span
DISPERSIVE_WARN = 0.1


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class PaddlePair:
    """Co-planar paddle pair: width w, edge separation s (mm), averaged
    dielectric constant epsilon (fF/mm scale absorbed)."""

    w: float
    s: float
    epsilon: float = 0.05

    def __post_init__(self):
        if self.w <= 0 or self.s <= 0:
            raise CircuitError("paddle width and separation must be positive")


def paddle_capacitance(pair: PaddlePair, mode="exact", a=None):
    """Pad-pad capacitance (fF): co-planar log law, or the a/s^2 shorthand
    used for the dipole coupling network."""
    if mode == "exact":
        ws = pair.w + pair.s
        return (2.0 * pair.epsilon / math.pi) * math.log(ws**2 / (ws**2 - pair.w**2))
    if mode == "quadratic":
        if a is None:
            raise CircuitError("quadratic mode needs the coefficient a (fF mm^2)")
        return a / pair.s**2
    raise CircuitError("unknown paddle capacitance mode %r" % (mode,))


@dataclass(frozen=True)
class CircuitNetwork:
    """Capacitance matrix (fF), diagonal inverse inductances (1/nH), labels."""

    C: np.ndarray
    Linv: np.ndarray
    labels: tuple
    c_q_eff: float = None  # reduced qubit-qubit coupling capacitance, if known

    def __post_init__(self):
        c = np.asarray(self.C, dtype=float)
        linv = np.asarray(self.Linv, dtype=float)
        if c.shape[0] != c.shape[1] or not np.allclose(c, c.T, atol=1e-12):
            raise CircuitError("capacitance matrix must be symmetric")
        try:
            np.linalg.cholesky(c)
        except np.linalg.LinAlgError:
            raise CircuitError("capacitance matrix must be positive definite") from None
        if linv.ndim == 1:
            linv = np.diag(linv)
        if np.any(np.diag(linv) < 0):
            raise CircuitError("inverse inductances must be nonnegative")
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "Linv", linv)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self):
        return self.C.shape[0]


def _pad_positions(center, angle, separation):
    ax = np.array([math.cos(angle), math.sin(angle)])
    c = np.asarray(center, dtype=float)
    return c + 0.5 * separation * ax, c - 0.5 * separation * ax


def reduce_dipole_pads(
    q1_center,
    q2_center,
    pad_separation,
    a,
    q1_angle=math.pi / 2,
    q2_angle=math.pi / 2,
    min_gap=1e-3,
):
    """Exact two-port reduction of the four pad-pad capacitors.

    Pad-pad values follow the quadratic decay a/r^2 of the pad-center
    distances.  The pad network couples the two differential (qubit)
    modes and the relative common mode; the common mode carries no
    inductance and is eliminated by a Schur complement at zero conjugate
    charge.  Returns (delta_C1, delta_C2, C_Q_eff): diagonal loading of
    each qubit and the effective coupling capacitance (positive for
    side-by-side parallel dipoles).
    """
    a1p, a1m = _pad_positions(q1_center, q1_angle, pad_separation)
    b1p, b1m = _pad_positions(q2_center, q2_angle, pad_separation)
    pads1, pads2 = (a1p, a1m), (b1p, b1m)
    cross = np.zeros((2, 2))
    for i, pa in enumerate(pads1):
        for j, pb in enumerate(pads2):
            r = float(np.hypot(*(pa - pb)))
            if r < min_gap:
                raise CircuitError("antenna pads overlap (gap %.4f mm)" % r)
            cross[i, j] = a / r**2

    # pad coordinates (a+, a-, b+, b-) -> (phi1, phi2, sigma); the global
    # common mode is null and dropped
    m = np.array(
        [
            [0.5, 0.0, 0.5],
            [-0.5, 0.0, 0.5],
            [0.0, 0.5, -0.5],
            [0.0, -0.5, -0.5],
        ]
    )
    cpad = np.zeros((4, 4))
    edges = [(0, 2, cross[0, 0]), (0, 3, cross[0, 1]), (1, 2, cross[1, 0]), (1, 3, cross[1, 1])]
    for i, j, cval in edges:
        cpad[i, i] += cval
        cpad[j, j] += cval
        cpad[i, j] -= cval
        cpad[j, i] -= cval
    cred = m.T @ cpad @ m
    if cred[2, 2] > 1e-300:
        chi = cred[:2, :2] - np.outer(cred[:2, 2], cred[2, :2]) / cred[2, 2]
    else:
        chi = cred[:2, :2]
    return chi[0, 0], chi[1, 1], -chi[0, 1]


@dataclass(frozen=True)
class TwoQubitCircuit:
    """Parameter set for two transmon-like dipoles, optionally in a cavity.

    The qubit-qubit coupling is either a direct C_Q (fF) or, when
    ``pad_separation``/``pad_a`` are set, the exact reduction of the
    4-capacitor antenna network at the given relative placement.
    Defaults are calibrated so the model reproduces the qualitative
    coupling maps: the in-cavity angle sweep at 1.5 mm changes sign near
    40 degrees and the y = 1 mm cut is suppressed twice.
    """

    C1_fF: float = 70.0
    C2_fF: float = 70.0
    L1_nH: float = 10.0
    L2_nH: float = 10.0
    C_Q_fF: float = None
    pad_separation_mm: float = 0.6
    pad_a_fF_mm2: float = 4.0
    q2_offset_mm: tuple = (1.0, 0.0)
    q1_angle: float = math.pi / 2
    q2_angle: float = math.pi / 2
    cavity_enabled: bool = False
    cavity_C_fF: float = 500.0
    cavity_L_nH: float = 2.0264
    cavity_C0_fF: float = 5.0

    def coupling_capacitance(self):
        """(dC1, dC2, C_Q_eff) from the explicit C_Q or the pad network."""
        if self.C_Q_fF is not None:
            return 0.0, 0.0, self.C_Q_fF
        return reduce_dipole_pads(
            (0.0, 0.0),
            self.q2_offset_mm,
            self.pad_separation_mm,
            self.pad_a_fF_mm2,
            self.q1_angle,
            self.q2_angle,
        )

    def build(self, L1_nH=None):
        return build_network(self, L1_nH=L1_nH)


def build_network(params: TwoQubitCircuit, L1_nH=None):
    """Assemble the capacitance/inductance matrices of the two-qubit
    (plus optional cavity) lumped circuit."""
    l1 = params.L1_nH if L1_nH is None else L1_nH
    if l1 <= 0 or params.L2_nH <= 0:
        raise CircuitError("inductances must be positive")
    dc1, dc2, c_q = params.coupling_capacitance()
    c1 = params.C1_fF + dc1
    c2 = params.C2_fF + dc2
    if not params.cavity_enabled:
        c = np.array([[c1 + c_q, -c_q], [-c_q, c2 + c_q]])
        linv = np.array([1.0 / l1, 1.0 / params.L2_nH])
        return CircuitNetwork(C=c, Linv=linv, labels=("q1", "q2"), c_q_eff=c_q)
    c0 = params.cavity_C0_fF
    c = np.array(
        [
            [c1 + c_q + c0, -c_q, -c0],
            [-c_q, c2 + c_q + c0, -c0],
            [-c0, -c0, params.cavity_C_fF + 2.0 * c0],
        ]
    )
    linv = np.array([1.0 / l1, 1.0 / params.L2_nH, 1.0 / params.cavity_L_nH])
    return CircuitNetwork(C=c, Linv=linv, labels=("q1", "q2", "cavity"), c_q_eff=c_q)


def normal_modes(net: CircuitNetwork, vectors=False):
    """Mode frequencies in 2*pi*GHz, ascending; optionally the eigenvectors
    (columns, C-orthonormal) of |Linv - w^2 C| = 0."""
    w, v = sla.eigh(net.Linv, net.C)
    w = np.clip(w, 0.0, None)
    freqs = np.sqrt(w) * _TO_2PI_GHZ
    if vectors:
        return freqs, v
    return freqs


def _mode_node_assignment(v):
    """Greedy node<->mode assignment by eigenvector weight."""
    n = v.shape[0]
    weights = np.abs(v)
    assign = [-1] * n
    used = set()
    for _ in range(n):
        idx = np.unravel_index(
            np.argmax(np.where(np.isfinite(weights), weights, -1)), weights.shape
        )
        node, mode = idx
        assign[node] = mode
        weights[node, :] = -np.inf
        weights[:, mode] = -np.inf
        used.add(mode)
    return assign


@dataclass
class QuantizedCircuit:
    """Local-mode quantization of a network: per-node frequencies, ZPF
    amplitudes, exchange couplings and anharmonicity scales."""

    network: CircuitNetwork
    mode_freqs_2piGHz: np.ndarray  # per node, assigned from the normal modes
    q_zpf: np.ndarray  # Coulomb
    phi_zpf: np.ndarray  # Weber
    lam_2piMHz: np.ndarray  # symmetric exchange-coupling matrix
    Lambda_2piMHz: np.ndarray  # anharmonicity scale per node
    EJ_J: np.ndarray  # Josephson energies (J); 0 for non-qubit nodes


def quantize(net: CircuitNetwork, EJ_J=None):
    """ZPF quantization in the local-mode basis.

    C_eff,j = 1/(C^-1)_jj, Q^ZPF = sqrt(hbar w C_eff / 2), Phi^ZPF =
    sqrt(hbar w alpha / 2) with alpha_j = L_j, lambda_ij = (C^-1)_ij
    Q_i^ZPF Q_j^ZPF / hbar, Lambda_j = (EJ_j / 4)(Phi^ZPF_j / Phi0)^4.
    EJ defaults to Phi0^2 / L_j for nodes labeled as qubits.
    """
    cinv = np.linalg.inv(net.C)  # 1/fF
    if np.any(np.abs(np.diag(cinv)) < 1e-300):
        raise CircuitError("singular effective capacitance")
    freqs, vecs = normal_modes(net, vectors=True)
    assign = _mode_node_assignment(vecs)
    omega = freqs[assign] * 2.0 * math.pi * 1.0e9  # rad/s per node

    c_eff = 1.0 / np.diag(cinv) * 1.0e-15  # F
    linv_diag = np.diag(net.Linv)
    alpha = np.where(linv_diag > 0, 1.0 / np.where(linv_diag > 0, linv_diag, 1.0), np.inf)
    alpha_si = alpha * 1.0e-9  # H

    q_zpf = np.sqrt(HBAR * omega * c_eff / 2.0)
    phi_zpf = np.sqrt(HBAR * omega * alpha_si / 2.0)

    cinv_si = cinv / 1.0e-15
    lam = np.zeros_like(cinv)
    n = net.n
    for i in range(n):
        for j in range(n):
            if i != j:
                lam[i, j] = cinv_si[i, j] * q_zpf[i] * q_zpf[j] / HBAR * _TO_2PI_MHZ_FROM_RAD_S

    if EJ_J is None:
        EJ_J = np.where(np.isfinite(alpha_si), PHI0**2 / alpha_si, 0.0)
        EJ_J = np.array(
            [ej if lab.startswith("q") else 0.0 for ej, lab in zip(EJ_J, net.labels)]
        )
    else:
        EJ_J = np.asarray(EJ_J, dtype=float)
        if np.any(EJ_J < 0):
            raise CircuitError("Josephson energies must be >= 0")
    with np.errstate(invalid="ignore"):
        big_lambda = (EJ_J / 4.0) * (phi_zpf / PHI0) ** 4 / HBAR * _TO_2PI_MHZ_FROM_RAD_S
    big_lambda = np.nan_to_num(big_lambda)

    return QuantizedCircuit(
        network=net,
        mode_freqs_2piGHz=freqs[assign],
        q_zpf=q_zpf,
        phi_zpf=np.where(np.isfinite(phi_zpf), phi_zpf, 0.0),
        lam_2piMHz=lam,
        Lambda_2piMHz=big_lambda,
        EJ_J=EJ_J,
    )


@dataclass
class EffectiveCoupling:
    """Cavity-eliminated two-qubit parameters (2*pi*MHz)."""

    J_2piMHz: float  # symmetrized effective exchange
    J_matrix: np.ndarray  # literal lambda_ij + lambda_iR lambda_jR / (2 Delta_j)
    Delta_tilde: np.ndarray
    Lambda_tilde: np.ndarray
    epsilon: np.ndarray  # -lambda_iR / Delta_i dispersive parameters


def effective_coupling(q: QuantizedCircuit, detunings_2piMHz=None):
    """Dispersive elimination of the cavity node.

    Detunings default to Delta_i = omega_R - omega_i from the assigned
    mode frequencies.  Warns (does not reject) when |lambda_iR / Delta_i|
    exceeds 0.1.
    """
    if q.network.n == 2:
        j = q.lam_2piMHz[0, 1]
        return EffectiveCoupling(
            J_2piMHz=float(j),
            J_matrix=q.lam_2piMHz[:2, :2].copy(),
            Delta_tilde=np.zeros(2),
            Lambda_tilde=q.Lambda_2piMHz[:2].copy(),
            epsilon=np.zeros(2),
        )
    if "cavity" not in q.network.labels:
        raise CircuitError("effective coupling needs a cavity node")
    r = q.network.labels.index("cavity")
    qubits = [k for k in range(q.network.n) if k != r]
    omega_2piMHz = q.mode_freqs_2piGHz * 1.0e3
    if detunings_2piMHz is None:
        detunings_2piMHz = np.array([omega_2piMHz[r] - omega_2piMHz[i] for i in qubits])
    delta = np.asarray(detunings_2piMHz, dtype=float)
    if np.any(delta == 0):
        raise CircuitError("zero qubit-cavity detuning")
    lam_ir = np.array([q.lam_2piMHz[i, r] for i in qubits])
    eps = -lam_ir / delta
    if np.any(np.abs(eps) > DISPERSIVE_WARN):
        warnings.warn(
            "dispersive parameter |lambda/Delta| = %.3f exceeds %.2f; the "
            "second-order elimination is inaccurate" % (np.abs(eps).max(), DISPERSIVE_WARN),
            stacklevel=2,
        )
    nq = len(qubits)
    jmat = np.zeros((nq, nq))
    for a in range(nq):
        for b in range(nq):
            if a != b:
                jmat[a, b] = q.lam_2piMHz[qubits[a], qubits[b]] + lam_ir[a] * lam_ir[b] / (
                    2.0 * delta[b]
                )
    j_sym = 0.5 * (jmat[0, 1] + jmat[1, 0])
    delta_tilde = -delta * (1.0 - eps**2)
    lambda_tilde = q.Lambda_2piMHz[qubits] * (1.0 + 4.0 * eps**2)
    return EffectiveCoupling(
        J_2piMHz=float(j_sym),
        J_matrix=jmat,
        Delta_tilde=delta_tilde,
        Lambda_tilde=lambda_tilde,
        epsilon=eps,
    )


def _qubit_mode_gap(net: CircuitNetwork):
    """Gap (2*pi*GHz) between the two qubit-like modes and the lower-mode
    eigenvector components on the qubit nodes."""
    freqs, vecs = normal_modes(net, vectors=True)
    if net.n == 2:
        lo, hi = 0, 1
    else:
        r = net.labels.index("cavity")
        weights = np.abs(vecs[r, :])
        cavity_mode = int(np.argmax(weights))
        modes = [k for k in range(net.n) if k != cavity_mode]
        lo, hi = modes[0], modes[1]
    q_nodes = [k for k, lab in enumerate(net.labels) if lab.startswith("q")]
    lower = lo if freqs[lo] <= freqs[hi] else hi
    comps = vecs[q_nodes, lower]
    return abs(freqs[hi] - freqs[lo]), comps


def extract_coupling(make_network, l1_range, n_scan=121):
    """Avoided-crossing coupling from an L1 sweep.

    ``make_network(L1_nH)`` must return the network family.  The gap
    between the two qubit-like modes is scanned over the range (which
    must bracket an interior minimum), then minimized by golden-section
    search to 1e-6 of the span.  Returns (J_2piMHz, L1_at_crossing) with
    J = +gap/2 when the lower mode is antisymmetric on the qubit nodes
    (lambda convention) and -gap/2 when symmetric.
    """
    lo, hi = map(float, l1_range)
    if not hi > lo > 0:
        raise CircuitError("need 0 < L1_min < L1_max")
    grid = np.linspace(lo, hi, n_scan)
    gaps = np.array([_qubit_mode_gap(make_network(l))[0] for l in grid])
    k = int(np.argmin(gaps))
    if k == 0 or k == n_scan - 1:
        raise CircuitError(
            "no interior avoided crossing in the sweep range (%g, %g) nH" % (lo, hi)
        )
    a, b = grid[k - 1], grid[k + 1]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    xtol = GOLDEN_XTOL_FRAC * (hi - lo)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _qubit_mode_gap(make_network(c))[0]
    fd = _qubit_mode_gap(make_network(d))[0]
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _qubit_mode_gap(make_network(c))[0]
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _qubit_mode_gap(make_network(d))[0]
    l1_star = 0.5 * (a + b)
    gap, comps = _qubit_mode_gap(make_network(l1_star))
    sign = 1.0 if comps[0] * comps[1] < 0 else -1.0
    return sign * 0.5 * gap * 1.0e3, l1_star  # 2*pi*MHz, nH


def circuit_coupling(params: TwoQubitCircuit):
    """Effective qubit-qubit coupling (2*pi*MHz, lambda convention) at the
    given placement, via quantization and cavity elimination."""
    net = build_network(params)
    q = quantize(net)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return effective_coupling(q).J_2piMHz


def circuit_coupling_map(
    params: TwoQubitCircuit,
    x_range=(0.4, 4.0),
    y_range=(0.4, 4.0),
    resolution=61,
    min_center_distance=None,
):
    """Coupling field over a grid of qubit-2 placements.

    Returns the same structure as the analytic coupling map: grid
    vectors, a J field (NaN inside the excluded overlap region) and the
    zero contour from cell-edge sign scanning.
    """
    from .coupling import CouplingMap, _zero_contour

    if min_center_distance is None:
        # the region at antenna-scale distances is physically inaccessible,
        # and the point-dipole picture bends there anyway
        min_center_distance = 1.5 * params.pad_separation_mm
    xs = np.linspace(*x_range, resolution)
    ys = np.linspace(*y_range, resolution)
    fld = np.full((ys.size, xs.size), np.nan)
    for iy, yv in enumerate(ys):
        for ix, xv in enumerate(xs):
            if math.hypot(xv, yv) < min_center_distance:
                continue
            try:
                fld[iy, ix] = circuit_coupling(replace(params, q2_offset_mm=(xv, yv)))
            except CircuitError:
                continue
    if not np.isfinite(fld).any():
        raise CircuitError("grid lies entirely inside the excluded region")
    return CouplingMap(x=xs, y=ys, J=fld, contour=_zero_contour(xs, ys, fld))


def circuit_angle_sweep(params: TwoQubitCircuit, r_mm=1.5, angles=None):
    """Coupling vs center-line angle at fixed distance, parallel antennas.

    The angle is measured from the side-by-side orientation (center line
    perpendicular to both dipole axes); 90 degrees is collinear.
    """
    if angles is None:
        angles = np.linspace(0.0, math.pi / 2, 91)
    angles = np.asarray(angles, dtype=float)
    vals = np.empty(angles.size)
    for k, alpha in enumerate(angles):
        # dipole axes along y; center line rotated by alpha from x
        offset = (r_mm * math.cos(alpha), r_mm * math.sin(alpha))
        vals[k] = circuit_coupling(replace(params, q2_offset_mm=offset))
    return angles, vals
