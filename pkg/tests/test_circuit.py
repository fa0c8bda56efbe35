import math
import warnings
from dataclasses import replace

import numpy as np
import pytest

from dipsim.circuit import (
    CircuitError,
    CircuitNetwork,
    PaddlePair,
    TwoQubitCircuit,
    build_network,
    circuit_angle_sweep,
    circuit_coupling_map,
    effective_coupling,
    extract_coupling,
    normal_modes,
    paddle_capacitance,
    quantize,
    reduce_dipole_pads,
)
from dipsim.coupling import cut_sign_changes
from scipy.constants import hbar as HBAR


def test_paddle_capacitance_monotone_to_zero():
    eps = 0.05
    vals = [paddle_capacitance(PaddlePair(w=0.3, s=s, epsilon=eps)) for s in (0.1, 0.3, 1, 3, 10, 100)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-4 * vals[0]


def test_paddle_capacitance_epsilon_linearity():
    a = paddle_capacitance(PaddlePair(w=0.3, s=0.5, epsilon=0.05))
    b = paddle_capacitance(PaddlePair(w=0.3, s=0.5, epsilon=0.10))
    assert b == pytest.approx(2.0 * a)


def test_quadratic_law_matches_exact_at_large_separation():
    w, eps = 0.3, 0.05
    a_coef = 2.0 * eps * w**2 / math.pi  # asymptotic coefficient of the log law
    gaps = []
    for s in (5 * w, 20 * w, 80 * w):
        exact = paddle_capacitance(PaddlePair(w=w, s=s, epsilon=eps))
        quad = paddle_capacitance(PaddlePair(w=w, s=s, epsilon=eps), mode="quadratic", a=a_coef)
        gaps.append(abs(exact - quad) / exact)
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.03  # residual gap ~ 2 w / s


def test_quadratic_decay_distance_ratio():
    c1 = paddle_capacitance(PaddlePair(w=0.3, s=1.0), mode="quadratic", a=4.0)
    c2 = paddle_capacitance(PaddlePair(w=0.3, s=2.5), mode="quadratic", a=4.0)
    assert c1 / c2 == pytest.approx(2.5**2)


def test_bad_paddle_inputs():
    with pytest.raises(CircuitError):
        PaddlePair(w=0.0, s=1.0)
    with pytest.raises(CircuitError):
        paddle_capacitance(PaddlePair(w=0.3, s=1.0), mode="quadratic")
    with pytest.raises(CircuitError):
        paddle_capacitance(PaddlePair(w=0.3, s=1.0), mode="cubic")


def test_two_node_matrix_and_inverse():
    p = TwoQubitCircuit(C1_fF=60.0, C2_fF=80.0, C_Q_fF=2.0)
    net = p.build()
    assert np.allclose(net.C, [[62.0, -2.0], [-2.0, 82.0]])
    d = 60.0 * 80.0 + 60.0 * 2.0 + 80.0 * 2.0
    cinv = np.linalg.inv(net.C)
    assert cinv[0, 1] == pytest.approx(2.0 / d)
    assert cinv[0, 0] == pytest.approx((80.0 + 2.0) / d)


def test_uncoupled_network_block_diagonal():
    net = TwoQubitCircuit(C_Q_fF=0.0).build()
    assert net.C[0, 1] == 0.0
    cinv = np.linalg.inv(net.C)
    assert cinv[0, 1] == 0.0


def test_three_node_matrix_from_lagrangian():
    p = TwoQubitCircuit(C1_fF=70.0, C2_fF=70.0, C_Q_fF=1.0, cavity_enabled=True,
                        cavity_C_fF=500.0, cavity_C0_fF=5.0)
    net = p.build()
    expected = np.array(
        [
            [70.0 + 1.0 + 5.0, -1.0, -5.0],
            [-1.0, 70.0 + 1.0 + 5.0, -5.0],
            [-5.0, -5.0, 500.0 + 10.0],
        ]
    )
    assert np.allclose(net.C, expected)


def test_network_validation():
    with pytest.raises(CircuitError):
        CircuitNetwork(C=np.array([[1.0, 2.0], [2.0, 1.0]]), Linv=np.ones(2), labels=("q1", "q2"))
    with pytest.raises(CircuitError):
        build_network(TwoQubitCircuit(L1_nH=-1.0, C_Q_fF=1.0))


def test_decoupled_mode_frequencies():
    net = TwoQubitCircuit(C1_fF=70.0, C2_fF=100.0, L1_nH=10.0, L2_nH=8.0, C_Q_fF=0.0).build()
    freqs = normal_modes(net)
    expected = sorted(
        1.0e3 / (2.0 * math.pi * math.sqrt(l * c)) for l, c in ((10.0, 70.0), (8.0, 100.0))
    )
    assert freqs == pytest.approx(expected, rel=1e-12)
    # representative transmon values sit in the GHz band
    assert 4.0 < freqs[0] < 8.0


def test_modes_invariant_under_relabeling():
    p = TwoQubitCircuit(C1_fF=60.0, C2_fF=80.0, L1_nH=9.0, L2_nH=11.0, C_Q_fF=2.0)
    net = p.build()
    perm = [1, 0]
    c2 = net.C[np.ix_(perm, perm)]
    linv2 = np.diag(net.Linv)[perm]
    net2 = CircuitNetwork(C=c2, Linv=linv2, labels=("q2", "q1"))
    assert normal_modes(net) == pytest.approx(normal_modes(net2), rel=1e-12)


def test_weak_coupling_splitting_equals_two_lambda():
    p = TwoQubitCircuit(C1_fF=70.0, C2_fF=70.0, L1_nH=10.0, L2_nH=10.0, C_Q_fF=0.07)
    net = p.build()
    freqs = normal_modes(net)
    split = (freqs[1] - freqs[0]) * 1e3  # 2pi MHz
    lam = quantize(net).lam_2piMHz[0, 1]
    assert split == pytest.approx(2.0 * lam, rel=5e-3)


def test_quantize_symmetry_and_linearity():
    base = dict(C1_fF=70.0, C2_fF=70.0, L1_nH=10.0, L2_nH=10.0)
    q1 = quantize(TwoQubitCircuit(C_Q_fF=0.05, **base).build())
    q2 = quantize(TwoQubitCircuit(C_Q_fF=0.10, **base).build())
    assert q1.q_zpf[0] == pytest.approx(q1.q_zpf[1], rel=1e-12)
    assert q2.lam_2piMHz[0, 1] == pytest.approx(2.0 * q1.lam_2piMHz[0, 1], rel=2e-3)


def test_zpf_consistency_identity():
    net = TwoQubitCircuit(C_Q_fF=1.0).build()
    q = quantize(net)
    cinv = np.linalg.inv(net.C)
    for j in range(2):
        omega = q.mode_freqs_2piGHz[j] * 2.0 * math.pi * 1.0e9
        c_eff = 1.0 / cinv[j, j] * 1.0e-15
        alpha = 1.0e-9 / net.Linv[j, j]
        assert q.q_zpf[j] * q.phi_zpf[j] == pytest.approx(
            HBAR * omega * math.sqrt(c_eff * alpha) / 2.0, rel=1e-12
        )


def test_lambda_block_matches_network_modes_and_pt():
    # local modes + exchange couplings reproduce the exact network modes;
    # within that block, second-order perturbation theory captures the
    # dispersive repulsion to O(lambda^3 / Delta^2)
    p = TwoQubitCircuit(
        C_Q_fF=0.0, L1_nH=9.0, L2_nH=11.0, cavity_enabled=True,
        cavity_C0_fF=3.0, cavity_L_nH=2.0264,
    )
    net = p.build()
    freqs = np.sort(normal_modes(net)) * 1e3
    q = quantize(net)
    cinv = np.linalg.inv(net.C)
    c_eff = 1.0 / np.diag(cinv) * 1e-15
    alpha = 1e-9 / np.diag(net.Linv)
    om_loc = 1.0 / np.sqrt(alpha * c_eff) / (2 * np.pi * 1e6)
    block = np.diag(om_loc) + q.lam_2piMHz
    exact = np.sort(np.linalg.eigvalsh(block))
    assert np.abs(exact - freqs).max() < 1.0  # 2pi MHz, RWA-level agreement
    for i in range(3):
        pt = om_loc[i] + sum(
            q.lam_2piMHz[i, j] ** 2 / (om_loc[i] - om_loc[j]) for j in range(3) if j != i
        )
        k = int(np.argmin(np.abs(exact - om_loc[i])))
        lam_max = np.abs(q.lam_2piMHz[i]).max()
        delta_min = min(abs(om_loc[i] - om_loc[j]) for j in range(3) if j != i)
        assert abs(pt - exact[k]) < 5.0 * lam_max**3 / delta_min**2


def test_extract_coupling_zero_without_coupling():
    p = TwoQubitCircuit(C_Q_fF=0.0, L2_nH=10.0)
    j, l1 = extract_coupling(lambda l: p.build(L1_nH=l), (8.0, 12.0))
    assert abs(j) < 1e-3
    assert l1 == pytest.approx(10.0, abs=0.05)


def test_extract_coupling_matches_lambda_weak():
    # avoided-crossing gap = 2 lambda within 2% for C_Q/C1 <= 0.01
    p = TwoQubitCircuit(C1_fF=70.0, C2_fF=70.0, C_Q_fF=0.7, L2_nH=10.0)
    j, l1_star = extract_coupling(lambda l: p.build(L1_nH=l), (9.0, 11.0))
    lam = quantize(p.build(L1_nH=l1_star)).lam_2piMHz[0, 1]
    assert j == pytest.approx(lam, rel=0.02)
    assert j > 0  # lower mode antisymmetric for positive coupling capacitance


def test_extract_coupling_matches_dispersive_formula():
    # J = lambda_12 + lambda_1R lambda_2R / (2 Delta) within 5% in the
    # dispersive regime |lambda/Delta| <= 0.05
    p = TwoQubitCircuit(
        C1_fF=70.0, C2_fF=70.0, C_Q_fF=0.7, L2_nH=10.0,
        cavity_enabled=True, cavity_C0_fF=2.0, cavity_L_nH=2.0264,
    )
    j, l1_star = extract_coupling(lambda l: p.build(L1_nH=l), (9.0, 11.0))
    q = quantize(p.build(L1_nH=l1_star))
    eff = effective_coupling(q)
    assert np.abs(eff.epsilon).max() <= 0.05
    assert j == pytest.approx(eff.J_2piMHz, rel=0.05)


def test_extract_coupling_continuity_and_symmetry():
    vals = []
    for cq in (0.4, 0.5):
        p = TwoQubitCircuit(C_Q_fF=cq, L2_nH=10.0)
        j, _ = extract_coupling(lambda l: p.build(L1_nH=l), (9.0, 11.0))
        vals.append(j)
    assert abs(vals[1] - vals[0]) < 0.5 * abs(vals[0])  # no jump under small change
    # sweeping either qubit through the same crossing gives the same J
    p = TwoQubitCircuit(C1_fF=75.0, C2_fF=65.0, C_Q_fF=0.5, L2_nH=10.0)
    j_a, l1_star = extract_coupling(lambda l: p.build(L1_nH=l), (8.0, 12.0))
    p_sw = TwoQubitCircuit(C1_fF=65.0, C2_fF=75.0, C_Q_fF=0.5, L2_nH=l1_star)
    j_b, l2_star = extract_coupling(lambda l: p_sw.build(L1_nH=l), (8.0, 12.0))
    assert l2_star == pytest.approx(10.0, abs=0.01)
    assert j_a == pytest.approx(j_b, rel=2e-3)


def test_extract_coupling_requires_interior_minimum():
    p = TwoQubitCircuit(C_Q_fF=0.5, L2_nH=10.0)
    with pytest.raises(CircuitError):
        extract_coupling(lambda l: p.build(L1_nH=l), (15.0, 20.0))


def test_pad_reduction_signs():
    # side-by-side parallel dipoles couple positively (like pads closest),
    # collinear negatively, in the quantized-Hamiltonian convention
    _, _, cq_side = reduce_dipole_pads((0, 0), (1.0, 0.0), 0.6, 4.0)
    _, _, cq_col = reduce_dipole_pads((0, 0), (0.0, 1.5), 0.6, 4.0)
    assert cq_side > 0
    assert cq_col < 0
    with pytest.raises(CircuitError):
        reduce_dipole_pads((0, 0), (0.0, 0.6), 0.6, 4.0)  # pads touch


def test_effective_coupling_trivial_limits():
    p = TwoQubitCircuit(C_Q_fF=1.0)
    eff = effective_coupling(quantize(p.build()))
    assert eff.J_2piMHz == pytest.approx(quantize(p.build()).lam_2piMHz[0, 1])
    assert np.all(eff.epsilon == 0.0)
    pc = TwoQubitCircuit(C_Q_fF=1.0, cavity_enabled=True, cavity_C0_fF=2.0, cavity_L_nH=2.0264)
    q = quantize(pc.build())
    with pytest.raises(CircuitError):
        effective_coupling(q, detunings_2piMHz=np.array([0.0, 100.0]))
    with pytest.warns(UserWarning):
        effective_coupling(q, detunings_2piMHz=np.array([10.0, 10.0]))


def test_angle_sweep_sign_change_near_40_degrees():
    p = TwoQubitCircuit(cavity_enabled=True)
    ang, vals = circuit_angle_sweep(p, r_mm=1.5, angles=np.radians(np.linspace(20, 60, 41)))
    signs = np.sign(vals)
    changes = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    assert changes.size == 1
    k = changes[0]
    t = vals[k] / (vals[k] - vals[k + 1])
    zero_deg = math.degrees(ang[k]) + t * (math.degrees(ang[k + 1]) - math.degrees(ang[k]))
    assert 35.0 < zero_deg < 45.0
    assert vals[0] > 0  # side-by-side-ish positive in the lambda convention


def test_map_straight_line_without_cavity():
    p = TwoQubitCircuit()
    m = circuit_coupling_map(p, x_range=(0.4, 4.0), y_range=(0.4, 4.0), resolution=61)
    pts = m.contour
    assert pts.shape[0] > 20
    slope, icpt = np.polyfit(pts[:, 0], pts[:, 1], 1)
    cell = (4.0 - 0.4) / 60
    resid = np.abs(pts[:, 1] - (slope * pts[:, 0] + icpt))
    assert resid.max() < cell


def test_map_cutline_double_suppression_with_cavity():
    pc = TwoQubitCircuit(cavity_enabled=True)
    m = circuit_coupling_map(pc, x_range=(0.35, 6.0), y_range=(0.9, 1.1), resolution=121)
    assert cut_sign_changes(m, 1.0) == 2
    p0 = TwoQubitCircuit()
    m0 = circuit_coupling_map(p0, x_range=(0.35, 6.0), y_range=(0.9, 1.1), resolution=121)
    assert cut_sign_changes(m0, 1.0) == 1
