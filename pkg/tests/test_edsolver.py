import numpy as np
import pytest
import scipy.sparse as sp

from dipsim.edsolver import EigenResult, ground_state, low_spectrum
from dipsim.hamiltonian import build_ladder_hamiltonian, mg_product_state, sector_basis


def test_two_level_ground_state():
    j = 1.7
    h = sp.csr_matrix(np.array([[0.0, j], [j, 0.0]]))
    res = ground_state(h)
    assert res.ground_energy == pytest.approx(-j)
    target = np.array([1.0, -1.0]) / np.sqrt(2.0)
    assert abs(np.vdot(res.ground_state, target)) == pytest.approx(1.0)


def test_identity_is_degenerate():
    h = sp.identity(8, format="csr") * 2.5
    res = ground_state(h)
    assert res.ground_energy == pytest.approx(2.5)
    assert res.degenerate


def test_ladder_matches_dense_oracle():
    h = build_ladder_hamiltonian(8, 1.0, 0.5, sector=4)
    res = ground_state(h)
    w = np.linalg.eigvalsh(h.toarray())
    assert abs(res.ground_energy - w[0]) < 1e-10


def test_low_spectrum_two_site():
    h = build_ladder_hamiltonian(2, 1.0, 0.0, sector=1)
    res = low_spectrum(h, 2)
    assert res.values == pytest.approx([-1.0, 1.0])


def test_full_spectrum_trace_identity():
    h = build_ladder_hamiltonian(6, 1.0, 0.4, fields=[0.3, -0.1, 0.2, 0.0, -0.4, 0.1], sector=3)
    res = low_spectrum(h, h.shape[0])
    assert res.values.sum() == pytest.approx(h.diagonal().sum(), abs=1e-9)


def test_dimer_point_is_gapped():
    h = build_ladder_hamiltonian(10, 1.0, 0.5, sector=5)
    res = low_spectrum(h, 2)
    w = np.linalg.eigvalsh(h.toarray())
    assert np.allclose(res.values, w[:2], atol=1e-10)
    gap = res.values[1] - res.values[0]
    assert gap == pytest.approx(0.449004, abs=1e-4)
    assert gap > 0.4


def test_lanczos_matches_dense_on_random_hermitian():
    rng = np.random.default_rng(23)
    for dim in (600, 1000):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a = (a + a.conj().T) / 2.0
        # sparsify to a banded-ish structure so ARPACK has work to do
        mask = np.abs(np.arange(dim)[:, None] - np.arange(dim)[None, :]) < 8
        h = sp.csr_matrix(a * mask)
        h = (h + h.conj().T) / 2.0
        res = low_spectrum(h, 4)
        w = np.linalg.eigvalsh(h.toarray())
        assert np.allclose(res.values, w[:4], atol=1e-9)
        gram = res.vectors.conj().T @ res.vectors
        assert np.allclose(gram, np.eye(4), atol=1e-10)


def test_values_monotone_and_residuals_small():
    h = build_ladder_hamiltonian(8, 1.0, 0.3, sector=4)
    res = low_spectrum(h, 6)
    assert np.all(np.diff(res.values) >= -1e-12)
    assert res.residuals.max() < 1e-9


def test_variational_bound_of_product_states():
    for ratio in (0.3, 0.5, 0.7):
        h = build_ladder_hamiltonian(8, 1.0, ratio, sector=4)
        e0 = ground_state(h).ground_energy
        mg = mg_product_state(8, "singlet")
        assert np.real(np.vdot(mg, h @ mg)) >= e0 - 1e-12
        # Neel state |up down up down ...>
        basis = sector_basis(8, 4)
        neel = np.zeros(basis.size)
        neel_state = sum(1 << j for j in range(0, 8, 2))
        neel[np.searchsorted(basis, neel_state)] = 1.0
        assert np.real(np.vdot(neel, h @ neel)) >= e0 - 1e-12


def test_lanczos_run_is_deterministic():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(700, 700))
    mask = np.abs(np.arange(700)[:, None] - np.arange(700)[None, :]) < 5
    h = sp.csr_matrix((a + a.T) * mask)
    h = (h + h.T) / 2.0
    r1 = ground_state(h)
    r2 = ground_state(h)
    assert r1.ground_energy == r2.ground_energy
    assert np.array_equal(r1.ground_state, r2.ground_state)


def test_bad_k():
    h = sp.identity(4, format="csr")
    with pytest.raises(ValueError):
        low_spectrum(h, 0)
    with pytest.raises(ValueError):
        low_spectrum(h, 5)
