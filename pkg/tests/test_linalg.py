import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpb import linalg as L

X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)
KET0 = np.array([1, 0], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def test_kron_examples():
    assert np.allclose(L.kron(I2, I2), np.eye(4))
    assert np.allclose(L.kron(np.diag([1, 0]), np.diag([1, 0])), np.diag([1, 0, 0, 0]))
    xx = L.kron(X, X)
    rho00 = np.diag([1, 0, 0, 0]).astype(complex)
    assert np.allclose(xx @ rho00 @ xx, np.diag([0, 0, 0, 1]))


def test_num_qubits_rejects_non_power_of_two():
    assert L.num_qubits(np.eye(8)) == 3
    with pytest.raises(ValueError):
        L.num_qubits(np.eye(6))


def test_check_density_rejects_bad_input():
    with pytest.raises(ValueError):
        L.check_density(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        L.check_density(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        L.check_density(np.array([[0.5, 0.5], [0.0, 0.5]]))
    assert L.is_density_matrix(np.eye(2) / 2)


class TestPartialTrace:
    def test_product_state(self):
        assert np.allclose(L.partial_trace(proj([1, 0, 0, 0]), [0]), proj(KET0))

    def test_ghz_marginal(self):
        theta = 0.3
        psi = np.zeros(16, dtype=complex)
        psi[0], psi[15] = math.cos(theta), math.sin(theta)
        red = L.partial_trace(proj(psi), [0])
        assert np.allclose(red, np.diag([math.cos(theta) ** 2, math.sin(theta) ** 2]))

    def test_keep_order_is_ascending(self):
        rng = np.random.default_rng(1)
        a, b = L.random_density_matrix(2, rng), L.random_density_matrix(2, rng)
        ab = L.kron(a, b)
        assert np.allclose(L.partial_trace(ab, [1, 0]), ab)
        assert np.allclose(L.partial_trace(ab, [1]), b)

    def test_matches_einsum_route(self):
        rng = np.random.default_rng(2)
        rho = L.random_density_matrix(8, rng)
        t = rho.reshape([2] * 6)
        ref = np.einsum("abcdbf->acdf", t).reshape(4, 4)
        assert np.allclose(L.partial_trace(rho, [0, 2]), ref)

    @pytest.mark.parametrize("keep", [[], [3], [-1]])
    def test_bad_keep(self, keep):
        with pytest.raises(ValueError):
            L.partial_trace(np.eye(4) / 4, keep)


def test_dephase_and_purity_examples():
    assert np.allclose(L.dephase(np.diag([0.3, 0.7])), np.diag([0.3, 0.7]))
    assert np.allclose(L.dephase(proj(PLUS)), I2 / 2)
    assert L.purity(np.eye(4) / 4) == pytest.approx(0.25)
    assert L.purity(proj(PLUS)) == pytest.approx(1.0)
    assert L.purity(np.diag([0.75, 0.25])) == pytest.approx(0.625)


def test_round_robin_covers_every_pair_once():
    for n in range(2, 12):
        seen = []
        for p, q in L._round_robin(n):
            assert len(set(p) | set(q)) == 2 * len(p)
            seen += list(zip(p.tolist(), q.tolist()))
        assert sorted(seen) == [(i, j) for i in range(n) for j in range(i + 1, n)]


class TestEigen:
    def test_examples(self):
        assert np.allclose(L.hermitian_eigenvalues(np.diag([0.2, 0.5, 0.3])), [0.5, 0.3, 0.2])
        assert np.allclose(L.hermitian_eigenvalues(proj(PLUS)), [1, 0], atol=1e-12)

    def test_small_asymmetry_accepted(self):
        m = np.array([[0.5, 0.5 + 1e-12], [0.5, 0.5]])
        assert np.allclose(L.hermitian_eigenvalues(m), [1, 0], atol=1e-10)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            L.hermitian_eigenvalues(np.array([[0, 1], [0, 0]], dtype=complex))

    @pytest.mark.parametrize("d", [2, 3, 5, 8, 16, 32])
    def test_against_lapack(self, d):
        rng = np.random.default_rng(d)
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = g + g.conj().T
        w, v = L.hermitian_eigh(h)
        assert np.all(np.diff(w) <= 1e-12)
        assert np.allclose(w, np.linalg.eigvalsh(h)[::-1], atol=1e-10)
        assert np.allclose(v.conj().T @ v, np.eye(d), atol=1e-10)
        assert np.allclose((v * w) @ v.conj().T, h, atol=1e-10)

    def test_degenerate_spectrum(self):
        rng = np.random.default_rng(5)
        q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
        h = (q * np.array([1, 1, 1, 0, 0, -2.0])) @ q.conj().T
        assert np.allclose(L.hermitian_eigenvalues(h), [1, 1, 1, 0, 0, -2], atol=1e-10)


def test_entropy_examples():
    assert L.von_neumann_entropy(I2 / 2) == pytest.approx(1.0)
    assert L.von_neumann_entropy(proj(PLUS)) == pytest.approx(0.0, abs=1e-12)
    assert L.von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(0.811278, abs=1e-6)
    assert L.entropy_of_spectrum([1.0, 0.0, 0.0]) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 16), st.integers(0, 2**32 - 1))
def test_entropy_is_unitarily_invariant_and_bounded(d, seed):
    rng = np.random.default_rng(seed)
    rho = L.random_density_matrix(d, rng)
    q, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    s = L.von_neumann_entropy(rho)
    assert s == pytest.approx(L.von_neumann_entropy(q @ rho @ q.conj().T), abs=1e-9)
    assert -1e-12 <= s <= math.log2(d) + 1e-12


class TestProjection:
    def test_valid_state_is_fixed(self):
        rng = np.random.default_rng(3)
        rho = L.random_density_matrix(4, rng)
        assert np.allclose(L.project_to_density(rho), rho, atol=1e-12)

    def test_examples(self):
        assert np.allclose(L.project_to_density(np.diag([1.2, -0.2])), np.diag([1, 0]))
        out = L.project_to_density(np.diag([0.6, 0.6, -0.2]).astype(complex))
        assert np.allclose(out, np.diag([0.5, 0.5, 0]))

    def test_zero_trace_rejected(self):
        with pytest.raises(ValueError):
            L.project_to_density(np.diag([1.0, -1.0]))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 8), st.integers(0, 2**32 - 1), st.floats(0.01, 0.5))
    def test_output_is_a_state(self, d, seed, noise):
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        m = L.random_density_matrix(d, rng) + noise * (g + g.conj().T)
        if abs(np.trace(m).real) < 0.1 or np.trace(m).real < 0:
            return
        assert L.is_density_matrix(L.project_to_density(m))


def test_fidelity_with_pure():
    assert L.fidelity_with_pure(proj(PLUS), PLUS) == pytest.approx(1.0)
    assert L.fidelity_with_pure(I2 / 2, KET0) == pytest.approx(0.5)
