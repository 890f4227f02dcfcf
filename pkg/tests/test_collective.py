import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpb import collective as col
from qpb.linalg import dephase, partial_trace, purity, random_density_matrix
from qpb.states import bell_pair, product_psi2


def swap_expectation(rho):
    # Tr(V rho (x) rho) built directly from the swap operator on 2 x 2 qubits
    d = rho.shape[0]
    big = np.kron(rho, rho)
    v = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            v[j * d + i, i * d + j] = 1
    return np.trace(v @ big).real


def test_bell_vectors_orthonormal_with_swap_signs():
    b = col.BELL_VECTORS
    assert np.allclose(b @ b.conj().T, np.eye(4))
    swap = np.eye(4)[[0, 2, 1, 3]]
    for vec, sign in zip(b, col.SWAP_SIGN):
        assert np.allclose(swap @ vec, sign * vec)


def test_probability_examples():
    t = col.bell_probabilities(np.diag([1, 0, 0, 0]).astype(complex))
    expect = np.zeros((4, 4))
    expect[2:, 2:] = 0.25
    assert np.allclose(t.probs, expect)
    q = np.array([0.5, 0, 0.5, 0])
    assert np.allclose(col.bell_probabilities(product_psi2(math.pi / 4)).probs, np.outer(q, q))
    rho = random_density_matrix(4, np.random.default_rng(1))
    assert col.bell_probabilities(rho).probs.sum() == pytest.approx(1.0)


def test_rejects_wrong_size():
    with pytest.raises(ValueError):
        col.bell_probabilities(np.eye(8) / 8)


class TestPurityFormulas:
    def test_pure_product_family(self):
        for theta in np.linspace(0, math.pi / 2, 11):
            t = col.bell_probabilities(product_psi2(theta))
            assert col.purity_from_counts(t) == pytest.approx(1.0, abs=1e-12)
            assert col.marginal_purity_from_counts(t) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        t = col.bell_probabilities(np.eye(4) / 4)
        assert col.purity_from_counts(t) == pytest.approx(0.25)
        assert col.marginal_purity_from_counts(t, 2) == pytest.approx(0.5)

    def test_bell_pair_marginal(self):
        t = col.bell_probabilities(bell_pair())
        assert col.marginal_purity_from_counts(t, 2) == pytest.approx(0.5)
        assert col.purity_from_counts(t) == pytest.approx(1.0)

    def test_diagonal_examples(self):
        t = col.bell_probabilities(product_psi2(math.pi / 8))
        assert col.diagonal_purity_from_counts(t, "product") == pytest.approx(0.5625)
        assert col.diagonal_purity_from_counts(t, "general") == pytest.approx(0.5625)
        t = col.bell_probabilities(product_psi2(0.0))
        assert col.diagonal_purity_from_counts(t, "product") == pytest.approx(1.0)
        assert col.diagonal_purity_from_counts(t, "general") == pytest.approx(1.0)
        t = col.bell_probabilities(product_psi2(math.pi / 4))
        assert col.diagonal_purity_from_counts(t, "product") == pytest.approx(0.25)
        assert col.diagonal_purity_from_counts(t, "general") == pytest.approx(0.25)

    def test_product_mode_differs_off_family(self):
        t = col.bell_probabilities(bell_pair())
        assert col.diagonal_purity_from_counts(t, "general") == pytest.approx(0.5)
        assert col.diagonal_purity_from_counts(t, "product") != pytest.approx(0.5)

    def test_bad_arguments(self):
        t = col.bell_probabilities(np.eye(4) / 4)
        with pytest.raises(ValueError):
            col.marginal_purity_from_counts(t, 3)
        with pytest.raises(ValueError):
            col.diagonal_purity_from_counts(t, "other")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_formulas_agree_with_swap_operator(seed):
    rho = random_density_matrix(4, np.random.default_rng(seed))
    t = col.bell_probabilities(rho)
    assert col.purity_from_counts(t) == pytest.approx(swap_expectation(rho), abs=1e-10)
    assert col.purity_from_counts(t) == pytest.approx(purity(rho), abs=1e-10)
    assert col.marginal_purity_from_counts(t, 1) == pytest.approx(purity(partial_trace(rho, [0])), abs=1e-10)
    assert col.diagonal_purity_from_counts(t) == pytest.approx(purity(dephase(rho)), abs=1e-10)


def test_two_different_copies_give_overlap():
    rng = np.random.default_rng(8)
    a, b = random_density_matrix(4, rng), random_density_matrix(4, rng)
    t = col.bell_probabilities(a, b)
    assert col.purity_from_counts(t) == pytest.approx(np.trace(a @ b).real, abs=1e-10)


class TestSampling:
    def test_deterministic_cell(self):
        probs = np.zeros((4, 4))
        probs[1, 2] = 1
        t = col.sample_counts(col.BellOutcomeTable(probs), 1000, 0)
        assert t.counts[1, 2] == 1000 and t.shots == 1000

    def test_uniform_within_five_sigma(self):
        t = col.sample_counts(col.BellOutcomeTable(np.full((4, 4), 1 / 16)), 100_000, 5)
        sigma = math.sqrt(100_000 / 16 * (15 / 16))
        assert np.all(np.abs(t.counts - 6250) < 5 * sigma)

    def test_reproducible(self):
        base = col.bell_probabilities(product_psi2(0.3))
        a = col.sample_counts(base, 5000, 42)
        b = col.sample_counts(base, 5000, 42)
        assert np.array_equal(a.counts, b.counts)

    def test_sampled_purity(self):
        t = col.sample_counts(col.bell_probabilities(product_psi2(math.pi / 8)), 100_000, 1)
        assert abs(col.purity_from_counts(t) - 1.0) < 0.01

    def test_zero_shots_rejected(self):
        with pytest.raises(ValueError):
            col.sample_counts(col.bell_probabilities(np.eye(4) / 4), 0, 0)


def test_counts_round_trip():
    t = col.sample_counts(col.bell_probabilities(bell_pair()), 777, 3)
    buf = io.StringIO()
    col.write_counts(t, buf, seed=3, theta=0.5)
    back = col.read_counts(buf.getvalue().splitlines())
    assert np.array_equal(back.counts, t.counts) and back.shots == 777
