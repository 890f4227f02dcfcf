import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpb import states as S
from qpb.linalg import dephase, partial_trace, purity, random_density_matrix


def h2(x):
    return -sum(t * math.log2(t) for t in (x, 1 - x) if t > 0)


def test_ghz_endpoints_and_marginals():
    rho = S.ghz_theta(0.0)
    assert rho[0, 0] == pytest.approx(1.0) and purity(rho) == pytest.approx(1.0)
    bal = S.ghz_theta(math.pi / 4)
    for q in range(4):
        assert purity(partial_trace(bal, [q])) == pytest.approx(0.5)
    t = 3 * math.pi / 20
    assert purity(partial_trace(S.ghz_theta(t), [0])) == pytest.approx(
        math.cos(t) ** 4 + math.sin(t) ** 4)
    assert purity(partial_trace(S.ghz_theta(t), [0])) == pytest.approx(0.672746, abs=1e-6)


def test_ghz_dephased_has_two_entries():
    t = 0.4
    d = np.diag(dephase(S.ghz_theta(t))).real
    assert np.count_nonzero(d > 1e-15) == 2
    assert d[0] == pytest.approx(math.cos(t) ** 2) and d[15] == pytest.approx(math.sin(t) ** 2)


def test_theta_range_checked():
    with pytest.raises(ValueError):
        S.ghz_theta(2.0)
    with pytest.raises(ValueError):
        S.product_psi2(-0.1)


def test_product_psi2():
    assert S.product_psi2(0.0)[0, 0] == pytest.approx(1.0)
    pp = S.product_psi2(math.pi / 4)
    assert np.allclose(pp, np.full((4, 4), 0.25))
    assert S.c_re_exact(pp) == pytest.approx(2.0)
    assert purity(dephase(S.product_psi2(math.pi / 8))) == pytest.approx(0.5625)


def test_depolarize():
    rho = S.ghz_theta(math.pi / 4)
    assert np.allclose(S.depolarize(rho, 0.0), rho)
    assert np.allclose(S.depolarize(rho, 1.0), np.eye(16) / 16)
    # (1-p)^2 + (2p(1-p) + p^2)/16 for a pure input
    assert purity(S.depolarize(rho, 0.1)) == pytest.approx(0.821875, abs=1e-12)
    with pytest.raises(ValueError):
        S.depolarize(rho, 1.5)


@pytest.mark.parametrize(
    "text, qubits",
    [("1", (0,)), ("1,1p", (0, 1)), ("1,1p,2", (0, 1, 2)), ("2p,1", (0, 3)), ("1'", (1,))],
)
def test_parse_subsystem(text, qubits):
    assert S.parse_subsystem(text) == qubits
    assert S.parse_subsystem(S.format_subsystem(qubits)) == qubits


@pytest.mark.parametrize("text", ["", "3", "1,x"])
def test_parse_subsystem_rejects(text):
    with pytest.raises(ValueError):
        S.parse_subsystem(text)


def test_coherent_info_examples():
    assert S.coherent_info_exact(S.ghz_theta(math.pi / 4), [0]) == pytest.approx(1.0)
    assert S.coherent_info_exact(S.product_psi2(0.3), [1]) == pytest.approx(0.0, abs=1e-9)
    assert S.coherent_info_exact(np.eye(16) / 16, [0, 1]) == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        S.coherent_info_exact(np.eye(4) / 4, [0, 1])


def test_c_re_examples():
    assert S.c_re_exact(np.diag([0.1, 0.2, 0.3, 0.4])) == 0.0
    for t in np.linspace(0, math.pi / 2, 11):
        assert S.c_re_exact(S.ghz_theta(t)) == pytest.approx(h2(math.cos(t) ** 2), abs=1e-9)


def test_bell_pair():
    rho = S.bell_pair()
    assert purity(rho) == pytest.approx(1.0)
    assert np.allclose(partial_trace(rho, [1]), np.eye(2) / 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_multi_info_nonnegative_and_zero_on_products(seed):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(8, rng)
    assert S.multi_info_exact(rho, [[0], [1], [2]]) >= -1e-9
    a, b = random_density_matrix(2, rng), random_density_matrix(4, rng)
    assert S.multi_info_exact(np.kron(a, b), [[0], [1, 2]]) == pytest.approx(0.0, abs=1e-9)
