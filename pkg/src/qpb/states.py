"""State families, the white-noise channel and exact reference quantities.

Photonic labels map to qubits as H, h -> |0> and V, v -> |1>. The GHZ family
uses the qubit order (1, 1', 2, 2'); its subsystems are named by those labels
on the command line, with ``p`` standing for the prime (``1p`` is 1').
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from qpb.linalg import check_density, dephase, num_qubits, partial_trace, von_neumann_entropy

ANGLE_TOL = 1e-12

GHZ_LABELS = ("1", "1p", "2", "2p")
PSI2_LABELS = ("1", "2")


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not (-ANGLE_TOL <= theta <= math.pi / 2 + ANGLE_TOL):
        raise ValueError(f"theta={theta} outside [0, pi/2]")
    return theta


def ghz_theta_vector(theta: float) -> np.ndarray:
    theta = _check_theta(theta)
    psi = np.zeros(16, dtype=complex)
    psi[0] = math.cos(theta)
    psi[15] = math.sin(theta)
    return psi


def ghz_theta(theta: float) -> np.ndarray:
    """cos(theta)|0000> + sin(theta)|1111> as a 16x16 projector."""
    psi = ghz_theta_vector(theta)
    return np.outer(psi, psi.conj())


def psi2_vector(theta: float) -> np.ndarray:
    theta = _check_theta(theta)
    one = np.array([math.cos(theta), math.sin(theta)], dtype=complex)
    return np.kron(one, one)


def product_psi2(theta: float) -> np.ndarray:
    """(cos(theta)|0> + sin(theta)|1>) on each of two qubits."""
    psi = psi2_vector(theta)
    return np.outer(psi, psi.conj())


def bell_pair() -> np.ndarray:
    """|Phi+><Phi+| = (|00> + |11>)(<00| + <11|)/2."""
    psi = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    return np.outer(psi, psi.conj())


def depolarize(rho: np.ndarray, p: float) -> np.ndarray:
    """(1 - p) rho + p I/d."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise probability {p} outside [0, 1]")
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return (1.0 - p) * rho + p * np.eye(d) / d


def parse_subsystem(text: str | Iterable[str], labels: Sequence[str] = GHZ_LABELS) -> tuple[int, ...]:
    """Map labels such as ``"1,1p,2"`` to sorted qubit indices.

    A trailing apostrophe is accepted in place of ``p``.
    """
    if isinstance(text, str):
        parts = [s.strip() for s in text.split(",") if s.strip()]
    else:
        parts = [str(s).strip() for s in text]
    lookup = {lab: i for i, lab in enumerate(labels)}
    out = set()
    for part in parts:
        key = part.replace("'", "p")
        if key not in lookup:
            raise ValueError(f"unknown subsystem label {part!r}; expected one of {list(labels)}")
        out.add(lookup[key])
    if not out:
        raise ValueError("empty subsystem")
    return tuple(sorted(out))


def format_subsystem(qubits: Iterable[int], labels: Sequence[str] = GHZ_LABELS) -> str:
    return ",".join(labels[q] for q in sorted(qubits))


def coherent_info_exact(rho: np.ndarray, B: Iterable[int]) -> float:
    """I(A>B) = S(rho_B) - S(rho_AB) in bits, for B a nonempty proper qubit subset."""
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho)
    B = sorted(set(int(q) for q in B))
    if not B or len(B) >= n or B[0] < 0 or B[-1] >= n:
        raise ValueError(f"B={B} is not a nonempty proper subset of {n} qubits")
    return von_neumann_entropy(partial_trace(rho, B)) - von_neumann_entropy(rho)


def c_re_exact(rho: np.ndarray) -> float:
    """Relative entropy of coherence S(rho_d) - S(rho) in the computational basis."""
    rho = np.asarray(rho, dtype=complex)
    return max(von_neumann_entropy(dephase(rho)) - von_neumann_entropy(rho), 0.0)


def multi_info_exact(rho: np.ndarray, parties: Sequence[Iterable[int]]) -> float:
    """sum_i S(rho_{A_i}) - S(rho) for a partition of the qubits into ``parties``."""
    rho = check_density(rho)
    return sum(von_neumann_entropy(partial_trace(rho, list(p))) for p in parties) - (
        von_neumann_entropy(rho)
    )
