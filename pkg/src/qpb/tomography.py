"""Pauli-basis state tomography: linear inversion followed by physical projection.

A setting assigns X, Y or Z to every qubit; there are 3^n of them. Outcome bit
0 is the +1 eigenvalue. The expectation of a Pauli string is estimated from
every setting that agrees with it on its non-identity qubits, and those
estimates are averaged with equal weight.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from qpb.linalg import kron_all, num_qubits, project_to_density
from qpb.rng import check_seed, stream

PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
# rows are the measurement eigenvectors: row b is the outcome-b state
_BASIS = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "Y": np.array([[1, 1j], [1, -1j]], dtype=complex) / np.sqrt(2),
    "Z": np.eye(2, dtype=complex),
}


def settings(n: int) -> list[str]:
    return ["".join(s) for s in itertools.product("XYZ", repeat=n)]


@dataclass(frozen=True)
class PauliDataset:
    """Outcome frequencies per setting, shape (3^n, 2^n), rows in :func:`settings` order."""

    n: int
    settings: tuple[str, ...]
    frequencies: np.ndarray
    shots_per_setting: int = 0
    counts: np.ndarray | None = None

    def __post_init__(self):
        if self.frequencies.shape != (len(self.settings), 2**self.n):
            raise ValueError("frequency table shape does not match settings")
        if self.counts is not None and np.any(self.counts.sum(axis=1) != self.shots_per_setting):
            raise ValueError("per-setting counts must add up to shots_per_setting")


def setting_probabilities(rho: np.ndarray, setting: str) -> np.ndarray:
    """Born probabilities of the 2^n outcomes for one local Pauli setting."""
    u = kron_all(_BASIS[c] for c in setting)
    return np.clip(np.einsum("ij,jk,ik->i", u.conj(), rho, u).real, 0.0, None)


def exact_pauli_dataset(rho: np.ndarray) -> PauliDataset:
    """Infinite-statistics dataset: frequencies equal the Born probabilities."""
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho)
    labels = settings(n)
    freqs = np.array([setting_probabilities(rho, s) for s in labels])
    return PauliDataset(n, tuple(labels), freqs)


def simulate_pauli_dataset(rho: np.ndarray, shots_per_setting: int, seed: int) -> PauliDataset:
    """Multinomial sampling per setting; setting ``s`` uses stream ``s`` of ``seed``."""
    if shots_per_setting < 1:
        raise ValueError("shots_per_setting must be positive")
    seed = check_seed(seed)
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho)
    labels = settings(n)
    counts = np.empty((len(labels), 2**n), dtype=np.int64)
    for i, s in enumerate(labels):
        p = setting_probabilities(rho, s)
        counts[i] = stream(seed, i).multinomial(shots_per_setting, p / p.sum())
    return PauliDataset(n, tuple(labels), counts / shots_per_setting, shots_per_setting, counts)


def pauli_expectations(data: PauliDataset) -> dict[str, float]:
    """Estimated <P> for all 4^n Pauli strings."""
    n = data.n
    if len(data.settings) != 3**n or set(data.settings) != set(settings(n)):
        raise ValueError("linear inversion needs all 3^n settings")
    row = {s: i for i, s in enumerate(data.settings)}
    bits = (np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)) & 1

    out: dict[str, float] = {}
    for pstr in ("".join(t) for t in itertools.product("IXYZ", repeat=n)):
        support = [q for q, c in enumerate(pstr) if c != "I"]
        if not support:
            out[pstr] = 1.0
            continue
        sign = (-1.0) ** bits[:, support].sum(axis=1)
        free = [q for q in range(n) if q not in support]
        vals = []
        for fill in itertools.product("XYZ", repeat=len(free)):
            s = list(pstr)
            for q, c in zip(free, fill):
                s[q] = c
            vals.append(float(data.frequencies[row["".join(s)]] @ sign))
        out[pstr] = float(np.mean(vals))
    return out


def linear_inversion(data: PauliDataset) -> np.ndarray:
    """rho = 2^-n sum_P <P> P; Hermitian and unit trace but possibly not positive."""
    n = data.n
    rho = np.zeros((2**n, 2**n), dtype=complex)
    for pstr, val in pauli_expectations(data).items():
        rho += val * kron_all(PAULIS[c] for c in pstr)
    return rho / 2**n


def reconstruct(data: PauliDataset) -> np.ndarray:
    """Linear inversion projected onto the set of density matrices."""
    return project_to_density(linear_inversion(data))
