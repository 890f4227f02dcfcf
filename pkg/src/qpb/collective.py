"""Two-copy Bell-state measurements and swap-trick purity estimators.

A two-qubit state on (1, 2) and its copy on (1', 2') are measured pairwise:
one Bell measurement on (1, 1') and one on (2, 2'). Outcome ``i`` indexes the
Bell projectors in the order (Psi+, Psi-, Phi+, Phi-), with
Psi+- = (|01> +- |10>)/sqrt(2) and Phi+- = (|00> +- |11>)/sqrt(2).
Only Psi- is antisymmetric under swapping a qubit with its copy, which is
what turns outcome frequencies into purities.

Arrays here are zero-based: ``p[i, j]`` is the probability written p_{i+1, j+1}
in the usual one-based notation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from qpb.rng import check_seed, stream

PSI_PLUS, PSI_MINUS, PHI_PLUS, PHI_MINUS = range(4)
BELL_NAMES = ("Psi+", "Psi-", "Phi+", "Phi-")

_r = 1.0 / math.sqrt(2.0)
BELL_VECTORS = np.array(
    [
        [0, _r, _r, 0],
        [0, _r, -_r, 0],
        [_r, 0, 0, _r],
        [_r, 0, 0, -_r],
    ],
    dtype=complex,
)
# swap eigenvalue of each Bell state
SWAP_SIGN = np.array([1.0, -1.0, 1.0, 1.0])


@dataclass(frozen=True)
class BellOutcomeTable:
    """Joint Bell outcomes of the (1, 1') and (2, 2') measurements.

    ``probs`` holds exact probabilities or observed frequencies; ``counts``
    and ``shots`` are filled in for sampled tables.
    """

    probs: np.ndarray
    counts: np.ndarray = field(default_factory=lambda: np.zeros((4, 4), dtype=np.int64))
    shots: int = 0

    def __post_init__(self):
        if self.probs.shape != (4, 4) or self.counts.shape != (4, 4):
            raise ValueError("Bell tables are 4x4")
        if int(self.counts.sum()) != self.shots:
            raise ValueError("counts do not add up to shots")

    @classmethod
    def from_counts(cls, counts: np.ndarray) -> "BellOutcomeTable":
        counts = np.asarray(counts, dtype=np.int64)
        shots = int(counts.sum())
        if shots <= 0:
            raise ValueError("no shots recorded")
        return cls(counts / shots, counts, shots)


def _check_two_qubit(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a two-qubit (4x4) state, got shape {rho.shape}")
    return rho


def bell_probabilities(rho: np.ndarray, rho_copy: np.ndarray | None = None) -> BellOutcomeTable:
    """Exact p_ij = Tr[(Pi_i (x) Pi_j) rho (x) rho_copy] with qubits paired as (1,1'), (2,2')."""
    rho = _check_two_qubit(rho)
    rho_copy = rho if rho_copy is None else _check_two_qubit(rho_copy)
    # tensor axes of rho (x) rho_copy: (1, 2, 1', 2') for kets then bras
    t = np.einsum("acbd,ACBD->acACbdBD", rho.reshape(2, 2, 2, 2), rho_copy.reshape(2, 2, 2, 2))
    # reorder factors to (1, 1', 2, 2')
    t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(16, 16)
    bell = BELL_VECTORS.reshape(4, 2, 2)
    basis = np.einsum("iab,jcd->ijabcd", bell, bell).reshape(16, 16)
    probs = np.einsum("ka,ab,kb->k", basis.conj(), t, basis).real.reshape(4, 4)
    probs = np.clip(probs, 0.0, None)
    return BellOutcomeTable(probs / probs.sum())


def sample_counts(table: BellOutcomeTable, shots: int, rng: np.random.Generator | int) -> BellOutcomeTable:
    """Multinomial draw of ``shots`` joint outcomes; ``rng`` may be a seed."""
    if shots < 1:
        raise ValueError("shots must be positive")
    if not isinstance(rng, np.random.Generator):
        rng = stream(check_seed(rng))
    p = table.probs.ravel()
    counts = rng.multinomial(shots, p / p.sum()).reshape(4, 4)
    return BellOutcomeTable(counts / shots, counts.astype(np.int64), shots)


def purity_from_counts(t: BellOutcomeTable) -> float:
    """Tr(rho^2) = 1 - 2 * P(exactly one of the two outcomes is Psi-)."""
    p = t.probs
    one_singlet = p[:, PSI_MINUS].sum() + p[PSI_MINUS, :].sum() - 2 * p[PSI_MINUS, PSI_MINUS]
    return float(1.0 - 2.0 * one_singlet)


def marginal_purity_from_counts(t: BellOutcomeTable, pair: int = 2) -> float:
    """Tr(rho_B^2) for B the single qubit measured in ``pair`` (1 or 2)."""
    p = t.probs
    if pair == 2:
        return float(1.0 - 2.0 * p[:, PSI_MINUS].sum())
    if pair == 1:
        return float(1.0 - 2.0 * p[PSI_MINUS, :].sum())
    raise ValueError(f"pair must be 1 or 2, got {pair}")


def diagonal_purity_from_counts(t: BellOutcomeTable, mode: str = "general") -> float:
    """Purity of the dephased state, sum_z rho_zz^2.

    ``mode="general"`` uses that |00><00| + |11><11| = Pi_Phi+ + Pi_Phi- on
    each pair, so the value is the total weight of the Phi x Phi block; it is
    exact for any input. ``mode="product"`` is the closed form
    1 - 2 p_{Phi+,Phi+} + 2 p_{Phi-,Phi-} - p_{Psi+,Psi+}, which only agrees
    with it on product states cos|0> + sin|1> on each qubit.
    """
    p = t.probs
    mode = mode.lower()
    if mode == "general":
        return float(p[PHI_PLUS:, PHI_PLUS:].sum())
    if mode == "product":
        return float(
            1.0 - 2.0 * p[PHI_PLUS, PHI_PLUS] + 2.0 * p[PHI_MINUS, PHI_MINUS] - p[PSI_PLUS, PSI_PLUS]
        )
    raise ValueError(f"unknown mode {mode!r}; expected 'general' or 'product'")


def write_counts(t: BellOutcomeTable, fh: TextIO, seed: int, theta: float) -> None:
    """CSV dump: ``# shots=.. seed=.. theta=..`` then four rows of four counts."""
    fh.write(f"# shots={t.shots} seed={seed} theta={theta:.6f}\n")
    for row in t.counts:
        fh.write(",".join(str(int(x)) for x in row) + "\n")


def read_counts(lines: list[str]) -> BellOutcomeTable:
    rows = [[int(x) for x in ln.split(",")] for ln in lines if ln.strip() and not ln.startswith("#")]
    return BellOutcomeTable.from_counts(np.array(rows))
