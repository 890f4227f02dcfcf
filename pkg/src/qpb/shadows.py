"""Classical shadows from random single-qubit Clifford measurements.

Each run applies an independent uniformly random Clifford ``U_q`` to every
qubit and measures in the computational basis. The single-run estimator of
the state is the tensor product of ``3 U_q^H |b_q><b_q| U_q - I`` over qubits.

Snapshot ``m`` of a collection draws its randomness from stream ``m`` of the
collection seed (see :mod:`qpb.rng`), so a collection does not depend on how
its snapshots are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from qpb.linalg import kron_all, num_qubits
from qpb.rng import check_seed, stream_uniforms

N_CLIFFORDS = 24
PROB_TOL = 1e-10
_BATCH = 2048

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)


def _canonical(u: np.ndarray) -> np.ndarray:
    """Remove the global phase: the first nonzero entry becomes real positive."""
    flat = u.ravel()
    first = flat[np.flatnonzero(np.abs(flat) > 1e-9)[0]]
    return u * (abs(first) / first)


def _key(u: np.ndarray) -> tuple:
    return tuple(np.round(np.concatenate([u.real.ravel(), u.imag.ravel()]), 9) + 0.0)


def _sort_key(u: np.ndarray) -> tuple:
    # descending (re, im) per entry, so the identity comes first
    return tuple(
        x for z in u.ravel() for x in (-round(z.real, 9) + 0.0, -round(z.imag, 9) + 0.0)
    )


@lru_cache(maxsize=None)
def _table() -> np.ndarray:
    found = {_key(np.eye(2, dtype=complex)): np.eye(2, dtype=complex)}
    frontier = list(found.values())
    while frontier:
        nxt = []
        for u in frontier:
            for g in (_H, _S):
                w = _canonical(g @ u)
                k = _key(w)
                if k not in found:
                    found[k] = w
                    nxt.append(w)
        frontier = nxt
    table = np.array(sorted(found.values(), key=_sort_key))
    table.setflags(write=False)
    return table


def clifford_table() -> np.ndarray:
    """The 24 single-qubit Cliffords modulo phase, shape (24, 2, 2).

    Elements are phase-canonical and sorted by their entries, with the
    identity at index 0.
    """
    return _table()


@lru_cache(maxsize=None)
def _factors() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-qubit snapshot factors.

    Returns ``(labels, mats, diag_sq)``: ``labels[c, b]`` indexes the
    distinct factor ``mats[label]`` for Clifford ``c`` and outcome ``b``, and
    ``diag_sq[label]`` is the squared norm of that factor's diagonal.
    """
    table = _table()
    kets = np.eye(2, dtype=complex)
    mats: list[np.ndarray] = []
    keys: dict[tuple, int] = {}
    labels = np.zeros((N_CLIFFORDS, 2), dtype=np.intp)
    for c, u in enumerate(table):
        for b in range(2):
            f = 3.0 * u.conj().T @ np.outer(kets[b], kets[b]) @ u - np.eye(2)
            k = _key(f)
            if k not in keys:
                keys[k] = len(mats)
                mats.append(f)
            labels[c, b] = keys[k]
    mats_arr = np.array(mats)
    diag_sq = np.array([np.sum(np.abs(np.diag(f)) ** 2) for f in mats_arr])
    for arr in (labels, mats_arr, diag_sq):
        arr.setflags(write=False)
    return labels, mats_arr, diag_sq


@dataclass(frozen=True)
class ShadowSnapshot:
    cliffords: tuple[int, ...]
    outcomes: tuple[int, ...]

    def __post_init__(self):
        if len(self.cliffords) != len(self.outcomes):
            raise ValueError("cliffords and outcomes must have equal length")


@dataclass(frozen=True)
class ShadowCollection:
    """``M`` snapshots on ``n`` qubits stored as (M, n) index and bit arrays."""

    n: int
    cliffords: np.ndarray
    outcomes: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if self.cliffords.shape != self.outcomes.shape or self.cliffords.ndim != 2:
            raise ValueError("cliffords and outcomes must both have shape (M, n)")
        if self.cliffords.shape[1] != self.n:
            raise ValueError(f"snapshots have {self.cliffords.shape[1]} qubits, expected {self.n}")

    @property
    def M(self) -> int:
        return self.cliffords.shape[0]

    def __len__(self) -> int:
        return self.M

    def snapshot(self, m: int) -> ShadowSnapshot:
        return ShadowSnapshot(
            tuple(int(c) for c in self.cliffords[m]), tuple(int(b) for b in self.outcomes[m])
        )

    @property
    def snapshots(self) -> list[ShadowSnapshot]:
        return [self.snapshot(m) for m in range(self.M)]

    @classmethod
    def from_snapshots(cls, snapshots: Sequence[ShadowSnapshot], seed: int = 0) -> "ShadowCollection":
        cl = np.array([s.cliffords for s in snapshots], dtype=np.int8)
        out = np.array([s.outcomes for s in snapshots], dtype=np.int8)
        return cls(cl.shape[1], cl, out, seed)


def _born_probabilities(rho: np.ndarray, cliffords: np.ndarray) -> np.ndarray:
    """Outcome distributions for a batch of local Clifford settings, shape (B, 2^n)."""
    table = _table()
    u = table[cliffords[:, 0]]
    for q in range(1, cliffords.shape[1]):
        v = table[cliffords[:, q]]
        b, d = u.shape[0], u.shape[1]
        u = np.einsum("bij,bkl->bikjl", u, v).reshape(b, 2 * d, 2 * d)
    probs = np.einsum("bij,jk,bik->bi", u, rho, u.conj(), optimize=True).real
    total = probs.sum(axis=1)
    if np.any(np.abs(total - 1.0) > PROB_TOL):
        raise ValueError("Born probabilities do not sum to one; is rho a density matrix?")
    return np.clip(probs, 0.0, None)


def _draw_outcomes(probs: np.ndarray, u: np.ndarray, n: int) -> np.ndarray:
    cum = np.cumsum(probs, axis=1)
    idx = np.sum(cum <= (u * cum[:, -1])[:, None], axis=1)
    idx = np.minimum(idx, probs.shape[1] - 1)
    shifts = np.arange(n - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


def _draw(rho: np.ndarray, uniforms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cliffords and outcome bits from (B, n + 1) uniforms: n Clifford picks, one outcome."""
    n = uniforms.shape[1] - 1
    cliffords = np.minimum((uniforms[:, :n] * N_CLIFFORDS).astype(np.int8), N_CLIFFORDS - 1)
    probs = _born_probabilities(rho, cliffords)
    return cliffords, _draw_outcomes(probs, uniforms[:, n], n)


def sample_snapshot(rho: np.ndarray, rng: np.random.Generator) -> ShadowSnapshot:
    """One randomized measurement; consumes ``n + 1`` doubles from ``rng``."""
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho)
    cl, out = _draw(rho, rng.random(n + 1)[None, :])
    return ShadowSnapshot(tuple(int(c) for c in cl[0]), tuple(int(b) for b in out[0]))


def sample_shadows(rho: np.ndarray, M: int, seed: int) -> ShadowCollection:
    """``M`` snapshots of ``rho``; snapshot ``m`` uses stream ``m`` of ``seed``.

    Equivalent to ``sample_snapshot(rho, qpb.rng.stream(seed, m))`` for each m.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho)
    seed = check_seed(seed)
    if M < 1:
        raise ValueError("M must be positive")
    uniforms = np.empty((M, n + 1))
    for m in range(M):
        uniforms[m] = stream_uniforms(seed, m, n + 1)
    cliffords = np.empty((M, n), dtype=np.int8)
    outcomes = np.empty((M, n), dtype=np.int8)
    for lo in range(0, M, _BATCH):
        hi = min(lo + _BATCH, M)
        cliffords[lo:hi], outcomes[lo:hi] = _draw(rho, uniforms[lo:hi])
    return ShadowCollection(n, cliffords, outcomes, seed)


def _subset(c_n: int, subset: Iterable[int] | None) -> list[int]:
    if subset is None:
        return list(range(c_n))
    qs = sorted(set(int(q) for q in subset))
    if not qs:
        raise ValueError("subset must be nonempty")
    if qs[0] < 0 or qs[-1] >= c_n:
        raise ValueError(f"subset {qs} out of range for {c_n} qubits")
    return qs


def snapshot_matrix(s: ShadowSnapshot, subset: Iterable[int] | None = None) -> np.ndarray:
    """Single-run state estimator restricted to ``subset`` (default: all qubits)."""
    qs = _subset(len(s.cliffords), subset)
    labels, mats, _ = _factors()
    return kron_all(mats[labels[s.cliffords[q], s.outcomes[q]]] for q in qs)


def _labels(c: ShadowCollection, qs: list[int]) -> np.ndarray:
    labels, _, _ = _factors()
    return labels[c.cliffords[:, qs].astype(np.intp), c.outcomes[:, qs].astype(np.intp)]


def snapshot_sum(c: ShadowCollection, subset: Iterable[int] | None = None) -> np.ndarray:
    """Sum of all snapshot matrices restricted to ``subset``.

    Each per-qubit factor is one of six stabilizer-state operators, so the
    sum is accumulated as integer multiplicities of distinct factor products
    in a fixed order, which keeps the result bit-reproducible.
    """
    qs = _subset(c.n, subset)
    _, mats, _ = _factors()
    nl = len(mats)
    lab = _labels(c, qs)
    codes = np.ravel_multi_index(tuple(lab.T), (nl,) * len(qs))
    counts = np.bincount(codes, minlength=nl ** len(qs))
    dim = 2 ** len(qs)
    total = np.zeros((dim, dim), dtype=complex)
    for code in np.flatnonzero(counts):
        idx = np.unravel_index(code, (nl,) * len(qs))
        total += counts[code] * kron_all(mats[i] for i in idx)
    return total


def mean_shadow(c: ShadowCollection, subset: Iterable[int] | None = None) -> np.ndarray:
    """Average of the snapshot matrices; an unbiased estimate of the (reduced) state."""
    if c.M < 1:
        raise ValueError("empty collection")
    return snapshot_sum(c, subset) / c.M


def estimate_purity(c: ShadowCollection, subset: Iterable[int] | None = None) -> float:
    """U-statistic estimate of Tr(rho_B^2) over distinct snapshot pairs.

    Uses sum_{m != m'} Tr(r_m r_m') = Tr(S^2) - sum_m Tr(r_m^2) with S the
    snapshot sum and Tr(r_m^2) = 5^|B| for every snapshot. The raw value is
    returned and may fall outside [1/d, 1].
    """
    M = c.M
    if M < 2:
        raise ValueError("purity estimation needs at least two snapshots")
    qs = _subset(c.n, subset)
    s = snapshot_sum(c, qs)
    tr_s2 = float(np.sum(s.real**2 + s.imag**2))
    return (tr_s2 - M * 5.0 ** len(qs)) / (M * (M - 1))


def estimate_diagonal_purity(c: ShadowCollection, mode: str = "unbiased") -> float:
    """Estimate sum_i rho_ii^2 over the full register.

    ``mode="plugin"`` squares the diagonal of :func:`mean_shadow`;
    ``mode="unbiased"`` removes the same-snapshot terms from that sum.
    """
    mode = mode.lower().replace("-", "").replace("_", "")
    M = c.M
    diag_sum = np.diag(snapshot_sum(c)).real
    if mode == "plugin":
        if M < 1:
            raise ValueError("empty collection")
        return float(np.sum((diag_sum / M) ** 2))
    if mode != "unbiased":
        raise ValueError(f"unknown mode {mode!r}; expected 'plugin' or 'unbiased'")
    if M < 2:
        raise ValueError("unbiased diagonal purity needs at least two snapshots")
    _, _, diag_sq = _factors()
    self_terms = float(np.sum(np.prod(diag_sq[_labels(c, list(range(c.n)))], axis=1)))
    return (float(np.sum(diag_sum**2)) - self_terms) / (M * (M - 1))


def write_shadows(c: ShadowCollection, fh: TextIO) -> None:
    """Write ``# seed=.. n=.. M=..`` then one ``m,c_1..c_n,b_1..b_n`` line per snapshot."""
    fh.write(f"# seed={c.seed} n={c.n} M={c.M}\n")
    for m in range(c.M):
        fields = [m, *c.cliffords[m].tolist(), *c.outcomes[m].tolist()]
        fh.write(",".join(str(int(x)) for x in fields) + "\n")


def read_shadows(path: str | Path) -> list[ShadowCollection]:
    """Parse one or more blocks written by :func:`write_shadows`."""
    blocks: list[ShadowCollection] = []
    header = None
    rows: list[list[int]] = []

    def flush():
        if header is None:
            return
        seed, n, M = header
        arr = np.array(rows, dtype=np.int64).reshape(-1, 1 + 2 * n)
        if arr.shape[0] != M:
            raise ValueError(f"expected {M} snapshots, found {arr.shape[0]}")
        blocks.append(
            ShadowCollection(n, arr[:, 1 : 1 + n].astype(np.int8), arr[:, 1 + n :].astype(np.int8), seed)
        )

    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            flush()
            fields = dict(tok.split("=", 1) for tok in line[1:].split())
            header = (int(fields["seed"]), int(fields["n"]), int(fields["M"]))
            rows = []
        else:
            rows.append([int(x) for x in line.split(",")])
    flush()
    return blocks


def pauli_images(u: np.ndarray) -> list[np.ndarray]:
    """U P U^H for P in (X, Y, Z)."""
    paulis = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    return [u @ p @ u.conj().T for p in paulis]

