"""Dense linear algebra for small qubit registers.

Matrices are plain complex ``numpy`` arrays. Qubit 0 is the leftmost tensor
factor, i.e. the most significant bit of a computational-basis label.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
ZERO_EIGENVALUE = 1e-15

JACOBI_REL_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with ``a`` as the leftmost factor."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    return reduce(kron, factors)


def num_qubits(m: np.ndarray) -> int:
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or (1 << n) != dim or m.shape != (dim, dim):
        raise ValueError(f"expected a 2^n x 2^n matrix with n >= 1, got shape {m.shape}")
    return n


def check_density(rho: np.ndarray) -> np.ndarray:
    """Return ``rho`` as a complex array after validating it is a density matrix.

    Raises ValueError when the matrix is not square, not Hermitian, not
    unit-trace or has an eigenvalue below ``-PSD_TOL``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace {np.trace(rho).real:.3g} != 1")
    if hermitian_eigenvalues(rho)[-1] < -PSD_TOL:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def is_density_matrix(rho: np.ndarray) -> bool:
    try:
        check_density(rho)
    except ValueError:
        return False
    return True


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced state on the qubits in ``keep``.

    The kept qubits appear in ascending index order in the result,
    whatever order ``keep`` lists them in.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho)
    keep = sorted(set(int(q) for q in keep))
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"qubit index out of range for a {n}-qubit state: {keep}")
    if len(keep) == n:
        return rho.copy()

    traced = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    # trace out from the highest index so that remaining axis numbers stay valid
    for q in reversed(traced):
        k = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + k)
    dk = 2 ** len(keep)
    return t.reshape(dk, dk)


def dephase(rho: np.ndarray) -> np.ndarray:
    """Remove all off-diagonal entries in the computational basis."""
    rho = np.asarray(rho, dtype=complex)
    return np.diag(np.diag(rho))


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2), computed as the squared Frobenius norm of a Hermitian matrix."""
    rho = np.asarray(rho, dtype=complex)
    # Tr(rho rho) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho
    return float(np.sum(rho.real**2 + rho.imag**2))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of a round-robin tournament: every (p, q) once per sweep, disjoint per step."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    steps = []
    for _ in range(m - 1):
        pairs = [
            (min(players[i], players[m - 1 - i]), max(players[i], players[m - 1 - i]))
            for i in range(m // 2)
            if players[i] >= 0 and players[m - 1 - i] >= 0
        ]
        p, q = (np.array(x, dtype=int) for x in zip(*pairs)) if pairs else (np.zeros(0, int),) * 2
        steps.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return steps


def _jacobi(m: np.ndarray, want_vectors: bool) -> tuple[np.ndarray, np.ndarray | None]:
    """Cyclic Jacobi diagonalization with round-robin pivot ordering.

    Each step rotates a set of disjoint (p, q) planes at once; a sweep
    visits every off-diagonal pair exactly once. Iteration stops when the
    off-diagonal Frobenius mass drops below ``JACOBI_REL_TOL * ||m||_F``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian within tolerance")

    a = 0.5 * (m + m.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex) if want_vectors else None
    target = JACOBI_REL_TOL * np.linalg.norm(a)
    steps = _round_robin(n)

    def off_norm() -> float:
        return float(np.linalg.norm(a - np.diag(np.diag(a))))

    sweeps = 0
    while off_norm() > target:
        if sweeps == JACOBI_MAX_SWEEPS:
            raise np.linalg.LinAlgError(
                f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )
        sweeps += 1
        for p, q in steps:
            apq = a[p, q]
            mag = np.abs(apq)
            live = mag > 0.0
            if not live.any():
                continue
            p, q, apq, mag = p[live], q[live], apq[live], mag[live]
            # phase e makes a[p, q] real positive; then the real two-sided rotation
            e = np.conj(apq) / mag
            theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
            t = 1.0 / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(theta < 0.0, -t, t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            # J restricted to (p, q) is [[c, s], [-s e, c e]]
            j = np.eye(n, dtype=complex)
            j[p, p] = c
            j[p, q] = s
            j[q, p] = -s * e
            j[q, q] = c * e
            a = j.conj().T @ a @ j
            a[p, q] = 0.0
            a[q, p] = 0.0
            a = 0.5 * (a + a.conj().T)
            if v is not None:
                v = v @ j

    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    if v is not None:
        v = v[:, order]
    return w, v


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in non-increasing order (cyclic Jacobi)."""
    return _jacobi(m, want_vectors=False)[0]


def hermitian_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (non-increasing) and unitary eigenvector columns of ``m``."""
    w, v = _jacobi(m, want_vectors=True)
    return w, v


def entropy_of_spectrum(values: Iterable[float]) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0 and values clamped to [0, 1]."""
    lam = np.clip(np.asarray(list(values), dtype=float), 0.0, 1.0)
    lam = lam[lam >= ZERO_EIGENVALUE]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """S(rho) = -Tr(rho log2 rho) in bits."""
    rho = np.asarray(rho, dtype=complex)
    if np.count_nonzero(rho - np.diag(np.diag(rho))) == 0:
        return entropy_of_spectrum(np.diag(rho).real)
    return entropy_of_spectrum(hermitian_eigenvalues(rho))


def project_to_density(m: np.ndarray) -> np.ndarray:
    """Closest-spectrum physical state to a Hermitian, trace-nonzero matrix.

    The matrix is first scaled to unit trace. Eigenvalues are then visited
    from the smallest upward: each negative one is set to zero and its
    deficit spread evenly over the eigenvalues not yet visited, until the
    next eigenvalue stays non-negative after the shift.
    """
    m = np.asarray(m, dtype=complex)
    tr = np.trace(m).real
    if not np.any(m) or abs(tr) < 1e-15:
        raise ValueError("cannot project a zero-trace matrix onto density matrices")
    if tr < 0:
        raise ValueError("matrix has negative trace")
    w, v = hermitian_eigh(m / tr)

    lam = w.copy()  # non-increasing
    deficit = 0.0
    i = len(lam)
    while i > 0:
        shifted = lam[i - 1] + deficit / i
        if shifted >= 0.0:
            break
        deficit += lam[i - 1]
        lam[i - 1] = 0.0
        i -= 1
    lam[:i] += deficit / i
    lam /= lam.sum()

    rho = (v * lam) @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-ensemble random state; ``rank`` columns (default full rank)."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def fidelity_with_pure(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi|rho|psi> for a normalized state vector ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ rho @ psi))
