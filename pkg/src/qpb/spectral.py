"""Extremal entropy at fixed purity and the bounds built from it.

For a ``d``-level spectrum with purity ``P = sum(lambda_i^2)`` the entropy is
largest when one eigenvalue is large and the rest are equal, and smallest when
``k - 1`` eigenvalues are equal, one takes a smaller value ``alpha`` and the
rest vanish. Bounds on entropy differences follow by pairing the minimum of
one term with the maximum of the other.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qpb.linalg import entropy_of_spectrum

CLAMP_REPORT_TOL = 1e-6
# k-index boundary slack: P within this of 1/k is treated as exactly 1/k
BOUNDARY_TOL = 1e-12


class SpectrumKind(enum.Enum):
    MAX_ENTROPY = "MaxEntropy"
    MIN_ENTROPY = "MinEntropy"


class Quantity(enum.Enum):
    COHERENT_INFO = "CoherentInfo"
    COHERENCE = "Coherence"
    MULTI_INFO = "MultiInfo"


@dataclass(frozen=True)
class ExtremalSpectrum:
    kind: SpectrumKind
    dim: int
    purity: float
    values: np.ndarray
    k: int | None = None
    alpha: float | None = None

    @property
    def entropy(self) -> float:
        return entropy_of_spectrum(self.values)


@dataclass(frozen=True)
class BoundsReport:
    """Lower/upper bound pair in bits for one entropic quantity.

    ``tightness_epsilon`` is the distance of the marginal (or dephased)
    purity from its minimum ``1/d``; the bounds coincide for pure global
    states when it is zero. ``clamped`` is set when any input purity had to
    be moved by more than ``CLAMP_REPORT_TOL`` into its physical range.
    """

    lower: float
    upper: float
    tightness_epsilon: float
    quantity: Quantity
    clamped: bool = False


def sanitize_purity(raw: float, dim: int) -> tuple[float, bool]:
    """Clamp an estimated purity into ``[1/dim, 1]``.

    Returns the clamped value and whether the clamp moved it by more than
    ``CLAMP_REPORT_TOL``.
    """
    raw = float(raw)
    if math.isnan(raw):
        raise ValueError("purity is NaN")
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    lo = 1.0 / dim
    value = min(max(raw, lo), 1.0)
    return value, abs(value - raw) > CLAMP_REPORT_TOL


def _check_purity(purity: float, dim: int) -> float:
    purity = float(purity)
    lo = 1.0 / dim
    if not (lo - BOUNDARY_TOL <= purity <= 1.0 + BOUNDARY_TOL):
        raise ValueError(f"purity {purity} outside [1/{dim}, 1]; sanitize it first")
    return min(max(purity, lo), 1.0)


def k_index(purity: float, dim: int) -> int:
    """The integer k with 1/k <= P < 1/(k-1); k = 1 exactly for P = 1."""
    purity = _check_purity(purity, dim)
    if purity >= 1.0 - BOUNDARY_TOL:
        return 1
    k = math.ceil(1.0 / purity)
    # 1/P may land just above an integer through rounding
    if (k - 1) * purity >= 1.0 - BOUNDARY_TOL:
        k -= 1
    return max(2, min(k, dim))


def max_entropy_spectrum(purity: float, dim: int) -> ExtremalSpectrum:
    if dim < 2:
        raise ValueError(f"dimension must be at least 2, got {dim}")
    purity = _check_purity(purity, dim)
    lam1 = 1.0 / dim + math.sqrt(max((dim - 1) / dim * (purity - 1.0 / dim), 0.0))
    lam1 = min(lam1, 1.0)
    values = np.full(dim, (1.0 - lam1) / (dim - 1))
    values[0] = lam1
    return ExtremalSpectrum(SpectrumKind.MAX_ENTROPY, dim, purity, values)


def min_entropy_spectrum(purity: float, dim: int) -> ExtremalSpectrum:
    if dim < 2:
        raise ValueError(f"dimension must be at least 2, got {dim}")
    purity = _check_purity(purity, dim)
    k = k_index(purity, dim)
    values = np.zeros(dim)
    if k == 1:
        values[0] = 1.0
        return ExtremalSpectrum(SpectrumKind.MIN_ENTROPY, dim, purity, values, k=1, alpha=1.0)
    alpha = 1.0 / k - math.sqrt(max((1.0 - 1.0 / k) * (purity - 1.0 / k), 0.0))
    alpha = max(alpha, 0.0)
    values[: k - 1] = (1.0 - alpha) / (k - 1)
    values[k - 1] = alpha
    return ExtremalSpectrum(SpectrumKind.MIN_ENTROPY, dim, purity, values, k=k, alpha=alpha)


def s_max(purity: float, dim: int) -> float:
    """Largest entropy (bits) of any ``dim``-level state with the given purity."""
    lam1 = max_entropy_spectrum(purity, dim).values[0]
    rest = 1.0 - lam1
    s = -lam1 * math.log2(lam1) if lam1 > 0 else 0.0
    if rest > 0:
        s -= rest * math.log2(rest / (dim - 1))
    return s


def s_min(purity: float, dim: int) -> float:
    """Smallest entropy (bits) of any ``dim``-level state with the given purity."""
    spectrum = min_entropy_spectrum(purity, dim)
    if spectrum.k == 1:
        return 0.0
    return entropy_of_spectrum(spectrum.values[: spectrum.k])


def coherent_info_bounds(
    p_global: float, p_marginal: float, d_total: int, d_B: int
) -> BoundsReport:
    """Bounds on I(A>B) = S(rho_B) - S(rho_AB) from Tr(rho_AB^2) and Tr(rho_B^2)."""
    if d_B < 2 or d_total < d_B or d_total % d_B:
        raise ValueError(f"subsystem dimension {d_B} incompatible with total {d_total}")
    pg, cg = sanitize_purity(p_global, d_total)
    pb, cb = sanitize_purity(p_marginal, d_B)
    lower = s_min(pb, d_B) - s_max(pg, d_total)
    upper = s_max(pb, d_B) - s_min(pg, d_total)
    # at P = 1/d both extremal entropies are log2 d up to rounding
    upper = max(upper, lower)
    return BoundsReport(lower, upper, pb - 1.0 / d_B, Quantity.COHERENT_INFO, cg or cb)


def coherence_bounds(p_state: float, p_diag: float, d: int) -> BoundsReport:
    """Bounds on the relative entropy of coherence S(rho_d) - S(rho).

    The lower bound is floored at zero. Inconsistent estimated purities
    (diagonal purer than the state) can push the upper bound below zero as
    well; it is floored at the lower bound so the pair stays ordered.
    """
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    ps, cs = sanitize_purity(p_state, d)
    pd, cd = sanitize_purity(p_diag, d)
    lower = max(s_min(pd, d) - s_max(ps, d), 0.0)
    upper = max(s_max(pd, d) - s_min(ps, d), lower)
    return BoundsReport(lower, upper, pd - 1.0 / d, Quantity.COHERENCE, cs or cd)


def multi_info_bounds(
    p_marginals: Sequence[tuple[float, int]], p_global: float, d_total: int
) -> BoundsReport:
    """Bounds on sum_i S(rho_i) - S(rho) for a product of ``len(p_marginals)`` parties.

    ``p_marginals`` lists ``(purity, dim)`` per party. The tightness value
    is the summed distance of each marginal purity from ``1/d_i``.
    """
    dims = [int(d) for _, d in p_marginals]
    if not dims or math.prod(dims) != d_total:
        raise ValueError(f"marginal dimensions {dims} do not multiply to {d_total}")
    pg, clamped = sanitize_purity(p_global, d_total)
    lower = -s_max(pg, d_total) if d_total > 1 else 0.0
    upper = -s_min(pg, d_total) if d_total > 1 else 0.0
    eps = 0.0
    for p, d in p_marginals:
        if d < 2:
            # a one-level party contributes nothing
            continue
        pi, ci = sanitize_purity(p, d)
        clamped = clamped or ci
        lower += s_min(pi, d)
        upper += s_max(pi, d)
        eps += pi - 1.0 / d
    return BoundsReport(lower, max(upper, lower), eps, Quantity.MULTI_INFO, clamped)
