"""Purity-based bounds on coherent information and relative entropy of coherence.

The package evaluates analytic entropy bounds from purities and simulates two
ways of measuring those purities: classical shadows from random single-qubit
Clifford measurements, and Bell-state measurements on two copies of a state.
"""

from qpb.linalg import (
    dephase,
    hermitian_eigenvalues,
    kron,
    partial_trace,
    project_to_density,
    purity,
    von_neumann_entropy,
)
from qpb.spectral import (
    BoundsReport,
    ExtremalSpectrum,
    coherence_bounds,
    coherent_info_bounds,
    k_index,
    max_entropy_spectrum,
    min_entropy_spectrum,
    multi_info_bounds,
    s_max,
    s_min,
    sanitize_purity,
)
from qpb.states import c_re_exact, coherent_info_exact, depolarize, ghz_theta, product_psi2

__version__ = "0.1.0"

__all__ = [
    "BoundsReport",
    "ExtremalSpectrum",
    "c_re_exact",
    "coherence_bounds",
    "coherent_info_bounds",
    "coherent_info_exact",
    "dephase",
    "depolarize",
    "ghz_theta",
    "hermitian_eigenvalues",
    "k_index",
    "kron",
    "max_entropy_spectrum",
    "min_entropy_spectrum",
    "multi_info_bounds",
    "partial_trace",
    "product_psi2",
    "project_to_density",
    "purity",
    "s_max",
    "s_min",
    "sanitize_purity",
    "von_neumann_entropy",
]
