"""Continuous-variable phase-space tools: Wigner, Husimi, smearing, tomography."""

from .distributions import (
    characteristic_function,
    characteristic_values,
    husimi,
    quadrature_distribution,
    quadrature_set,
    wigner,
    wigner_values,
)
from .filters import deconvolution_gain, deconvolve_husimi, smear_wigner
from .grid import PhaseSpaceField, PhaseSpaceGrid, QuadratureSet
from .homodyne import SmearingWidths, husimi_marginals, marginal_widths, squeezing_from_transparency
from .states import FockDensity, bloch, coherent, fock, hermite_functions, mixture, prepare_state
from .tomography import tomographic_reconstruct

__all__ = [
    "FockDensity",
    "PhaseSpaceField",
    "PhaseSpaceGrid",
    "QuadratureSet",
    "SmearingWidths",
    "bloch",
    "characteristic_function",
    "characteristic_values",
    "coherent",
    "deconvolution_gain",
    "deconvolve_husimi",
    "fock",
    "hermite_functions",
    "husimi",
    "husimi_marginals",
    "marginal_widths",
    "mixture",
    "prepare_state",
    "quadrature_distribution",
    "quadrature_set",
    "smear_wigner",
    "squeezing_from_transparency",
    "tomographic_reconstruct",
    "wigner",
    "wigner_values",
]
