"""Joint nonideal measurement of incompatible observables.

The discrete part covers POVMs with nonideality matrices and Wigner
quasi-measures, applied to beam-splitter polarization setups. The
continuous part computes Wigner and Husimi functions of truncated Fock
states and reconstructs them by deconvolution or tomography.
"""

from .hilbert import expectation, operator_span_rank, validate_density
from .povm import (
    informational_completeness,
    invert_nonideality,
    joint_distribution,
    marginals,
    nonideality_fit,
    reconstruct_ideal_distribution,
    validate_povm,
    wigner_marginal_check,
    wigner_measure,
)

__version__ = "0.1.0"

__all__ = [
    "expectation",
    "informational_completeness",
    "invert_nonideality",
    "joint_distribution",
    "marginals",
    "nonideality_fit",
    "operator_span_rank",
    "reconstruct_ideal_distribution",
    "validate_density",
    "validate_povm",
    "wigner_marginal_check",
    "wigner_measure",
]
