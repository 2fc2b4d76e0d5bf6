"""Finite-dimensional operator algebra.

Operators are plain complex ``numpy`` arrays of shape ``(d, d)``. Collections
of operators (POVMs, quasi-measures) are stacked arrays whose trailing two
axes are the operator axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DimensionError

VALIDATION_TOL = 1e-10
RANK_RTOL = 1e-9
MAX_DIM = 128

__all__ = [
    "Check",
    "ValidationReport",
    "as_operator",
    "dagger",
    "is_hermitian",
    "expectation",
    "hs_inner",
    "validate_density",
    "as_density",
    "operator_span_rank",
    "pauli",
]


@dataclass(frozen=True)
class Check:
    """Outcome of one numerical test: the measured violation against a tolerance."""

    name: str
    violation: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.violation <= self.tol)


@dataclass(frozen=True)
class ValidationReport:
    """Collection of named checks. Truthy iff every check passed."""

    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self) -> bool:
        return self.passed

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def max_violation(self) -> float:
        return max((c.violation for c in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "violation": float(c.violation), "tol": c.tol, "passed": c.passed}
                for c in self.checks
            ],
        }


def as_operator(a, max_dim: int = MAX_DIM) -> np.ndarray:
    """Coerce ``a`` to a complex square matrix, checking shape and size cap."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"operator must be a nonempty square matrix, got shape {a.shape}")
    if a.shape[0] > max_dim:
        raise DimensionError(f"dimension {a.shape[0]} exceeds cap {max_dim}")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a: np.ndarray, tol: float = VALIDATION_TOL) -> bool:
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dagger b)."""
    return complex(np.vdot(a, b))


def expectation(rho, m, tol: float = VALIDATION_TOL):
    """Tr(rho m); a float when ``m`` is Hermitian within ``tol``, else complex."""
    rho = as_operator(rho)
    m = as_operator(m)
    if rho.shape != m.shape:
        raise DimensionError(f"dimension mismatch: {rho.shape} vs {m.shape}")
    value = complex(np.einsum("ij,ji->", rho, m))
    if is_hermitian(m, tol):
        return value.real
    return value


def _min_eig(a: np.ndarray) -> float:
    h = 0.5 * (a + dagger(a))
    return float(np.linalg.eigvalsh(h)[0])


def validate_density(rho, tol: float = VALIDATION_TOL) -> ValidationReport:
    """Check Hermiticity, unit trace and positivity of ``rho``.

    Positivity is tested on the eigenvalues of the Hermitian part
    ``(rho + rho^dagger)/2``.
    """
    rho = as_operator(rho)
    herm = float(np.max(np.abs(rho - dagger(rho))))
    trace = abs(complex(np.trace(rho)) - 1.0)
    neg = max(0.0, -_min_eig(rho))
    return ValidationReport(
        (
            Check("hermitian", herm, tol),
            Check("unit_trace", trace, tol),
            Check("positive", neg, tol),
        )
    )


def as_density(rho, tol: float = VALIDATION_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array, raising if it is not a density operator."""
    rho = as_operator(rho)
    report = validate_density(rho, tol)
    if not report:
        bad = ", ".join(f"{c.name} ({c.violation:.3g})" for c in report.failures)
        raise ValueError(f"not a density operator: {bad}")
    return rho


def operator_span_rank(ops: Iterable, tol: float = RANK_RTOL) -> int:
    """Dimension of the linear span of ``ops``.

    Computed as the rank of the Gram matrix ``G_ij = Tr(A_i^dagger A_j)``,
    counting singular values above ``tol`` times the largest one.
    """
    ops = np.asarray(list(ops) if not isinstance(ops, np.ndarray) else ops, dtype=complex)
    if ops.size == 0:
        raise ValueError("operator list is empty")
    if ops.ndim < 3 or ops.shape[-1] != ops.shape[-2]:
        raise DimensionError(f"expected a stack of square operators, got shape {ops.shape}")
    vecs = ops.reshape(-1, ops.shape[-1] * ops.shape[-2])
    gram = np.conj(vecs) @ vecs.T
    sv = np.linalg.svd(gram, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def pauli() -> np.ndarray:
    """The Pauli matrices stacked as an array of shape (3, 2, 2)."""
    return np.array(
        [
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )
