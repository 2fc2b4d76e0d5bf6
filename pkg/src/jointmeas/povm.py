"""Discrete POVM calculus for joint nonideal measurements.

A POVM with ``M`` outcomes on a ``d``-dimensional space is an array of shape
``(M, d, d)``; a bivariate POVM is ``(M, N, d, d)`` with the first outcome
index labelling the readout of the first observable. Nonideality matrices
are real ``(M, M')`` arrays whose columns are probability vectors: column
``m'`` says how an ideal outcome ``m'`` is redistributed over the measured
outcomes ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionError, FitError, SingularMatrixError
from .hilbert import (
    RANK_RTOL,
    VALIDATION_TOL,
    Check,
    ValidationReport,
    as_density,
    dagger,
    operator_span_rank,
)

MAX_CONDITION = 1e12

__all__ = [
    "Completeness",
    "validate_povm",
    "joint_distribution",
    "marginals",
    "check_nonideality",
    "nonideality_fit",
    "invert_nonideality",
    "reconstruct_ideal_distribution",
    "wigner_measure",
    "wigner_marginal_check",
    "informational_completeness",
]


def _as_stack(p, ndim: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    if p.ndim < 3 or p.shape[-1] != p.shape[-2]:
        raise DimensionError(f"expected a stack of square operators, got shape {p.shape}")
    if ndim is not None and p.ndim != ndim:
        raise DimensionError(f"expected {ndim - 2} outcome axes, got shape {p.shape}")
    if p.size == 0:
        raise DimensionError("POVM has no elements")
    return p


def validate_povm(p, tol: float = VALIDATION_TOL) -> ValidationReport:
    """Per-element positivity and sum-to-identity residual of a (bivariate) POVM."""
    p = _as_stack(p)
    d = p.shape[-1]
    flat = p.reshape(-1, d, d)
    labels = list(np.ndindex(*p.shape[:-2]))
    herm = 0.5 * (flat + dagger(flat))
    min_eigs = np.linalg.eigvalsh(herm)[:, 0]
    checks = [
        Check("psd" + str(list(lab)), max(0.0, -float(e)), tol) for lab, e in zip(labels, min_eigs)
    ]
    checks.append(
        Check("hermitian", float(np.max(np.abs(flat - dagger(flat)))), tol)
    )
    total = flat.sum(axis=0)
    checks.append(Check("completeness", float(np.max(np.abs(total - np.eye(d)))), tol))
    return ValidationReport(tuple(checks))


def joint_distribution(rho, m, tol: float = VALIDATION_TOL) -> np.ndarray:
    """Outcome probabilities ``p_mn = Tr(rho M_mn)`` of a bivariate POVM."""
    rho = as_density(rho, tol)
    m = _as_stack(m, 4)
    if m.shape[-1] != rho.shape[0]:
        raise DimensionError(f"state has dimension {rho.shape[0]}, POVM {m.shape[-1]}")
    return np.einsum("ij,mnji->mn", rho, m).real


def marginals(m) -> tuple[np.ndarray, np.ndarray]:
    """Row sums ``sum_n M_mn`` and column sums ``sum_m M_mn``."""
    m = _as_stack(m, 4)
    return m.sum(axis=1), m.sum(axis=0)


def check_nonideality(lam, tol: float = VALIDATION_TOL) -> ValidationReport:
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 2:
        raise DimensionError(f"nonideality matrix must be 2-D, got shape {lam.shape}")
    neg = max(0.0, -float(lam.min()))
    colsum = float(np.max(np.abs(lam.sum(axis=0) - 1.0)))
    return ValidationReport((Check("nonnegative", neg, tol), Check("column_sums", colsum, tol)))


def _real_design(ops: np.ndarray) -> np.ndarray:
    # columns: vec(op) split into real and imaginary parts
    v = ops.reshape(ops.shape[0], -1).T
    return np.concatenate([v.real, v.imag], axis=0)


def nonideality_fit(marginal, ideal, tol: float = 1e-9) -> np.ndarray:
    """Find the nonideality matrix expressing ``marginal`` as a smearing of ``ideal``.

    Solves ``marginal_m = sum_m' lam[m, m'] ideal_m'`` in the Hilbert-Schmidt
    least-squares sense. When the ideal elements are linearly dependent the
    solution is not unique; the returned matrix is then the admissible one
    (nonnegative, column-stochastic) with the largest trace, i.e. the
    explanation closest to an ideal measurement.

    Raises
    ------
    FitError
        If the residual exceeds ``tol`` or no admissible matrix exists.
    """
    marginal = _as_stack(marginal, 3)
    ideal = _as_stack(ideal, 3)
    if marginal.shape[-1] != ideal.shape[-1]:
        raise DimensionError("marginal and ideal POVM act on different dimensions")
    n_out, n_ideal = marginal.shape[0], ideal.shape[0]

    a = _real_design(ideal)
    b = _real_design(marginal)
    u, sv, vt = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(sv > RANK_RTOL * sv[0])) if sv.size and sv[0] > 0 else 0
    x, *_ = np.linalg.lstsq(a, b, rcond=RANK_RTOL)
    residual = float(np.max(np.linalg.norm(a @ x - b, axis=0)))
    if residual > tol:
        raise FitError(f"marginal is not a smearing of the ideal POVM (residual {residual:.3g})")
    lam = x.T

    null = vt[rank:].T
    if null.shape[1] > 0:
        lam = _max_trace_solution(lam, null, tol)

    report = check_nonideality(lam, tol)
    if not report:
        bad = ", ".join(f"{c.name} ({c.violation:.3g})" for c in report.failures)
        raise FitError(f"fitted matrix is not a valid nonideality matrix: {bad}")
    return lam


def _max_trace_solution(lam0: np.ndarray, null: np.ndarray, tol: float) -> np.ndarray:
    """Pick the admissible matrix ``lam0 + T null^T`` of largest trace."""
    n_out, n_ideal = lam0.shape
    k = null.shape[1]
    # unknowns t[m, j] flattened row-major; lam[m, :] = lam0[m, :] + null @ t[m, :]
    nvar = n_out * k
    c = np.zeros(nvar)
    for m in range(min(n_out, n_ideal)):
        c[m * k:(m + 1) * k] = -null[m, :]
    a_ub = np.zeros((n_out * n_ideal, nvar))
    b_ub = np.zeros(n_out * n_ideal)
    for m in range(n_out):
        rows = slice(m * n_ideal, (m + 1) * n_ideal)
        a_ub[rows, m * k:(m + 1) * k] = -null
        b_ub[rows] = lam0[m, :] + tol
    a_eq = np.zeros((n_ideal, nvar))
    for m in range(n_out):
        a_eq[:, m * k:(m + 1) * k] = null
    b_eq = 1.0 - lam0.sum(axis=0)
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=(None, None), method="highs")
    if not res.success:
        raise FitError(f"no admissible nonideality matrix: {res.message}")
    t = res.x.reshape(n_out, k)
    lam = lam0 + t @ null.T
    # HiGHS is only feasible to ~1e-7: re-solve exactly on the active set
    active = np.argwhere(np.abs(lam) <= 1e-6)
    rows = [a_eq]
    rhs = [b_eq]
    for m, j in active:
        row = np.zeros(nvar)
        row[m * k:(m + 1) * k] = null[j, :]
        rows.append(row[None])
        rhs.append(np.array([-lam0[m, j]]))
    t_exact, *_ = np.linalg.lstsq(np.concatenate(rows), np.concatenate(rhs), rcond=None)
    polished = lam0 + t_exact.reshape(n_out, k) @ null.T
    if np.max(np.abs(polished - lam)) < 1e-5:
        lam = polished
    lam[np.abs(lam) <= tol] = 0.0
    return lam


def invert_nonideality(lam, tol: float = VALIDATION_TOL, max_condition: float = MAX_CONDITION) -> np.ndarray:
    """Inverse of a square nonideality matrix.

    Entries of the inverse may be negative, but its columns still sum to one.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 2 or lam.shape[0] != lam.shape[1]:
        raise DimensionError(f"nonideality matrix must be square to invert, got {lam.shape}")
    cond = np.linalg.cond(lam)
    if not np.isfinite(cond) or cond > max_condition:
        raise SingularMatrixError(f"nonideality matrix is singular (condition number {cond:.3g})")
    inv = np.linalg.inv(lam)
    colsum = float(np.max(np.abs(inv.sum(axis=0) - 1.0)))
    if colsum > tol * max(1.0, cond):
        raise SingularMatrixError(f"inverse column sums deviate from 1 by {colsum:.3g}")
    return inv


def reconstruct_ideal_distribution(joint, linv, minv) -> tuple[np.ndarray, np.ndarray]:
    """Ideal-observable distributions from a measured joint distribution."""
    joint = np.asarray(joint, dtype=float)
    linv = np.asarray(linv, dtype=float)
    minv = np.asarray(minv, dtype=float)
    if joint.ndim != 2 or linv.shape[1] != joint.shape[0] or minv.shape[1] != joint.shape[1]:
        raise DimensionError(
            f"shapes incompatible: joint {joint.shape}, linv {linv.shape}, minv {minv.shape}"
        )
    return linv @ joint.sum(axis=1), minv @ joint.sum(axis=0)


def wigner_measure(m, linv, minv) -> np.ndarray:
    """Operator-valued quasi-measure ``W_ab = sum_mn linv[a, m] minv[b, n] M_mn``."""
    m = _as_stack(m, 4)
    linv = np.asarray(linv, dtype=float)
    minv = np.asarray(minv, dtype=float)
    if linv.ndim != 2 or minv.ndim != 2 or linv.shape[1] != m.shape[0] or minv.shape[1] != m.shape[1]:
        raise DimensionError(
            f"shapes incompatible: POVM {m.shape[:2]}, linv {linv.shape}, minv {minv.shape}"
        )
    return np.einsum("am,bn,mnij->abij", linv, minv, m)


def wigner_marginal_check(w, q, p, tol: float = 1e-12) -> ValidationReport:
    """Residuals of the marginal relations of a Wigner measure.

    Row sums must reproduce ``q``, column sums ``p``, and the total the identity.
    """
    w = _as_stack(w, 4)
    q = _as_stack(q, 3)
    p = _as_stack(p, 3)
    if q.shape != w.shape[:1] + w.shape[2:] or p.shape != w.shape[1:]:
        raise DimensionError(f"shapes incompatible: measure {w.shape}, q {q.shape}, p {p.shape}")
    d = w.shape[-1]
    rows, cols = w.sum(axis=1), w.sum(axis=0)
    return ValidationReport(
        (
            Check("row_marginals", float(np.max(np.abs(rows - q))), tol),
            Check("column_marginals", float(np.max(np.abs(cols - p))), tol),
            Check("total", float(np.max(np.abs(w.sum(axis=(0, 1)) - np.eye(d)))), tol),
        )
    )


@dataclass(frozen=True)
class Completeness:
    rank: int
    dim: int

    @property
    def complete(self) -> bool:
        return self.rank == self.dim**2

    def __str__(self) -> str:
        return f"rank={self.rank} complete={str(self.complete).lower()}"


def informational_completeness(ops, d: int, tol: float = RANK_RTOL) -> Completeness:
    """Span rank of ``ops`` together with the identity, compared with ``d**2``."""
    ops = _as_stack(ops)
    if ops.shape[-1] != d:
        raise DimensionError(f"operators have dimension {ops.shape[-1]}, expected {d}")
    flat = ops.reshape(-1, d, d)
    rank = operator_span_rank(np.concatenate([flat, np.eye(d)[None]]), tol)
    return Completeness(rank, d)
