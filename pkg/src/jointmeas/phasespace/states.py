"""Truncated Fock-space states and the number-basis building blocks."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..errors import AccuracyWarning, CutoffError, InvalidParameter
from ..hilbert import MAX_DIM, VALIDATION_TOL, as_density, pauli

DEFAULT_CUTOFF = 32
TAIL_TOL = 1e-8


@dataclass(frozen=True)
class FockDensity:
    """Density operator in the number basis ``|0>, ..., |cutoff>``.

    Population above the cutoff is taken to be zero. A warning is issued
    when the top level carries more than ``tail_tol`` population, since the
    state is then probably truncated.
    """

    rho: np.ndarray
    tail_tol: float = TAIL_TOL

    def __post_init__(self):
        rho = as_density(self.rho).copy()
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        if rho.shape[0] > 2 and rho[-1, -1].real > self.tail_tol:
            warnings.warn(
                f"population {rho[-1, -1].real:.3g} at the cutoff level; state may be truncated",
                AccuracyWarning,
                stacklevel=2,
            )

    @property
    def cutoff(self) -> int:
        return self.rho.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def mean_photon_number(self) -> float:
        return float(np.real(np.diag(self.rho)) @ np.arange(self.dim))

    def support(self, tol: float = 1e-15) -> int:
        """Number of leading levels outside of which every matrix element is below ``tol``."""
        mags = np.abs(self.rho)
        rows = np.nonzero(np.max(mags, axis=1) > tol)[0]
        return int(rows[-1]) + 1 if rows.size else 1

    def truncated(self, tol: float = 1e-15) -> np.ndarray:
        n = self.support(tol)
        return np.asarray(self.rho[:n, :n])


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float))


def hermite_functions(nmax: int, x) -> np.ndarray:
    """Normalized oscillator eigenfunctions ``psi_n(x)`` for ``n = 0..nmax``.

    Uses the three-term recurrence, stable for large ``n``. Returns an
    array of shape ``(nmax + 1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def fock(n: int, cutoff: int = DEFAULT_CUTOFF) -> FockDensity:
    if n < 0:
        raise InvalidParameter(f"photon number must be nonnegative, got {n}")
    if n > cutoff:
        raise CutoffError(f"Fock state {n} does not fit below cutoff {cutoff}")
    rho = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    rho[n, n] = 1.0
    return FockDensity(rho)


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    c = np.empty(cutoff + 1, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff + 1):
        c[n] = c[n - 1] * alpha / np.sqrt(n)
    return c


def coherent(alpha: complex, cutoff: int = DEFAULT_CUTOFF, tail_tol: float = TAIL_TOL) -> FockDensity:
    c = coherent_amplitudes(complex(alpha), cutoff)
    tail = 1.0 - float(np.sum(np.abs(c) ** 2))
    if tail > tail_tol:
        raise CutoffError(f"coherent state alpha={alpha} leaks {tail:.3g} above cutoff {cutoff}")
    c /= np.linalg.norm(c)
    return FockDensity(np.outer(c, np.conj(c)))


def bloch(r) -> FockDensity:
    """Qubit state ``(I + r.sigma)/2`` with ``|r| <= 1``, as a cutoff-1 density."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,) or np.linalg.norm(r) > 1 + VALIDATION_TOL:
        raise InvalidParameter(f"Bloch vector must be a 3-vector of norm <= 1, got {r}")
    return FockDensity(0.5 * (np.eye(2) + np.einsum("k,kij->ij", r, pauli())))


def mixture(weights, states) -> FockDensity:
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > VALIDATION_TOL:
        raise InvalidParameter("mixture weights must be nonnegative and sum to 1")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise InvalidParameter("mixture components must share a cutoff")
    return FockDensity(sum(w * s.rho for w, s in zip(weights, states)))


def _parse_base(text: str, cutoff: int, tail_tol: float) -> FockDensity:
    kind, _, arg = text.strip().partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "vacuum":
            return fock(0, cutoff)
        if kind == "fock":
            return fock(int(arg), cutoff)
        if kind == "coherent":
            return coherent(complex(arg.replace(" ", "")), cutoff, tail_tol)
        if kind == "bloch":
            return bloch([float(v) for v in arg.split(",")])
    except ValueError as exc:
        if isinstance(exc, (CutoffError, InvalidParameter)):
            raise
        raise InvalidParameter(f"cannot parse state {text!r}") from exc
    raise InvalidParameter(f"unknown state kind {kind!r}")


def prepare_state(spec, cutoff: int = DEFAULT_CUTOFF, tail_tol: float = TAIL_TOL) -> FockDensity:
    """Build a state from a short description.

    ``spec`` is either a string or a mapping:

    * ``"vacuum"``, ``"fock:N"``, ``"coherent:ALPHA"`` (Python complex
      literal, e.g. ``coherent:1+0.5j``), ``"bloch:x,y,z"`` (qubit);
    * a mixture ``"0.3*fock:0;0.7*coherent:1"``;
    * ``{"kind": "fock", "n": 1}``, ``{"kind": "coherent", "alpha": [re, im]}``,
      ``{"kind": "bloch", "r": [x, y, z]}`` or
      ``{"kind": "mixture", "components": [[weight, spec], ...]}``.
    """
    if cutoff + 1 > MAX_DIM:
        raise InvalidParameter(f"cutoff {cutoff} exceeds the dimension cap {MAX_DIM - 1}")
    if isinstance(spec, FockDensity):
        return spec
    if isinstance(spec, Mapping):
        return _prepare_from_mapping(spec, cutoff, tail_tol)
    text = str(spec)
    if ";" in text or "*" in text:
        weights, parts = [], []
        for item in text.split(";"):
            w, sep, base = item.partition("*")
            if not sep:
                w, base = "1", item
            try:
                weights.append(float(w))
            except ValueError as exc:
                raise InvalidParameter(f"bad mixture weight in {item!r}") from exc
            parts.append(_parse_base(base, cutoff, tail_tol))
        return mixture(weights, parts)
    return _parse_base(text, cutoff, tail_tol)


def _prepare_from_mapping(spec: Mapping, cutoff: int, tail_tol: float) -> FockDensity:
    kind = spec.get("kind")
    if kind == "vacuum":
        return fock(0, cutoff)
    if kind == "fock":
        return fock(int(spec["n"]), cutoff)
    if kind == "coherent":
        alpha = spec["alpha"]
        if isinstance(alpha, (list, tuple)):
            alpha = complex(alpha[0], alpha[1])
        return coherent(complex(alpha), cutoff, tail_tol)
    if kind == "bloch":
        return bloch(spec["r"])
    if kind == "mixture":
        comps = spec["components"]
        return mixture(
            [c[0] for c in comps], [prepare_state(c[1], cutoff, tail_tol) for c in comps]
        )
    raise InvalidParameter(f"unknown state kind {kind!r}")
