"""Phase-space and quadrature distributions of truncated Fock states.

Conventions: ``Q = (a + a^dagger)/sqrt(2)``, ``P = i(a^dagger - a)/sqrt(2)``,
``[Q, P] = i``. The Wigner function is normalized to unit integral, the
vacuum has ``W(0, 0) = 1/pi``.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np

from ..errors import AccuracyWarning, GridError, InvalidParameter
from .grid import PhaseSpaceField, PhaseSpaceGrid, QuadratureSet, uniform_spacing
from .states import FockDensity, annihilation, hermite_functions

DISPLACEMENT_PAD = 8
MAX_WORKING_DIM = 4096
CHAR_TAIL_TOL = 1e-13
LEAK_TOL = 1e-6

__all__ = [
    "characteristic_function",
    "characteristic_values",
    "wigner",
    "wigner_values",
    "husimi",
    "quadrature_distribution",
    "quadrature_set",
]


@lru_cache(maxsize=8)
def _generator_spectrum(dim: int) -> tuple[np.ndarray, np.ndarray]:
    # a^dagger - a is real antisymmetric; i(a^dagger - a) is Hermitian
    a = annihilation(dim)
    lam, v = np.linalg.eigh(1j * (a.T - a))
    lam.setflags(write=False)
    v.setflags(write=False)
    return lam, v


def _working_dim(n: int, r_max: float) -> int:
    """Truncation for the displacement generator.

    A displaced ``|n>`` spreads over levels ``(sqrt(n) + r)^2`` with width
    ~ ``2 r sqrt(n + 1/2)``; the margin keeps leakage at the boundary below
    double precision.
    """
    base = np.sqrt(n) + r_max
    need = int(np.ceil(base**2 + 12.0 * base + 16.0))
    dim = max(n + DISPLACEMENT_PAD, need)
    if dim > MAX_WORKING_DIM:
        warnings.warn(
            f"displacement |xi|={r_max:.3g} needs working dimension {dim}; capped at {MAX_WORKING_DIM}",
            AccuracyWarning,
            stacklevel=3,
        )
        dim = MAX_WORKING_DIM
    return dim


def characteristic_values(rho: FockDensity, xi, chunk: int = 4096) -> np.ndarray:
    """``Tr rho D(xi)`` at the complex points ``xi``, with ``D(xi) = exp(xi a^dagger - xi* a)``.

    For ``xi = r e^{i phi}`` the displacement factorizes as
    ``U(phi) exp(r (a^dagger - a)) U(phi)^dagger`` with ``U(phi) = e^{i phi n}``,
    so a single eigendecomposition of ``a^dagger - a`` serves every point.
    """
    xi = np.asarray(xi, dtype=complex)
    shape = xi.shape
    xi = xi.ravel()
    r = np.abs(xi)
    phi = np.angle(xi)
    rho_t = rho.truncated()
    n = rho_t.shape[0]
    dim = _working_dim(n, float(r.max(initial=0.0)))
    lam, v = _generator_spectrum(dim)
    vn = v[:n, :]

    # c[k, d] = sum_{m - m' = d} conj(v[m, k]) rho[m, m'] v[m', k]
    t = np.einsum("mk,mj,jk->mjk", np.conj(vn), rho_t, vn)
    offsets = np.arange(-(n - 1), n)
    c = np.stack([np.trace(t, offset=-d, axis1=0, axis2=1) for d in offsets], axis=1)

    out = np.empty(xi.size, dtype=complex)
    for start in range(0, xi.size, chunk):
        sl = slice(start, start + chunk)
        e_rad = np.exp(-1j * np.outer(r[sl], lam))
        e_ang = np.exp(-1j * np.outer(phi[sl], offsets))
        out[sl] = np.sum((e_rad @ c) * e_ang, axis=1)
    return out.reshape(shape)


def characteristic_function(rho: FockDensity, xi_grid: PhaseSpaceGrid) -> PhaseSpaceField:
    """Characteristic function on a grid whose axes are ``Re xi`` and ``Im xi``."""
    x1, x2 = xi_grid.mesh()
    return PhaseSpaceField(xi_grid, characteristic_values(rho, x1 + 1j * x2))


def _char_radius(rho: FockDensity) -> float:
    """Radius beyond which ``|Tr rho D(xi)|`` is negligible."""
    nbar = rho.mean_photon_number()
    radius = np.sqrt(4.0 * nbar + 2.0) + 6.0
    ring = np.exp(2j * np.pi * np.arange(64) / 64)
    for _ in range(16):
        if np.max(np.abs(characteristic_values(rho, radius * ring))) < CHAR_TAIL_TOL:
            return radius
        radius += 2.0
    warnings.warn("characteristic function did not decay; Wigner function may be inaccurate",
                  AccuracyWarning, stacklevel=3)
    return radius


def wigner_values(rho: FockDensity, q, p) -> np.ndarray:
    """Wigner function on the tensor grid ``q x p`` by Fourier inversion of the characteristic function.

    Discretizes ``W(q,p) = 1/(2 pi^2) int d2 xi W~(xi) exp(i sqrt2 (p xi_1 - q xi_2))``
    on a square ``xi`` lattice restricted to the disc where ``W~`` is
    non-negligible. The lattice step is chosen so that periodic images of
    ``W`` fall outside the output window.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    radius = _char_radius(rho)
    nbar = rho.mean_photon_number()
    w_radius = np.sqrt(2.0 * nbar + 1.0) + 6.0
    extent = max(np.max(np.abs(q)), np.max(np.abs(p)))
    period = 2.0 * (extent + w_radius)
    step = 2.0 * np.pi / (np.sqrt(2.0) * period)
    m = int(np.ceil(radius / step))
    axis = step * np.arange(-m, m + 1)
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    inside = x1**2 + x2**2 <= radius**2
    chi = np.zeros(x1.shape, dtype=complex)
    chi[inside] = characteristic_values(rho, (x1 + 1j * x2)[inside])

    a_q = np.exp(-1j * np.sqrt(2.0) * np.outer(q, axis))
    b_p = np.exp(1j * np.sqrt(2.0) * np.outer(axis, p))
    w = (step**2 / (2.0 * np.pi**2)) * (a_q @ chi.T @ b_p)
    scale = max(1.0, float(np.max(np.abs(w.real))))
    if np.max(np.abs(w.imag)) > 1e-8 * scale:
        warnings.warn(f"Wigner function has imaginary residue {np.max(np.abs(w.imag)):.3g}",
                      AccuracyWarning, stacklevel=2)
    return w.real


def wigner(rho: FockDensity, grid: PhaseSpaceGrid | None = None) -> PhaseSpaceField:
    """Wigner function sampled on ``grid`` (default ``[-6, 6]^2``, 64x64)."""
    grid = grid or PhaseSpaceGrid.default()
    values = wigner_values(rho, grid.q, grid.p)
    radius = _char_radius(rho)
    nyquist = np.pi / min(grid.dq, grid.dp)
    if np.sqrt(2.0) * radius > nyquist:
        warnings.warn(
            f"grid spacing resolves wavenumbers up to {nyquist:.3g}, the state needs "
            f"{np.sqrt(2.0) * radius:.3g}",
            AccuracyWarning,
            stacklevel=2,
        )
    return PhaseSpaceField(grid, values)


def _check_tail(rho: FockDensity):
    if rho.dim > 2 and rho.rho[-1, -1].real > rho.tail_tol:
        warnings.warn("state populates its cutoff level; results may be truncated",
                      AccuracyWarning, stacklevel=3)


def husimi(rho: FockDensity, s: float, grid: PhaseSpaceGrid | None = None) -> PhaseSpaceField:
    """Husimi distribution for squeezing parameter ``s``.

    ``P(q,p) = <phi|rho|phi> / (2 pi)`` with the probe
    ``phi(x) = (pi s^2)^(-1/4) exp(-(x-q)^2/(2 s^2) + i p (x - q/2))``, which
    is the vacuum squeezed by ``s`` and displaced to ``(q, p)``. The Fock
    coefficients ``<n|phi>`` are computed by trapezoid quadrature against
    the Hermite functions; the integrand is band-limited, so the rule is
    spectrally accurate.
    """
    if not s > 0:
        raise InvalidParameter(f"squeezing parameter must be positive, got {s}")
    grid = grid or PhaseSpaceGrid.default()
    _check_tail(rho)
    rho_t = rho.truncated()
    n = rho_t.shape[0]
    q, p = grid.q, grid.p

    reach = np.sqrt(2.0 * n + 1.0) + 10.0
    bandwidth = reach + 10.0 / s + np.max(np.abs(p))
    h = min(0.05, np.pi / bandwidth)
    half = int(np.ceil(reach / h))
    x = h * np.arange(-half, half + 1)

    psi = hermite_functions(n - 1, x)
    envelope = np.exp(-((x[None, :] - q[:, None]) ** 2) / (2.0 * s**2))
    carrier = np.exp(1j * np.outer(x, p))
    coeff = ((psi[:, None, :] * envelope[None, :, :]).reshape(n * q.size, x.size) @ carrier)
    coeff = coeff.reshape(n, q.size, p.size)
    coeff *= h * (np.pi * s**2) ** -0.25 * np.exp(-0.5j * np.outer(q, p))[None]

    flat = coeff.reshape(n, -1)
    values = np.einsum("mk,mk->k", np.conj(flat), rho_t @ flat).real / (2.0 * np.pi)
    return PhaseSpaceField(grid, values.reshape(grid.shape))


def quadrature_distribution(rho: FockDensity, theta: float, x, leak_tol: float = LEAK_TOL) -> np.ndarray:
    """Probability density of ``Q(theta) = (a^dagger e^{i theta} + a e^{-i theta})/sqrt(2)``.

    ``Q(theta) = e^{i theta n} Q e^{-i theta n}``, hence
    ``w(x, theta) = sum_mn rho_mn e^{-i theta (m - n)} psi_m(x) psi_n(x)``.
    """
    x = np.asarray(x, dtype=float)
    h = uniform_spacing(x)
    rho_t = rho.truncated()
    n = rho_t.shape[0]
    psi = hermite_functions(n - 1, x)
    k = np.arange(n)
    rotated = rho_t * np.exp(-1j * theta * (k[:, None] - k[None, :]))
    w = np.einsum("mx,mn,nx->x", psi, rotated, psi).real
    leak = abs(1.0 - np.trapezoid(w, dx=h))
    if leak > leak_tol:
        raise GridError(f"x grid [{x[0]:.3g}, {x[-1]:.3g}] misses probability {leak:.3g}")
    return w


def quadrature_set(rho: FockDensity, angles, x) -> QuadratureSet:
    angles = np.asarray(angles, dtype=float)
    x = np.asarray(x, dtype=float)
    w = np.array([quadrature_distribution(rho, th, x) for th in angles])
    return QuadratureSet(angles, x, np.clip(w, 0.0, None))
