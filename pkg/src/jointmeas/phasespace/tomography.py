"""Wigner function from rotated-quadrature distributions (filtered back-projection).

The inversion formula

    W(q, p) = 1/(4 pi^2) int dx int_0^{2pi} dtheta int_0^inf eta deta
              exp(i eta x - i eta (q cos theta + p sin theta)) w(x, theta)

is symmetrized with ``w(x, theta + pi) = w(-x, theta)`` into a ramp filter
``|eta|`` over the whole line, followed by back-projection along
``x = q cos theta + p sin theta``.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import GridError, InvalidParameter
from .grid import PhaseSpaceField, PhaseSpaceGrid, QuadratureSet

PAD_FACTOR = 8
MAX_ANGLE_GAP = np.pi / 2


def _angular_weights(angles: np.ndarray) -> tuple[np.ndarray, float]:
    """Periodic trapezoid weights and the period the angles cover (pi or 2pi)."""
    period = np.pi if np.all(angles < np.pi) else 2.0 * np.pi
    order = np.argsort(angles)
    a = angles[order]
    gaps = np.diff(np.concatenate([a, [a[0] + period]]))
    if np.max(gaps) > MAX_ANGLE_GAP:
        raise GridError(f"angular gap {np.max(gaps):.3g} rad exceeds {MAX_ANGLE_GAP:.3g}")
    w_sorted = 0.5 * (gaps + np.roll(gaps, 1))
    weights = np.empty_like(w_sorted)
    weights[order] = w_sorted
    return weights, period


def hann(eta: np.ndarray, eta_max: float) -> np.ndarray:
    return np.where(np.abs(eta) <= eta_max, np.cos(0.5 * np.pi * eta / eta_max) ** 2, 0.0)


def ramp_filter(w: np.ndarray, h: float, eta_max: float, window: str = "hann", pad: int = PAD_FACTOR):
    """Filter each row of ``w`` with ``|eta| A(eta)``.

    Returns the filtered projections on an extended, zero-padded x axis
    together with the offset (in samples) of the original first point.
    ``g(x) = int |eta| A(eta) w^(eta) e^{-i eta x} d eta`` with
    ``w^(eta) = int w(x) e^{i eta x} dx``.
    """
    n = w.shape[-1]
    m = 1 << int(np.ceil(np.log2(pad * n)))
    offset = (m - n) // 2
    padded = np.zeros(w.shape[:-1] + (m,))
    padded[..., offset:offset + n] = w
    eta = 2.0 * np.pi * np.fft.fftfreq(m, h)
    if window == "hann":
        filt = np.abs(eta) * hann(eta, eta_max)
    elif window == "none":
        filt = np.abs(eta) * (np.abs(eta) <= eta_max)
    else:
        raise InvalidParameter(f"unknown window {window!r}")
    g = 2.0 * np.pi * np.fft.ifft(np.fft.fft(padded, axis=-1) * filt, axis=-1).real
    return g, offset


def tomographic_reconstruct(
    qs: QuadratureSet,
    grid: PhaseSpaceGrid | None = None,
    eta_max: float | None = None,
    window: str = "hann",
) -> PhaseSpaceField:
    """Reconstruct the Wigner function on ``grid`` from quadrature distributions.

    Angles may cover ``[0, pi)`` (the other half follows by symmetry) or
    ``[0, 2pi)``. ``eta_max`` defaults to the Nyquist wavenumber of the x grid.
    """
    grid = grid or PhaseSpaceGrid.default()
    angles = np.asarray(qs.angles)
    if angles.size < 2:
        raise GridError("tomography needs at least two angles")
    h = qs.dx
    nyquist = np.pi / h
    if eta_max is None:
        eta_max = nyquist
    if not 0 < eta_max <= nyquist * (1 + 1e-12):
        raise GridError(f"eta_max={eta_max} outside (0, {nyquist:.4g}] set by the x grid")
    weights, period = _angular_weights(angles)
    # the pi-periodic form already folds the second half-turn in
    prefactor = 1.0 / (4.0 * np.pi**2) if period == np.pi else 1.0 / (8.0 * np.pi**2)

    g, offset = ramp_filter(np.asarray(qs.w), h, eta_max, window)
    x_ext = qs.x[0] + h * (np.arange(g.shape[-1]) - offset)
    qq, pp = grid.mesh()
    out = np.zeros(grid.shape)
    for th, wt, gj in zip(angles, weights, g):
        spline = CubicSpline(x_ext, gj)
        out += wt * spline(qq * np.cos(th) + pp * np.sin(th))
    return PhaseSpaceField(grid, prefactor * out)
