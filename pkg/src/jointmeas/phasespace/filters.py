"""Gaussian smearing of Wigner functions and its Fourier-domain inverse."""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import AccuracyWarning, GridError, InvalidParameter
from .grid import PhaseSpaceField

DEFAULT_K_MAX = 6.0
TAPER_FRACTION = 0.1
MAX_GAIN = 1e12


def _gaussian_matrix(x: np.ndarray, width: float) -> np.ndarray:
    """Quadrature weights of the unit-mass kernel ``exp(-(x-x')^2/width^2)/(width sqrt(pi))``."""
    h = x[1] - x[0]
    diff = x[:, None] - x[None, :]
    return h * np.exp(-(diff / width) ** 2) / (width * np.sqrt(np.pi))


def smear_wigner(w: PhaseSpaceField, s: float) -> PhaseSpaceField:
    """Convolve a Wigner function with the measurement kernel of squeezing ``s``.

    The kernel ``(1/pi) exp(-(Q-q)^2/s^2 - s^2 (P-p)^2)`` has unit mass,
    variance ``s^2/2`` in ``q`` and ``1/(2 s^2)`` in ``p``. The convolution
    uses the grid's own quadrature, so values beyond the grid are treated
    as zero.
    """
    if not s > 0:
        raise InvalidParameter(f"squeezing parameter must be positive, got {s}")
    if w.is_complex:
        raise InvalidParameter("smearing expects a real field")
    g = w.grid
    if s / np.sqrt(2.0) < g.dq or 1.0 / (s * np.sqrt(2.0)) < g.dp:
        raise GridError(
            f"grid spacing ({g.dq:.3g}, {g.dp:.3g}) too coarse for kernel widths "
            f"({s / np.sqrt(2):.3g}, {1 / (s * np.sqrt(2)):.3g})"
        )
    kq = _gaussian_matrix(g.q, s)
    kp = _gaussian_matrix(g.p, 1.0 / s)
    return PhaseSpaceField(g, kq @ w.values @ kp.T)


def _taper(k: np.ndarray, k_max: float, fraction: float) -> np.ndarray:
    a = np.abs(k)
    start = (1.0 - fraction) * k_max
    out = np.where(a <= k_max, 1.0, 0.0)
    if fraction > 0:
        ramp = (a > start) & (a <= k_max)
        out[ramp] = 0.5 * (1.0 + np.cos(np.pi * (a[ramp] - start) / (k_max - start)))
    return out


def deconvolve_husimi(
    p: PhaseSpaceField,
    s: float,
    k_max: float = DEFAULT_K_MAX,
    taper: bool = True,
    taper_fraction: float = TAPER_FRACTION,
    max_gain: float = MAX_GAIN,
) -> PhaseSpaceField:
    """Undo the Gaussian smearing of ``smear_wigner`` by spectral division.

    The grid spectrum is multiplied by ``exp(k^2 s^2/4 + k'^2/(4 s^2))`` inside
    the square ``|k|, |k'| <= k_max`` and zeroed outside. With ``taper`` the
    last ``taper_fraction`` of the band on each axis is rolled off with a
    raised cosine. The gain is clipped at ``max_gain`` with a warning.
    """
    if not s > 0:
        raise InvalidParameter(f"squeezing parameter must be positive, got {s}")
    if not k_max > 0:
        raise InvalidParameter(f"k_max must be positive, got {k_max}")
    if p.is_complex:
        raise InvalidParameter("deconvolution expects a real field")
    vals = p.values
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    if vals.min() < -1e-6 * scale:
        raise InvalidParameter(f"Husimi field has negative values (min {vals.min():.3g})")
    g = p.grid
    nyquist = np.pi / max(g.dq, g.dp)
    if k_max > nyquist:
        raise GridError(f"k_max={k_max} exceeds the grid Nyquist wavenumber {nyquist:.3g}")

    kq = 2.0 * np.pi * np.fft.fftfreq(g.nq, g.dq)
    kp = 2.0 * np.pi * np.fft.fftfreq(g.np, g.dp)
    exponent = (kq[:, None] * s) ** 2 / 4.0 + (kp[None, :] / s) ** 2 / 4.0
    band = np.outer(np.abs(kq) <= k_max, np.abs(kp) <= k_max)
    log_cap = np.log(max_gain)
    if np.max(exponent[band]) > log_cap:
        warnings.warn(
            f"deconvolution gain {np.exp(min(np.max(exponent[band]), 700.0)):.3g} clipped at {max_gain:.3g}",
            AccuracyWarning,
            stacklevel=2,
        )
    gain = np.exp(np.minimum(exponent, log_cap)) * band
    if taper:
        gain = gain * np.outer(_taper(kq, k_max, taper_fraction), _taper(kp, k_max, taper_fraction))
    out = np.fft.ifft2(np.fft.fft2(vals) * gain)
    if np.max(np.abs(out.imag)) > 1e-8 * max(1.0, float(np.max(np.abs(out.real)))):
        warnings.warn("deconvolved field has a significant imaginary part", AccuracyWarning, stacklevel=2)
    return PhaseSpaceField(g, out.real)


def deconvolution_gain(s: float, k_max: float) -> float:
    """Largest amplification applied by ``deconvolve_husimi`` inside the band."""
    return float(np.exp(k_max**2 * (s**2 + s**-2) / 4.0))
