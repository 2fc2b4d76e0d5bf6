"""Eight-port homodyne detection: transparency, squeezing and marginal noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameter
from .grid import PhaseSpaceField


@dataclass(frozen=True)
class SmearingWidths:
    """Gaussian widths of the excess noise on the two quadrature marginals.

    The q-marginal is the ideal quadrature distribution convolved with
    ``exp(-x^2/delta1^2)/(delta1 sqrt(pi))``, likewise for p.
    """

    delta1: float
    delta2: float

    @property
    def product(self) -> float:
        return self.delta1 * self.delta2


def squeezing_from_transparency(gamma: float) -> float:
    """Squared squeezing parameter ``s^2 = gamma/(1 - gamma)`` set by the mirror transparency.

    ``gamma = 0`` gives ``s = 0``, an ideal q measurement; ``gamma -> 1`` an ideal p
    measurement with ``s`` unbounded, which is rejected.
    """
    gamma = float(gamma)
    if gamma == 1.0:
        raise InvalidParameter("gamma = 1 corresponds to infinite squeezing (s = inf)")
    if not 0.0 <= gamma < 1.0:
        raise InvalidParameter(f"transparency must lie in [0, 1), got {gamma}")
    return gamma / (1.0 - gamma)


def _reciprocal(s: float) -> float:
    """A faithful rounding of ``1/s`` whose floating-point product with ``s`` is exactly 1.

    The correctly rounded ``1/s`` misses this for about one double in seven;
    its neighbour usually works. Falls back to ``1/s`` when neither does.
    """
    y = 1.0 / s
    for c in (y, np.nextafter(y, 0.0), np.nextafter(y, np.inf)):
        if s * c == 1.0:
            return float(c)
    return y


def marginal_widths(s: float) -> SmearingWidths:
    """Widths ``(s, 1/s)`` of the excess noise on the q and p marginals."""
    if not s > 0:
        raise InvalidParameter(f"squeezing parameter must be positive, got {s}")
    s = float(s)
    return SmearingWidths(s, _reciprocal(s))


def husimi_marginals(p: PhaseSpaceField) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid marginals of a phase-space field: (density over q, density over p)."""
    if p.is_complex:
        raise InvalidParameter("marginals expect a real field")
    g = p.grid
    return np.trapezoid(p.values, dx=g.dp, axis=1), np.trapezoid(p.values, dx=g.dq, axis=0)
