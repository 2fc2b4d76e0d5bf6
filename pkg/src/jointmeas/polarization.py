"""Beam-splitter polarization experiments as joint nonideal measurements.

Analyzers are unit vectors on the Poincare sphere, ``E+ = (I + n.sigma)/2``.
A linear polarizer at angle ``theta`` corresponds to
``n = (sin 2theta, 0, cos 2theta)``, so all linear analyzers lie in the
``sigma_y = 0`` plane.

Two setups are provided:

* two-port: one beam splitter of transparency ``gamma`` sends the photon to
  one of two analyzers, giving a 2x2 bivariate POVM;
* four-port: three beam splitters route the photon to one of four analyzers,
  arranged as a 4x4 bivariate POVM with two diagonal 2x2 blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .hilbert import pauli

UNIT_TOL = 1e-10

TETRAHEDRON = (
    (1 / np.sqrt(3), 1 / np.sqrt(3), 1 / np.sqrt(3)),
    (1 / np.sqrt(3), -1 / np.sqrt(3), -1 / np.sqrt(3)),
    (-1 / np.sqrt(3), 1 / np.sqrt(3), -1 / np.sqrt(3)),
    (-1 / np.sqrt(3), -1 / np.sqrt(3), 1 / np.sqrt(3)),
)


@dataclass(frozen=True)
class PoincareDirection:
    n: tuple[float, float, float]

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        if n.shape != (3,):
            raise InvalidParameter(f"direction must be a 3-vector, got shape {n.shape}")
        if abs(np.linalg.norm(n) - 1.0) > UNIT_TOL:
            raise InvalidParameter(f"direction {tuple(n)} is not a unit vector")
        object.__setattr__(self, "n", tuple(float(x) for x in n))

    @classmethod
    def linear(cls, theta: float) -> "PoincareDirection":
        """Linear polarizer at angle ``theta`` (radians)."""
        return cls((np.sin(2 * theta), 0.0, np.cos(2 * theta)))

    @classmethod
    def linear_degrees(cls, theta_deg: float) -> "PoincareDirection":
        return cls.linear(np.deg2rad(theta_deg))

    @classmethod
    def normalized(cls, v) -> "PoincareDirection":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InvalidParameter("zero vector has no direction")
        return cls(tuple(v / norm))


def _check_gamma(name: str, g: float) -> float:
    g = float(g)
    if not 0.0 < g < 1.0:
        raise InvalidParameter(f"{name} must lie in (0, 1), got {g}")
    return g


def _as_direction(d) -> PoincareDirection:
    return d if isinstance(d, PoincareDirection) else PoincareDirection(tuple(d))


@dataclass(frozen=True)
class TwoPortConfig:
    gamma: float
    d1: PoincareDirection
    d2: PoincareDirection

    def __post_init__(self):
        object.__setattr__(self, "gamma", _check_gamma("gamma", self.gamma))
        object.__setattr__(self, "d1", _as_direction(self.d1))
        object.__setattr__(self, "d2", _as_direction(self.d2))


@dataclass(frozen=True)
class FourPortConfig:
    gamma1: float
    gamma2: float
    gamma3: float
    directions: tuple[PoincareDirection, ...] = field(
        default_factory=lambda: tuple(PoincareDirection(n) for n in TETRAHEDRON)
    )

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gamma3"):
            object.__setattr__(self, name, _check_gamma(name, getattr(self, name)))
        dirs = tuple(_as_direction(d) for d in self.directions)
        if len(dirs) != 4:
            raise InvalidParameter(f"four-port setup needs 4 directions, got {len(dirs)}")
        object.__setattr__(self, "directions", dirs)


def analyzer_projectors(d) -> tuple[np.ndarray, np.ndarray]:
    """Spectral projectors ``(E+, E-)`` of the analyzer along ``d``."""
    n = np.asarray(_as_direction(d).n)
    e_plus = 0.5 * (np.eye(2) + np.einsum("k,kij->ij", n, pauli()))
    return e_plus, np.eye(2) - e_plus


def polar2_povm(c: TwoPortConfig) -> np.ndarray:
    """Bivariate POVM of the two-port setup, outcomes ordered (+, -)."""
    g = c.gamma
    e1, _ = analyzer_projectors(c.d1)
    e2, _ = analyzer_projectors(c.d2)
    zero = np.zeros((2, 2), dtype=complex)
    return np.array(
        [
            [zero, g * e1],
            [(1 - g) * e2, np.eye(2) - g * e1 - (1 - g) * e2],
        ]
    )


def polar2_nonideality(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    g = _check_gamma("gamma", gamma)
    lam = np.array([[g, 0.0], [1 - g, 1.0]])
    mu = np.array([[1 - g, 0.0], [g, 1.0]])
    return lam, mu


def polar2_ideal_povms(c: TwoPortConfig) -> tuple[np.ndarray, np.ndarray]:
    """The two analyzer observables ``{E1+, E1-}`` and ``{E2+, E2-}``."""
    return np.array(analyzer_projectors(c.d1)), np.array(analyzer_projectors(c.d2))


def polar4_povm(c: FourPortConfig) -> np.ndarray:
    """Bivariate 4x4 POVM of the four-port setup.

    Outcome pairs with more than one detector firing have zero operators;
    the remaining five operators sit in two diagonal 2x2 blocks.
    """
    g1, g2, g3 = c.gamma1, c.gamma2, c.gamma3
    e = [analyzer_projectors(d)[0] for d in c.directions]
    eye = np.eye(2)
    m = np.zeros((4, 4, 2, 2), dtype=complex)
    m[0, 1] = g1 * g2 * e[0]
    m[1, 0] = g1 * (1 - g2) * e[1]
    m[1, 1] = g1 * (eye - g2 * e[0] - (1 - g2) * e[1])
    m[2, 3] = (1 - g1) * g3 * e[2]
    m[3, 2] = (1 - g1) * (1 - g3) * e[3]
    m[3, 3] = (1 - g1) * (eye - g3 * e[2] - (1 - g3) * e[3])
    return m


def polar4_target_povms(c: FourPortConfig) -> tuple[np.ndarray, np.ndarray]:
    """Generalized observables whose joint nonideal measurement the four-port setup is."""
    g1 = c.gamma1
    (e1p, e1m), (e2p, e2m), (e3p, e3m), (e4p, e4m) = (analyzer_projectors(d) for d in c.directions)
    q = np.array([g1 * e1p, g1 * e1m, (1 - g1) * e3p, (1 - g1) * e3m])
    p = np.array([g1 * e2p, g1 * e2m, (1 - g1) * e4p, (1 - g1) * e4m])
    return q, p


def polar4_nonideality(gamma2: float, gamma3: float) -> tuple[np.ndarray, np.ndarray]:
    g2 = _check_gamma("gamma2", gamma2)
    g3 = _check_gamma("gamma3", gamma3)
    lam = np.array(
        [
            [g2, 0, 0, 0],
            [1 - g2, 1, 0, 0],
            [0, 0, g3, 0],
            [0, 0, 1 - g3, 1],
        ],
        dtype=float,
    )
    mu = np.array(
        [
            [1 - g2, 0, 0, 0],
            [g2, 1, 0, 0],
            [0, 0, 1 - g3, 0],
            [0, 0, g3, 1],
        ],
        dtype=float,
    )
    return lam, mu
