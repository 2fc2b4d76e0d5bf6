"""Rectangular phase-space grids and sampled fields on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GridError, InvalidParameter

DEFAULT_EXTENT = 6.0
DEFAULT_POINTS = 64


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform grid; ``values[i, j]`` of a field lives at ``(q[i], p[j])``."""

    q_min: float
    q_max: float
    p_min: float
    p_max: float
    nq: int
    np: int

    def __post_init__(self):
        if not (self.q_max > self.q_min and self.p_max > self.p_min):
            raise InvalidParameter("grid bounds must satisfy max > min")
        if self.nq < 2 or self.np < 2:
            raise InvalidParameter("grid needs at least 2 points per axis")
        for name in ("q_min", "q_max", "p_min", "p_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "nq", int(self.nq))
        object.__setattr__(self, "np", int(self.np))

    @classmethod
    def default(cls) -> "PhaseSpaceGrid":
        e = DEFAULT_EXTENT
        return cls(-e, e, -e, e, DEFAULT_POINTS, DEFAULT_POINTS)

    @classmethod
    def square(cls, extent: float, n: int) -> "PhaseSpaceGrid":
        return cls(-extent, extent, -extent, extent, n, n)

    @classmethod
    def parse(cls, text: str) -> "PhaseSpaceGrid":
        """``"default"`` or ``"q_min,q_max,p_min,p_max,nq,np"``."""
        if text.strip() == "default":
            return cls.default()
        parts = text.split(",")
        if len(parts) != 6:
            raise InvalidParameter(f"grid spec needs 6 comma-separated values, got {text!r}")
        try:
            a, b, c, d = (float(x) for x in parts[:4])
            nq, np_ = int(parts[4]), int(parts[5])
        except ValueError as exc:
            raise InvalidParameter(f"bad grid spec {text!r}") from exc
        return cls(a, b, c, d, nq, np_)

    @property
    def q(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.nq)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.nq - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.np - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nq, self.np)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q, self.p, indexing="ij")

    def extent(self) -> float:
        """Largest coordinate magnitude on the grid."""
        return max(abs(self.q_min), abs(self.q_max), abs(self.p_min), abs(self.p_max))

    def to_dict(self) -> dict:
        return {
            "q_min": self.q_min,
            "q_max": self.q_max,
            "p_min": self.p_min,
            "p_max": self.p_max,
            "nq": self.nq,
            "np": self.np,
        }


@dataclass(frozen=True)
class PhaseSpaceField:
    grid: PhaseSpaceGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != self.grid.shape:
            raise GridError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def integral(self):
        """Trapezoid-rule integral over both axes."""
        return np.trapezoid(np.trapezoid(self.values, dx=self.grid.dp, axis=1), dx=self.grid.dq)

    def sup_distance(self, other: "PhaseSpaceField") -> float:
        self._check_same_grid(other)
        return float(np.max(np.abs(self.values - other.values)))

    def relative_l2(self, reference: "PhaseSpaceField") -> float:
        """``||self - reference|| / ||reference||`` in the discrete L2 norm."""
        self._check_same_grid(reference)
        return float(np.linalg.norm(self.values - reference.values) / np.linalg.norm(reference.values))

    def _check_same_grid(self, other: "PhaseSpaceField"):
        if other.grid != self.grid:
            raise GridError("fields live on different grids")


def uniform_spacing(x: np.ndarray, rtol: float = 1e-8) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise GridError("1-D grid needs at least 2 points")
    steps = np.diff(x)
    h = float(steps.mean())
    if h <= 0 or np.max(np.abs(steps - h)) > rtol * abs(h) + 1e-14:
        raise GridError("1-D grid must be increasing and uniformly spaced")
    return h


@dataclass(frozen=True)
class QuadratureSet:
    """Rotated-quadrature distributions ``w[i, k] = w(x[k], angles[i])``."""

    angles: np.ndarray
    x: np.ndarray
    w: np.ndarray
    tol: float = 1e-6

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        x = np.asarray(self.x, dtype=float)
        w = np.asarray(self.w, dtype=float)
        if w.shape != (angles.size, x.size):
            raise GridError(f"w has shape {w.shape}, expected {(angles.size, x.size)}")
        if np.any(angles < 0) or np.any(angles >= 2 * np.pi):
            raise InvalidParameter("angles must lie in [0, 2pi)")
        h = uniform_spacing(x)
        if w.min() < -self.tol:
            raise GridError(f"quadrature distributions must be nonnegative (min {w.min():.3g})")
        norms = np.trapezoid(w, dx=h, axis=1)
        if np.max(np.abs(norms - 1.0)) > self.tol:
            raise GridError(f"quadrature slices do not integrate to 1 (worst {norms.min():.8g})")
        for name, arr in (("angles", angles), ("x", x), ("w", w)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dx(self) -> float:
        return uniform_spacing(self.x)
