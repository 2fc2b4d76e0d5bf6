import numpy as np
import pytest

from jointmeas.errors import GridError, InvalidParameter
from jointmeas.phasespace import (
    PhaseSpaceGrid,
    QuadratureSet,
    coherent,
    fock,
    quadrature_set,
    tomographic_reconstruct,
    wigner,
)

X = np.linspace(-8, 8, 256)
HALF = np.pi * np.arange(64) / 64
FULL = 2 * np.pi * np.arange(64) / 64
ORIGIN_GRID = PhaseSpaceGrid.square(6.0, 65)


@pytest.mark.parametrize("angles", [HALF, FULL], ids=["half-turn", "full-turn"])
@pytest.mark.parametrize("rho", [fock(0), fock(1), coherent(1.0)], ids=["vacuum", "fock1", "coherent1"])
def test_reconstruction_matches_direct_wigner(rho, angles):
    w = tomographic_reconstruct(quadrature_set(rho, angles, X))
    assert w.sup_distance(wigner(rho)) < 1e-2


def test_origin_values():
    w0 = tomographic_reconstruct(quadrature_set(fock(0), HALF, X), ORIGIN_GRID)
    w1 = tomographic_reconstruct(quadrature_set(fock(1), HALF, X), ORIGIN_GRID)
    assert w0.values[32, 32] == pytest.approx(1 / np.pi, abs=1e-2)
    assert w1.values[32, 32] == pytest.approx(-1 / np.pi, abs=1e-2)


def test_vacuum_reconstruction_is_rotation_invariant():
    w = tomographic_reconstruct(quadrature_set(fock(0), HALF, X), ORIGIN_GRID).values
    # quarter turn maps (q, p) -> (-p, q); both lie on the grid
    assert np.max(np.abs(w - np.rot90(w))) <= 1e-3
    # radius-matched points: (r, 0) on one grid against (r, r)/sqrt2 on a second grid
    qs = quadrature_set(fock(0), HALF, X)
    on_axis = tomographic_reconstruct(qs, PhaseSpaceGrid(0, 4, 0, 4, 17, 17)).values[:, 0]
    e = 4 / np.sqrt(2)
    on_diag = np.diag(tomographic_reconstruct(qs, PhaseSpaceGrid(0, e, 0, e, 17, 17)).values)
    assert np.max(np.abs(on_axis - on_diag)) <= 1e-3


def test_windows_agree():
    qs = quadrature_set(fock(1), HALF, X)
    hann = tomographic_reconstruct(qs)
    plain = tomographic_reconstruct(qs, window="none", eta_max=8.0)
    assert hann.sup_distance(plain) < 1e-2


def test_nonuniform_angles_use_trapezoid_weights():
    rng = np.random.default_rng(0)
    angles = np.sort(rng.uniform(0, np.pi, 96))
    angles = np.unique(np.concatenate([[0.0], angles]))
    w = tomographic_reconstruct(quadrature_set(fock(0), angles, X))
    assert w.sup_distance(wigner(fock(0))) < 1e-2


def test_errors():
    qs = quadrature_set(fock(0), HALF, X)
    with pytest.raises(GridError, match="eta_max"):
        tomographic_reconstruct(qs, eta_max=1e3)
    with pytest.raises(InvalidParameter):
        tomographic_reconstruct(qs, window="cosine")
    with pytest.raises(GridError, match="gap"):
        tomographic_reconstruct(quadrature_set(fock(0), [0.0, 0.2, 0.4], X))
    with pytest.raises(GridError, match="two angles"):
        tomographic_reconstruct(quadrature_set(fock(0), [0.0], X))


def test_quadrature_set_validation():
    w = np.exp(-X**2) / np.sqrt(np.pi)
    QuadratureSet([0.0], X, w[None])
    with pytest.raises(GridError):
        QuadratureSet([0.0, 1.0], X, w[None])
    with pytest.raises(InvalidParameter):
        QuadratureSet([7.0], X, w[None])
    with pytest.raises(GridError):
        QuadratureSet([0.0], X, 2 * w[None])
    with pytest.raises(GridError):
        QuadratureSet([0.0], X, (w - 0.01)[None])
    with pytest.raises(GridError):
        QuadratureSet([0.0], X**3, w[None])
