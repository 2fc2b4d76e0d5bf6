import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.linalg import expm
from scipy.special import eval_hermite, factorial

from jointmeas.errors import AccuracyWarning, GridError, InvalidParameter
from jointmeas.phasespace import (
    FockDensity,
    PhaseSpaceField,
    PhaseSpaceGrid,
    characteristic_function,
    characteristic_values,
    coherent,
    deconvolution_gain,
    deconvolve_husimi,
    fock,
    husimi,
    husimi_marginals,
    marginal_widths,
    quadrature_distribution,
    smear_wigner,
    squeezing_from_transparency,
    wigner,
    wigner_values,
)
from jointmeas.phasespace.states import annihilation

from conftest import displaced_parity_wigner, displacement_expectation, random_density, reference_states

WIDE = PhaseSpaceGrid.square(12.0, 97)


def mixed_state(seed=7, d=5, pad=4):
    rho = np.zeros((d + pad, d + pad), dtype=complex)
    rho[:d, :d] = random_density(np.random.default_rng(seed), d)
    return FockDensity(rho)


def psi(n, x):
    return eval_hermite(n, x) * np.exp(-x**2 / 2) / np.sqrt(2.0**n * factorial(n) * np.sqrt(np.pi))


def quad_density(rho, theta, x):
    """Rotated-quadrature density from the rotated wavefunction basis, evaluated pointwise."""
    n = rho.shape[0]
    rot = np.exp(-1j * theta * np.arange(n))
    amp = np.array([psi(k, x) for k in range(n)])
    r = rot[:, None] * rho * np.conj(rot)[None, :]
    return np.einsum("m...,mn,n...->...", amp, r, amp).real


# -- characteristic function ----------------------------------------------


def test_characteristic_at_origin_and_symmetry():
    xi = np.array([0.3 + 0.1j, -1.2 + 0.7j, 2.5j, 3.1, -0.4 - 2.2j])
    for rho in list(reference_states().values()) + [mixed_state()]:
        assert characteristic_values(rho, [0.0])[0] == pytest.approx(1.0, abs=1e-14)
        assert np.allclose(characteristic_values(rho, -xi), np.conj(characteristic_values(rho, xi)), atol=1e-13)


def test_characteristic_closed_forms():
    rng = np.random.default_rng(3)
    xi = rng.normal(size=20) * 2 + 1j * rng.normal(size=20) * 2
    r2 = np.abs(xi) ** 2
    assert np.allclose(characteristic_values(fock(0), xi), np.exp(-r2 / 2), atol=1e-13)
    assert np.allclose(characteristic_values(fock(1), xi), (1 - r2) * np.exp(-r2 / 2), atol=1e-13)
    alpha = 1.0
    coh = np.exp(-r2 / 2 + xi * np.conj(alpha) - np.conj(xi) * alpha)
    assert np.allclose(characteristic_values(coherent(alpha), xi), coh, atol=1e-13)


def test_characteristic_against_matrix_exponential():
    rng = np.random.default_rng(5)
    rho = mixed_state()
    xi = rng.normal(size=20) + 1j * rng.normal(size=20)
    ref = [displacement_expectation(rho.rho, z) for z in xi]
    assert np.allclose(characteristic_values(rho, xi), ref, atol=1e-12)


def test_characteristic_function_on_grid():
    g = PhaseSpaceGrid(-2, 2, -1, 1, 9, 5)
    f = characteristic_function(fock(0), g)
    x1, x2 = g.mesh()
    assert f.is_complex
    assert np.allclose(f.values, np.exp(-(x1**2 + x2**2) / 2), atol=1e-14)


# -- Wigner function ------------------------------------------------------


def test_wigner_origin_values():
    assert wigner_values(fock(0), [0.0], [0.0])[0, 0] == pytest.approx(1 / np.pi, abs=1e-12)
    assert wigner_values(fock(1), [0.0], [0.0])[0, 0] == pytest.approx(-1 / np.pi, abs=1e-12)


def test_wigner_matches_displaced_parity():
    q = np.array([-2.3, -0.7, 0.0, 1.1, 2.9])
    p = np.array([-1.9, 0.0, 0.4, 2.2])
    for rho in (fock(2), coherent(1.0), mixed_state()):
        ref = displaced_parity_wigner(rho.truncated(), q, p)
        assert np.max(np.abs(wigner_values(rho, q, p) - ref)) < 1e-10


def test_wigner_closed_forms_on_default_grid():
    g = PhaseSpaceGrid.default()
    qq, pp = g.mesh()
    r2 = qq**2 + pp**2
    assert np.max(np.abs(wigner(fock(0)).values - np.exp(-r2) / np.pi)) < 1e-12
    assert np.max(np.abs(wigner(fock(1)).values - (2 * r2 - 1) * np.exp(-r2) / np.pi)) < 1e-12


def test_wigner_normalization():
    for rho in reference_states().values():
        assert wigner(rho).integral() == pytest.approx(1.0, abs=1e-6)


def test_wigner_resolution_warning():
    with pytest.warns(AccuracyWarning):
        wigner(fock(0), PhaseSpaceGrid.square(6.0, 6))


# -- Husimi distribution --------------------------------------------------


def vacuum_husimi(q, p, s):
    return 2 * s / (1 + s**2) * np.exp(-q**2 / (1 + s**2) - p**2 * s**2 / (1 + s**2)) / (2 * np.pi)


def probe(x, q, p, s):
    return (np.pi * s**2) ** -0.25 * np.exp(-((x - q) ** 2) / (2 * s**2) + 1j * p * (x - q / 2))


def husimi_by_quadrature(psi_coeffs, q, p, s):
    """(1/2pi)|<phi|psi>|^2 for a pure state given by Fock coefficients, via adaptive quadrature."""
    def wave(x):
        return sum(c * psi(k, x) for k, c in enumerate(psi_coeffs))

    re = integrate.quad(lambda x: (np.conj(probe(x, q, p, s)) * wave(x)).real, -15, 15, limit=200)[0]
    im = integrate.quad(lambda x: (np.conj(probe(x, q, p, s)) * wave(x)).imag, -15, 15, limit=200)[0]
    return (re**2 + im**2) / (2 * np.pi)


def test_husimi_vacuum_closed_form():
    g = PhaseSpaceGrid.default()
    qq, pp = g.mesh()
    for s in (0.5, 1.0, 2.0):
        assert np.max(np.abs(husimi(fock(0), s, g).values - vacuum_husimi(qq, pp, s))) < 1e-14
    h = husimi(fock(0), 1.0, PhaseSpaceGrid.square(2.0, 5))
    assert h.values[2, 2] == pytest.approx(1 / (2 * np.pi), abs=1e-15)


def test_husimi_against_direct_overlap():
    pts = [(0.0, 0.0), (1.3, -0.4), (-2.0, 1.7)]
    g = PhaseSpaceGrid(-2.0, 1.3, -0.4, 1.7, 2, 2)
    for coeffs, rho in (([0, 1], fock(1, 4)), ([0, 0, 1], fock(2, 4))):
        for s in (0.5, 1.7):
            for q, p in pts:
                h = husimi(rho, s, PhaseSpaceGrid(q - 1, q + 1, p - 1, p + 1, 3, 3))
                assert h.values[1, 1] == pytest.approx(husimi_by_quadrature(coeffs, q, p, s), abs=1e-12)
    assert g.shape == (2, 2)


def test_husimi_positive_and_normalized():
    for rho in list(reference_states().values()) + [mixed_state()]:
        for s in (0.5, 1.0, 2.0):
            h = husimi(rho, s, WIDE)
            assert h.values.min() >= -1e-12
            assert h.integral() == pytest.approx(1.0, abs=1e-6)


def test_husimi_rejects_bad_s():
    with pytest.raises(InvalidParameter):
        husimi(fock(0), 0.0)


# -- smearing -------------------------------------------------------------


@pytest.mark.parametrize("name", ["vacuum", "fock1", "fock2", "coherent1"])
@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_smear_equals_husimi(name, s):
    rho = reference_states()[name]
    smeared = smear_wigner(wigner(rho), s)
    assert smeared.sup_distance(husimi(rho, s)) <= 1e-6


def test_smear_fock1_nonnegative():
    assert smear_wigner(wigner(fock(1)), 1.0).values.min() >= -1e-12


def test_smear_variance_addition():
    g = PhaseSpaceGrid.square(10.0, 201)
    qq, pp = g.mesh()
    vq, vp = 0.01, 0.02
    narrow = np.exp(-qq**2 / (2 * vq) - (pp - 0.5) ** 2 / (2 * vp)) / (2 * np.pi * np.sqrt(vq * vp))
    f = PhaseSpaceField(g, narrow)
    for s in (0.7, 1.0, 1.6):
        out = smear_wigner(f, s)
        mass = out.integral()
        assert mass == pytest.approx(f.integral(), abs=1e-9)
        mean_p = PhaseSpaceField(g, pp * out.values).integral() / mass
        var_q = PhaseSpaceField(g, qq**2 * out.values).integral() / mass
        var_p = PhaseSpaceField(g, (pp - mean_p) ** 2 * out.values).integral() / mass
        assert mean_p == pytest.approx(0.5, abs=1e-9)
        assert var_q == pytest.approx(vq + s**2 / 2, abs=1e-8)
        assert var_p == pytest.approx(vp + 1 / (2 * s**2), abs=1e-8)


def test_smear_errors():
    w = wigner(fock(0))
    with pytest.raises(GridError):
        smear_wigner(w, 0.1)
    with pytest.raises(InvalidParameter):
        smear_wigner(w, -1.0)
    with pytest.raises(InvalidParameter):
        smear_wigner(PhaseSpaceField(w.grid, w.values + 0j), 1.0)


# -- deconvolution --------------------------------------------------------


def test_deconvolve_vacuum_round_trip():
    w = wigner(fock(0))
    back = deconvolve_husimi(smear_wigner(w, 1.0), 1.0, k_max=6)
    assert back.relative_l2(w) <= 1e-3


@pytest.mark.parametrize("s", [0.8, 1.0, 1.1])
def test_deconvolve_round_trip_where_the_band_suffices(s):
    g = PhaseSpaceGrid.square(8.0, 86)
    for rho in (fock(0), coherent(1.0), fock(1)):
        w = wigner(rho, g)
        back = deconvolve_husimi(smear_wigner(w, s), s, k_max=7)
        assert back.relative_l2(w) <= 1e-3


def out_of_band_fraction(chi_abs2, k_max):
    """Relative L2 mass of W outside the square band, from |W~|^2 (Parseval)."""
    lim = k_max / np.sqrt(2)
    total = integrate.quad(lambda r: 2 * np.pi * r * chi_abs2(r), 0, np.inf)[0]
    inside = integrate.dblquad(lambda y, x: chi_abs2(np.hypot(x, y)), -lim, lim, -lim, lim)[0]
    return np.sqrt(1 - inside / total)


def test_fock1_band_limit_floor_exceeds_round_trip_target():
    # No band-limited inverse can beat the out-of-band mass of the true W.
    floor = out_of_band_fraction(lambda r: (1 - r**2) ** 2 * np.exp(-r**2), 6.0)
    assert floor > 1e-3
    err = deconvolve_husimi(smear_wigner(wigner(fock(1)), 1.0), 1.0, 6).relative_l2(wigner(fock(1)))
    assert floor <= err
    vacuum_floor = out_of_band_fraction(lambda r: np.exp(-r**2), 6.0)
    assert vacuum_floor < 1e-4


def test_deconvolve_recovers_fock1_negativity():
    g = PhaseSpaceGrid.square(6.0, 65)
    back = deconvolve_husimi(husimi(fock(1), 1.0, g), 1.0, k_max=6)
    assert back.values[32, 32] == pytest.approx(-1 / np.pi, abs=1e-2)


def test_deconvolve_zero_field():
    g = PhaseSpaceGrid.default()
    assert np.array_equal(deconvolve_husimi(PhaseSpaceField(g, np.zeros(g.shape)), 1.0).values, np.zeros(g.shape))


def test_deconvolve_errors_and_guards():
    g = PhaseSpaceGrid.default()
    h = husimi(fock(0), 1.0, g)
    with pytest.raises(GridError):
        deconvolve_husimi(h, 1.0, k_max=100)
    with pytest.raises(InvalidParameter):
        deconvolve_husimi(PhaseSpaceField(g, h.values - 0.01), 1.0)
    with pytest.raises(InvalidParameter):
        deconvolve_husimi(h, 1.0, k_max=0)
    with pytest.warns(AccuracyWarning, match="clipped"):
        deconvolve_husimi(h, 1.0, k_max=6, max_gain=1e3)
    assert deconvolution_gain(1.0, 6.0) == pytest.approx(np.exp(18.0))


def test_deconvolve_without_taper():
    w = wigner(fock(0))
    out = deconvolve_husimi(smear_wigner(w, 1.0), 1.0, k_max=6, taper=False)
    assert out.relative_l2(w) <= 1e-3


# -- quadrature distributions ---------------------------------------------


X = np.linspace(-8, 8, 257)


@pytest.mark.parametrize("theta", [0.0, 0.7, np.pi / 2, 2.5, 4.0])
def test_quadrature_closed_forms(theta):
    assert np.allclose(quadrature_distribution(fock(0), theta, X), np.exp(-X**2) / np.sqrt(np.pi), atol=1e-15)
    assert np.allclose(quadrature_distribution(fock(1), theta, X), 2 * X**2 * np.exp(-X**2) / np.sqrt(np.pi), atol=1e-14)


def test_quadrature_normalization_and_mean():
    rho = coherent(1.0)
    for theta in np.linspace(0, 2 * np.pi, 9, endpoint=False):
        w = quadrature_distribution(rho, theta, X)
        h = X[1] - X[0]
        assert np.trapezoid(w, dx=h) == pytest.approx(1.0, abs=1e-8)
        assert np.trapezoid(X * w, dx=h) == pytest.approx(np.sqrt(2) * np.cos(theta), abs=1e-10)
        assert np.allclose(w, quad_density(rho.truncated(), theta, X), atol=1e-13)


def test_quadrature_leakage():
    with pytest.raises(GridError):
        quadrature_distribution(fock(2), 0.0, np.linspace(-1, 1, 50))


def rotated_quadrature(dim, theta):
    a = annihilation(dim)
    return (a.T * np.exp(1j * theta) + a * np.exp(-1j * theta)) / np.sqrt(2)


@pytest.mark.parametrize("eta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("theta", [0.0, np.pi / 4, np.pi / 2])
def test_vogel_risken_identity(eta, theta):
    for rho in (coherent(1.0 + 0.5j), mixed_state(11), fock(2)):
        w = quadrature_distribution(rho, theta, X)
        lhs = np.trapezoid(w * np.exp(1j * eta * X), X)
        r = rho.truncated()
        n = r.shape[0]
        u = expm(1j * eta * rotated_quadrature(n + 60, theta))[:n, :n]
        rhs = np.einsum("ij,ji->", r, u)
        assert abs(lhs - rhs) < 1e-6


# -- homodyne mapping and marginals ---------------------------------------


def test_squeezing_from_transparency():
    assert squeezing_from_transparency(0.5) == 1.0
    assert squeezing_from_transparency(0.0) == 0.0
    assert squeezing_from_transparency(0.9) == pytest.approx(9.0, rel=1e-15)
    for g in (1.0, 1.2, -0.1):
        with pytest.raises(InvalidParameter):
            squeezing_from_transparency(g)


def test_marginal_widths_examples():
    assert (marginal_widths(1.0).delta1, marginal_widths(1.0).delta2) == (1.0, 1.0)
    w = marginal_widths(3.0)
    assert w.delta1 == 3.0 and w.delta2 == pytest.approx(1 / 3) and w.product == 1.0
    assert (marginal_widths(0.5).delta1, marginal_widths(0.5).delta2) == (0.5, 2.0)
    with pytest.raises(InvalidParameter):
        marginal_widths(0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_width_product_is_one_to_rounding(s):
    # exact for most doubles; no choice of 1/s rounding makes it exact for all
    assert abs(marginal_widths(s).product - 1.0) <= np.spacing(1.0)


def smeared_quadrature(rho, theta, delta, x):
    """Gaussian(delta) convolution of the quadrature density, by adaptive quadrature."""
    r = rho.truncated()

    def one(x0):
        f = lambda y: np.exp(-((x0 - y) ** 2) / delta**2) / (delta * np.sqrt(np.pi)) * quad_density(r, theta, y)
        return integrate.quad(f, -20, 20, limit=200, epsabs=1e-13)[0]

    return np.array([one(v) for v in x])


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_husimi_marginals_are_smeared_quadratures(s):
    idx = np.arange(4, 97, 12)
    for rho in (fock(0), fock(1), coherent(1.0)):
        h = husimi(rho, s, WIDE)
        mq, mp = husimi_marginals(h)
        widths = marginal_widths(s)
        ref_q = smeared_quadrature(rho, 0.0, widths.delta1, WIDE.q[idx])
        ref_p = smeared_quadrature(rho, np.pi / 2, widths.delta2, WIDE.p[idx])
        assert np.max(np.abs(mq[idx] - ref_q)) < 1e-6
        assert np.max(np.abs(mp[idx] - ref_p)) < 1e-6
        assert np.trapezoid(mq, dx=WIDE.dq) == pytest.approx(1.0, abs=1e-6)
        assert np.trapezoid(mp, dx=WIDE.dp) == pytest.approx(1.0, abs=1e-6)


def test_vacuum_husimi_q_marginal_has_unit_variance():
    mq, _ = husimi_marginals(husimi(fock(0), 1.0, WIDE))
    assert np.allclose(mq, np.exp(-WIDE.q**2 / 2) / np.sqrt(2 * np.pi), atol=1e-12)


def test_no_warnings_on_reference_pipeline():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for rho in reference_states().values():
            husimi(rho, 1.0)
            wigner(rho)
