import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from debranges import (SchrodingerDB, SpectrumError, asymptotic_fit, compute_spectra, free_db,
                       phase, spectra_from_phase, sqrt_transform, theta, weyl_m)
from debranges.potential import Potential
from debranges.spectra import phase_bound_violation, weyl_coefficients, weyl_m_series
from oracles import fd_richardson

# frozen after agreement with the finite-difference oracle (~1e-7)
FROZEN = {
    "cos:10,1": ([4.572518215935242, 39.26756633642216, 88.96520308920972],
                 [0.8720828169980259, 23.123999087803966, 61.92857692814144]),
    "linear:-3,6": ([9.830131721919516, 39.49016923545135, 88.83345631678432],
                    [3.6041422739198192, 22.382530653490342, 61.74654881533892]),
}


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen_low_eigenvalues(name):
    s = compute_spectra(name, 3)
    dd, nd = FROZEN[name]
    assert np.allclose(s.dd, dd, rtol=0, atol=1e-9)
    assert np.allclose(s.nd, nd, rtol=0, atol=1e-9)


def test_finite_difference_oracle():
    q = Potential.registry("linear:-3,6")
    s = compute_spectra(q, 10)
    assert np.max(np.abs(s.dd - fd_richardson(q, 10))) < 1e-6


def test_free_spectra():
    s = compute_spectra("zero", 20)
    n = np.arange(1, 21)
    assert np.allclose(s.dd, np.pi**2 * n**2, rtol=1e-10)
    assert np.allclose(s.nd, np.pi**2 * (n - 0.5) ** 2, rtol=1e-10)
    assert s.interlaces()


@given(st.floats(0.5, 40.0))
@settings(max_examples=8, deadline=None)
def test_constant_shift_identity(c):
    s = compute_spectra(Potential.registry(f"const:{c!r}"), 8)
    n = np.arange(1, 9)
    assert np.allclose(s.dd - np.pi**2 * n**2, c, atol=1e-7)
    assert np.allclose(s.nd - np.pi**2 * (n - 0.5) ** 2, c, atol=1e-7)


def test_shifted_potential_moves_spectrum():
    base = compute_spectra("cos:10,1", 5)
    moved = compute_spectra(Potential.registry("cos:10,1", shift=2.0), 5)
    assert np.allclose(moved.dd - base.dd, 2.0, atol=1e-8)


def test_negative_operator_rejected():
    with pytest.raises(SpectrumError):
        compute_spectra("const:-10", 5)


def test_fit_models():
    s = compute_spectra("cos:10,1", 30)
    fit = asymptotic_fit(s)
    assert abs(fit.C_hat) < 1e-4
    # residuals ~ 100/(8 pi^2 n^2) bias the plain mean
    assert asymptotic_fit(s, "mean").C_hat > 1e-3
    assert fit.fit_indices == (16, 30)
    with pytest.raises(ValueError):
        asymptotic_fit(s, "cubic")


def test_sqrt_transform():
    s = compute_spectra("const:5", 5)
    lam, mu = sqrt_transform(s, 5.0)
    assert lam.parity == "sine" and mu.parity == "cosine"
    assert np.allclose(lam.positive**2, s.dd)


def test_free_weyl_and_theta():
    ev = free_db()
    x = np.array([0.3, 1.1, 2.0])
    assert np.allclose(weyl_m(ev, x), np.tan(x))
    z = np.array([1j, 2 + 0.5j])
    assert np.allclose(theta(ev, z), -np.exp(2j * z))
    assert abs(theta(ev, 1j) - (-np.exp(-2))) < 1e-15


def test_weyl_series_matches_ratio():
    ev = SchrodingerDB("const:5")
    s = compute_spectra("const:5", 400)
    mu = np.sqrt(s.nd)
    v = weyl_coefficients(ev, mu)
    z = np.array([2.0j, 1.0 + 3.0j])
    # m = A/B is odd with poles at +-mu_n; partial fractions converge slowly
    assert np.allclose(weyl_m_series(mu, v, z), weyl_m(ev, z), atol=2e-3)


def test_free_phase():
    pd = phase(free_db(), np.linspace(-20, 20, 401))
    assert np.allclose(pd.phi, pd.grid, atol=1e-12)
    assert np.allclose(pd.phi_prime, 1.0, atol=1e-7)
    assert pd.delta_gap == pytest.approx(1.0, abs=1e-7)


def test_phase_reproduces_spectra():
    ev = SchrodingerDB("cos:10,1")
    pd = phase(ev, np.linspace(-16, 16, 801))
    assert np.all(np.diff(pd.phi) > 0)
    dd, nd = spectra_from_phase(pd, ev)
    s = compute_spectra("cos:10,1", 4)
    assert np.allclose(dd[:4], s.dd, atol=1e-8)
    assert np.allclose(nd[:4], s.nd, atol=1e-8)


def test_phase_bound_empty():
    pd = phase(free_db(), np.linspace(-5, 5, 51))
    assert phase_bound_violation(pd, []) < 0
