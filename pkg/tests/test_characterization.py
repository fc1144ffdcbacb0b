import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq
from scipy.special import polygamma

from debranges import (PairingFunction, SchrodingerDB, check_pair, check_schrodinger_L2,
                       construct_from_f, free_db, pairing_eval, perturbed_zero_solve)
from debranges.characterization import (bracketed_newton, even_pw_function,
                                        five_point_derivative, sinc_prime)
from debranges.products import (CanonicalProduct, ProductDB, ZeroSequence,
                                perturbed_sine_sequence)
from debranges.resonances import remark5_fixture


def test_free_pairing_vanishes():
    x = np.linspace(-30, 30, 61)
    assert np.max(np.abs(pairing_eval(PairingFunction(free_db()), x))) < 1e-14
    v = check_schrodinger_L2(free_db(), M=200)
    assert v.verdict and abs(v.C_hat) < 1e-14


def test_constant_potential_limit():
    # F(x) -> -c/2 for q = c
    v = check_schrodinger_L2(SchrodingerDB("const:5"), M=600)
    assert v.verdict
    assert v.C_hat == pytest.approx(-2.5, abs=1e-3)
    assert v.evenness_error < 1e-9 and v.realness_error < 1e-9
    d = json.loads(v.to_json())
    assert d["checks"] == {"membership": True, "membership_shifted": True, "even": True,
                           "real": True}


def test_perturbed_sequence_is_rejected():
    A = CanonicalProduct(perturbed_sine_sequence(2000), 1.0)
    B = CanonicalProduct(ZeroSequence.lattice_sequence(2000, "cosine", 0.0), 1.0)
    v = check_schrodinger_L2(ProductDB(A, B), M=1000)
    assert not v.verdict
    # the unshifted lattice sits on zeros of sin z and cannot see the defect
    assert v.report.verdict and not v.shifted_report.verdict


def test_pair_mode_against_itself():
    ev = SchrodingerDB("cos:10,1")
    x = np.linspace(-10, 10, 21)
    assert np.max(np.abs(pairing_eval(PairingFunction(ev, ev, "pair"), x))) < 1e-9
    v = check_pair(ev, free_db(), M=300)
    assert v.verdict
    with pytest.raises(ValueError):
        PairingFunction(ev, None, "pair")


def test_remark5_fixture_in_class():
    fx = remark5_fixture()
    v = check_schrodinger_L2(fx.E, M=2000)
    assert v.verdict and abs(v.C_hat) < 1e-10
    x = np.array([0.7, 2.0, np.pi, 11.0])
    assert np.allclose(pairing_eval(PairingFunction(fx.E), x), fx.pairing(x), atol=1e-12)
    assert fx.pairing(np.array([np.pi]))[0].real == pytest.approx(7 * np.pi**2 / 32)


def test_sinc_prime_and_derivative():
    z = np.array([1e-3, 0.5, 3.0, 1.0 + 1.0j])
    ref = (z * np.cos(z) - np.sin(z)) / z**2
    assert np.allclose(sinc_prime(z), ref, atol=1e-12)
    assert five_point_derivative(np.sin, 0.3) == pytest.approx(np.cos(0.3), abs=1e-11)


@given(st.lists(st.tuples(st.integers(-50, 50), st.floats(0.01, 1.5), st.floats(0.01, 1.5)),
                min_size=1, max_size=20))
@settings(max_examples=30, deadline=None)
def test_bracketed_newton_roots(brackets):
    k, a, b = (np.array(v, dtype=float) for v in zip(*brackets))
    root = np.pi * k
    x, ok = bracketed_newton(np.sin, root - a, root + b)
    assert np.all(ok)
    assert np.allclose(x, root, atol=1e-12)
    _, ok = bracketed_newton(np.sin, root + 0.1, root + 0.2)
    assert not np.any(ok)


def test_construct_zero_function():
    db = construct_from_f("zero", n_zeros=20, M=200)
    n = np.arange(1, 21)
    assert db.interlacing_ok
    assert np.allclose(db.lam, np.pi * n, atol=1e-12)
    assert np.allclose(db.mu, np.pi * n - np.pi / 2, atol=1e-12)


def test_construct_small_sinc2():
    db = construct_from_f("sinc2", 0.05, n_zeros=100, M=2000)
    r = db.report
    assert db.interlacing_ok and r["within_regime"]
    assert r["Q_sup_error"] < 1e-6
    # lambda_n - pi n ~ C/n with C = amp/pi here
    n = np.arange(1, 101)
    assert np.allclose((n * (db.lam - np.pi * n))[40:], 0.05 / np.pi, rtol=1e-2)
    assert db.C1 == pytest.approx(1.0, abs=1e-6) and db.C2 == pytest.approx(1.0, abs=1e-6)
    # E = A + iB built this way is again in the class
    v = check_schrodinger_L2(db, M=1000)
    assert v.verdict


def test_construct_large_amplitude_breaks_interlacing():
    db = construct_from_f("sinc2", 50.0, n_zeros=20, M=400)
    assert not db.interlacing_ok
    assert not db.report["within_regime"]


def test_construct_callable_matches_registry():
    tf = even_pw_function("sinc4", 0.02)
    a = construct_from_f(tf, n_zeros=10, M=400)
    b = construct_from_f(tf.fun, n_zeros=10, M=400)
    assert np.allclose(a.lam, b.lam, atol=1e-9)
    with pytest.raises(KeyError):
        even_pw_function("gauss")


def _brute_equation(x, t, cw, C, K, extra=20000):
    k = np.arange(K + 1, K + extra + 1) * np.pi
    tail = np.sum(1 / (k * (x - k))) + np.sum(1 / (-k * (x + k)))
    # remaining pairs are -2/(pi k)^2 + O(k^-4)
    tail -= 2 / np.pi**2 * polygamma(1, K + extra + 1)
    return 1 + np.sum(cw / (x - t)) + C * tail


def test_perturbed_zero_solve_oracle():
    K = 30
    t = np.pi * np.arange(-K, K + 1)
    rng = np.random.default_rng(3)
    c = 0.02 * rng.standard_normal(len(t))
    for n in (K + 1, K + 7, 2 * K):
        res = perturbed_zero_solve(t, c, n, tail_const=-0.05)
        g = lambda x: (x - t[n]) * _brute_equation(x, t, c, -0.05, K)
        ref = brentq(g, t[n] - 1.0, t[n] + 1.0, xtol=1e-15)
        assert abs(res.root - ref) < 1e-9  # brute tail truncated at 20000 terms
        assert abs(res.first_order - (t[n] - c[n])) < 1e-15


def test_perturbed_zero_solve_trivial():
    t = np.pi * np.arange(-5, 6)
    res = perturbed_zero_solve(t, np.zeros(11), 7)
    assert res.root == pytest.approx(t[7], abs=1e-14)
    with pytest.raises(IndexError):
        perturbed_zero_solve(t, np.zeros(11), 11)
    with pytest.raises(ValueError):
        perturbed_zero_solve(t + 0.1, np.zeros(11), 3, tail_const=1.0)
