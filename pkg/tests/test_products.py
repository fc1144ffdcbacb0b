import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from debranges.products import (CanonicalProduct, ProductDB, ZeroSequence, canonical_products,
                                derivative_at_zeros, eval_product, imaginary_axis_profile,
                                perturbed_sine_sequence, ratio_to_trig, richardson_limits,
                                two_sided_ratio, value_and_derivative_at_zeros)


def _const_A(z, c=5.0):
    r = np.sqrt(z**2 - c + 0j)
    return z * np.sin(r) / r


def _const_B(z, c=5.0):
    return np.cos(np.sqrt(z**2 - c + 0j))


def test_lattice_gives_trig():
    z = np.array([0.4, 3.0 + 1.0j, 50.5 - 0.3j, 150.0 + 2.0j])
    s = CanonicalProduct(ZeroSequence.lattice_sequence(50, "sine"))
    c = CanonicalProduct(ZeroSequence.lattice_sequence(50, "cosine"))
    assert s.C1 == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(eval_product(s, z), np.sin(z), rtol=1e-12)
    assert np.allclose(eval_product(c, z), np.cos(z), rtol=1e-12)


def test_constant_shift_closed_form():
    # zeros sqrt(pi^2 n^2 + 5); K = A'(0) = sinh(sqrt 5)/sqrt 5
    K_A = np.sinh(np.sqrt(5)) / np.sqrt(5)
    K_B = np.cosh(np.sqrt(5))
    A = CanonicalProduct(ZeroSequence.lattice_sequence(40, "sine", 5.0), K_A)
    B = CanonicalProduct(ZeroSequence.lattice_sequence(40, "cosine", 5.0), K_B)
    z = np.array([0.7, 10.0 + 0.5j, 200.0 - 1.0j, 3j])
    assert np.allclose(eval_product(A, z), _const_A(z), rtol=1e-11)
    assert np.allclose(eval_product(B, z), _const_B(z), rtol=1e-11)
    assert A.C1 == pytest.approx(1.0, abs=1e-11)
    assert B.C1 == pytest.approx(1.0, abs=1e-11)


def test_ratio_to_trig_matches_quotient():
    A = CanonicalProduct(ZeroSequence.lattice_sequence(60, "sine", 5.0),
                         np.sinh(np.sqrt(5)) / np.sqrt(5))
    z = np.array([2.1 + 1j, -40.3 + 1j, 77.0 - 1j])
    assert np.allclose(ratio_to_trig(A, z), _const_A(z) / np.sin(z), rtol=1e-11)
    with pytest.raises(ValueError):
        ratio_to_trig(A, np.array([np.pi]))


def test_derivative_at_zeros():
    A = CanonicalProduct(ZeroSequence.lattice_sequence(30, "sine", 5.0),
                         np.sinh(np.sqrt(5)) / np.sqrt(5))
    lam = A.zeros.positive
    h = 1e-6
    fd = ((_const_A(lam + h) - _const_A(lam - h)) / (2 * h)).real
    assert np.allclose(derivative_at_zeros(A), fd, rtol=1e-7)


def test_zero_value_report_lattice():
    A = CanonicalProduct(ZeroSequence.lattice_sequence(30, "sine"))
    B = CanonicalProduct(ZeroSequence.lattice_sequence(30, "cosine"))
    rep = value_and_derivative_at_zeros(A, B)
    assert np.max(np.abs(rep.derivative_deviation)) < 1e-12
    assert np.max(np.abs(rep.cross_deviation)) < 1e-12


@given(st.lists(st.floats(-0.3, 0.3), min_size=10, max_size=10))
@settings(max_examples=20, deadline=None)
def test_product_vanishes_and_is_odd(shifts):
    pos = np.pi * np.arange(1, 11) + np.array(shifts)
    p = CanonicalProduct(ZeroSequence(pos, "sine", 0.0))
    assert np.all(np.abs(eval_product(p, pos)) < 1e-9 * (1 + np.abs(derivative_at_zeros(p))))
    z = np.array([1.3 + 0.4j, 25.0 - 2.0j])
    assert np.allclose(eval_product(p, -z), -eval_product(p, z), rtol=1e-12)
    # the finite product times the exact lattice tail
    direct = z * np.prod(1 - z[:, None] ** 2 / pos**2, axis=1)
    lat = np.pi * np.arange(1, 11)
    tail = np.sin(z) / (z * np.prod(1 - z[:, None] ** 2 / lat**2, axis=1))
    assert np.allclose(eval_product(p, z), direct * tail, rtol=1e-10)


def test_sequence_validation_and_json():
    with pytest.raises(ValueError):
        ZeroSequence(np.array([2.0, 1.0]))
    with pytest.raises(ValueError):
        ZeroSequence(np.array([1.0]), "tangent")
    zs = ZeroSequence.lattice_sequence(5, "cosine", 2.0)
    back = ZeroSequence.from_dict(zs.to_dict())
    assert np.array_equal(back.positive, zs.positive) and back.C_tail == 2.0


def test_perturbed_sequence():
    zs = perturbed_sine_sequence(100)
    assert zs.positive[0] == pytest.approx(1.25 * np.pi)
    assert np.allclose(zs.positive[1:], np.pi * np.arange(2, 101))


def test_imaginary_axis_profile_closed_form():
    A = CanonicalProduct(ZeroSequence.lattice_sequence(200, "sine", 5.0),
                         np.sinh(np.sqrt(5)) / np.sqrt(5))
    ys = [25.0, 50.0, 100.0]
    v = imaginary_axis_profile(A, ys)
    mp = [float(y * (y * mpmath.sinh(mpmath.sqrt(y**2 + 5)) / (mpmath.sqrt(y**2 + 5)
                                                                 * mpmath.sinh(y)) - 1))
          for y in ys]
    assert np.allclose(v, mp, atol=1e-8)
    lim = richardson_limits(ys, v)
    assert np.all(np.abs(lim - 2.5) < 0.01)
    with pytest.raises(ValueError):
        richardson_limits([1, 3], [0, 0])


def test_two_sided_ratio_bounded():
    p = CanonicalProduct(perturbed_sine_sequence(400))
    x = np.linspace(-100, 100, 801)
    r = np.concatenate([two_sided_ratio(p, x + 1j), two_sided_ratio(p, x - 1j)])
    assert r.min() > 0 and r.max() / r.min() < 10


def test_canonical_products_match_shooting():
    from debranges import SchrodingerDB
    A, B, s, fit = canonical_products("cos:10,1", N=60)
    ev = SchrodingerDB("cos:10,1")
    z = np.array([3.0 + 0.5j, 12.0 - 1.0j, 0.5j])
    Aq, Bq = ev.AB(z)
    assert np.allclose(eval_product(A, z), Aq, rtol=1e-7)
    assert np.allclose(eval_product(B, z), Bq, rtol=1e-7)
    db = ProductDB(A, B)
    assert np.allclose(db.E(z), ev.E(z), rtol=1e-7)
    with pytest.raises(ValueError):
        ProductDB(B, A)
