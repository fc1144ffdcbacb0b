import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from debranges.paley_wiener import (BandlimitedSamples, cardinal_eval, membership_from_samples,
                                    pw_membership_test, riesz_expand, sample)
from debranges.products import CanonicalProduct, ZeroSequence


def sinc2(z):
    z = np.asarray(z, dtype=float)
    return np.sinc(z / np.pi) ** 2


def half_sinc(z, p):
    z = np.asarray(z, dtype=float)
    return np.sinc(z / (2 * np.pi)) ** p


def test_plancherel_against_quadrature():
    s = sample(sinc2, 2.0, 2000)
    # split at multiples of pi to keep quad happy
    edges = np.pi * np.arange(0, 401)
    ref = 2 * sum(quad(lambda x: sinc2(x) ** 2, a, b)[0] for a, b in zip(edges[:-1], edges[1:]))
    assert s.plancherel_norm() ** 2 == pytest.approx(ref, rel=1e-6)


def test_reconstruction_sinc2():
    s = sample(sinc2, 2.0, 2000)
    x = np.linspace(-50, 50, 401) + 0.123
    assert np.max(np.abs(cardinal_eval(s, x) - sinc2(x))) < 1e-8


def test_reconstruction_bound_is_honest():
    s = sample(lambda x: half_sinc(x, 2), 1.0, 300)
    x = np.linspace(-40, 40, 81) + 0.37
    val, bound = cardinal_eval(s, x, return_bound=True)
    assert np.all(np.abs(val - half_sinc(x, 2)) <= bound + 1e-15)


def test_offset_lattice_and_complex_points():
    f = lambda z: np.sinc(np.asarray(z) / np.pi) ** 2
    s = sample(f, 2.0, 1500, offset=np.pi / 4)
    z = np.array([0.3 + 0.2j, -5.0 + 1.0j])
    exact = (np.sin(z) / z) ** 2
    assert np.allclose(cardinal_eval(s, z), exact, atol=1e-7)


def test_averaged_summation_for_bounded_function():
    # sin has type 1, sampled at the rate of type 2
    s = sample(np.sin, 2.0, 2000)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        plain = cardinal_eval(s, np.array([1.0]))
    assert any(issubclass(w.category, RuntimeWarning) for w in rec)
    avg = cardinal_eval(s, np.array([1.0]), summation="averaged")
    assert abs(avg[0] - np.sin(1.0)) < 1e-6 < abs(plain[0] - np.sin(1.0))
    with pytest.raises(ValueError):
        cardinal_eval(s, np.array([1.0]), summation="fejer")


def test_sample_validation():
    with pytest.raises(ValueError):
        BandlimitedSamples(1.0, 0.0, np.ones(4), np.pi)
    with pytest.raises(ValueError):
        BandlimitedSamples(1.0, 0.0, np.ones(5), 2.0)
    with pytest.raises(ValueError):
        BandlimitedSamples(np.pi, 0.0, np.array([1.0, np.nan, 1.0]), 1.0)


@given(st.floats(-5, 5), st.floats(0.1, 3.0))
@settings(max_examples=20, deadline=None)
def test_membership_constant_plus_l2(c, a):
    rep = pw_membership_test(lambda x: c + a * sinc2(x), M=800)
    assert rep.verdict
    assert rep.C_hat == pytest.approx(c, abs=1e-5)
    assert np.all(np.diff(rep.cumsum) >= 0)


def test_membership_negative():
    # bounded oscillation with no limit
    rep = pw_membership_test(lambda x: np.cos(np.sqrt(np.abs(x))), M=2000)
    assert not rep.verdict
    assert rep.tail_increment > rep.tail_fraction * rep.total


def test_membership_noise_floor():
    rng = np.random.default_rng(0)
    v = 3.0 + 1e-9 * rng.standard_normal(2001)
    rep = membership_from_samples(v, np.pi / 2)
    assert rep.verdict and rep.tail_rms < rep.atol
    assert not membership_from_samples(v, np.pi / 2, atol=0).verdict
    with pytest.raises(ValueError):
        membership_from_samples(np.ones(6), 1.0)


def test_report_json():
    rep = pw_membership_test(sinc2, M=50)
    import json
    d = json.loads(rep.to_json())
    assert d["verdict"] is True and len(d["cumsum"]) == 51


def test_riesz_on_lattice_reduces_to_cardinal():
    zs = ZeroSequence.lattice_sequence(300, "sine", 0.0)
    G = CanonicalProduct(zs)
    nodes = zs.entries()
    vals = np.sinc(nodes / (2 * np.pi)) ** 2
    ex = riesz_expand(zs, G, vals)
    assert np.max(np.abs(ex(nodes) - vals)) <= 1e-10
    s = BandlimitedSamples(np.pi, 0.0, vals, 1.0)
    x = np.linspace(-30, 30, 61) + 0.2
    assert np.allclose(ex(x), cardinal_eval(s, x), atol=1e-12)


def test_riesz_perturbed_nodes():
    pos = np.pi * np.arange(1, 201) + 0.2 * np.sin(np.arange(1, 201))
    zs = ZeroSequence(pos, "sine", 0.0)
    G = CanonicalProduct(zs)
    nodes = zs.entries()
    vals = np.sinc(nodes / (2 * np.pi)) ** 2
    ex = riesz_expand(zs, G, vals)
    assert np.max(np.abs(ex(nodes) - vals)) <= 1e-10
    # the interpolant of samples of a PW_1 function is that function
    x = np.linspace(-20, 20, 41) + 0.1
    val, bound = ex(x, return_bound=True)
    assert np.all(np.abs(val - np.sinc(x / (2 * np.pi)) ** 2) <= 1e-3)
    with pytest.raises(ValueError):
        riesz_expand(zs, G, vals[:-1])
    with pytest.raises(ValueError):
        riesz_expand(ZeroSequence.lattice_sequence(200), G, vals)
