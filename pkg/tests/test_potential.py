import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from debranges.potential import Potential, PotentialError, as_potential


@pytest.mark.parametrize("name, mean", [("zero", 0.0), ("const:5", 5.0), ("cos:10,1", 0.0),
                                        ("linear:-3,6", 0.0), ("linear:1,2", 2.0)])
def test_registry_means(name, mean):
    assert Potential.registry(name).mean == pytest.approx(mean, abs=1e-12)


def test_registry_values():
    q = as_potential("cos:10,1")
    t = np.linspace(0, 1, 7)
    assert np.allclose(q(t), 10 * np.cos(2 * np.pi * t))
    assert np.allclose(as_potential("linear:-3,6")(t), -3 + 6 * t)


@pytest.mark.parametrize("bad", ["nope", "const", "cos:1", "linear:1,2,3"])
def test_registry_rejects(bad):
    with pytest.raises(PotentialError):
        Potential.registry(bad)


def test_shift_adds_constant():
    q = Potential.registry("cos:10,1", shift=3.0)
    assert q(np.array([0.25]))[0] == pytest.approx(3.0, abs=1e-12)
    # the mean refers to the base function; the shift is carried separately
    assert q.mean == pytest.approx(0.0, abs=1e-12)
    assert q.label() == "cos:10,1+3"


def test_grid_and_piecewise():
    t = np.linspace(0, 1, 11)
    g = Potential.grid(t**2, order=3)
    assert g(np.array([0.55]))[0] == pytest.approx(0.3025, abs=1e-12)
    assert g.mean == pytest.approx(1 / 3, abs=1e-12)
    pw = Potential.piecewise([(0.0, 0.5, [1.0]), (0.5, 1.0, [0.0, 2.0])])
    assert pw.mean == pytest.approx(0.5 + 0.25)
    assert np.allclose(pw(np.array([0.25, 0.75])), [1.0, 0.5])


@given(st.sampled_from(["zero", "const:2.5", "cos:3,2", "linear:1,-1"]),
       st.floats(-10, 10, allow_nan=False))
@settings(max_examples=25, deadline=None)
def test_json_round_trip(name, shift):
    q = Potential.registry(name, shift=shift)
    back = Potential.from_json(q.to_json())
    t = np.linspace(0, 1, 9)
    assert np.array_equal(back(t), q(t))
    assert back.to_dict() == q.to_dict()


def test_as_potential_rejects_numbers():
    with pytest.raises(PotentialError):
        as_potential(3.0)
