from fractions import Fraction

import pytest
import sympy as sp

from twistmoyal import DeformationParams, ParameterError


def test_defaults():
    p = DeformationParams()
    assert (p.theta, p.thetabar, p.hbar_eff, p.omega1, p.omega2) == (1, 1, 1, 0, 1)
    assert p.exact


def test_from_string_exact_and_aliases():
    p = DeformationParams.from_string("theta=1/2, w2=2")
    assert p.theta == sp.Rational(1, 2) and p.omega2 == 2
    assert p.gamma == 1


def test_preset_gamma_is_one():
    p = DeformationParams.unit_gamma_preset()
    assert p.gamma == 1 and p.omega1 == 0


@pytest.mark.parametrize("text", ["theta", "foo=1", "theta=abc", "theta=1/0"])
def test_malformed(text):
    with pytest.raises(ParameterError):
        DeformationParams.from_string(text)


def test_float_mode_wins():
    p = DeformationParams(theta=0.5, omega2=Fraction(3, 2))
    assert not p.exact
    assert p.real_value("omega2") == 1.5


def test_symbolic_float_mix_rejected():
    with pytest.raises(ParameterError):
        DeformationParams(theta=sp.Symbol("t"), omega2=0.5)


def test_as_dict_round_trip():
    p = DeformationParams(theta=Fraction(2, 3), omega1=-1)
    assert DeformationParams.from_mapping(p.as_dict()) == p
