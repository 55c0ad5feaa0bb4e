import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twistmoyal import DeformationParams, PhaseFunction, commutator, star
from twistmoyal.star import (associativity_residual, expected_commutator, jacobiator,
                             left_action_rule, right_action_rule)
from twistmoyal.phase import VARIABLES

P = DeformationParams(theta=Fraction(1, 3), thetabar=2, hbar_eff=Fraction(1, 2), omega1=1, omega2=-2)
OMEGA = P.omega

small = st.integers(-3, 3)
exps = st.tuples(*(st.integers(0, 2) for _ in range(4)))


@st.composite
def polys(draw):
    f = PhaseFunction.constant(0, OMEGA)
    for _ in range(draw(st.integers(1, 3))):
        f = f + PhaseFunction.monomial(draw(exps), OMEGA, coeff=draw(small))
    return f


def test_unit_is_neutral():
    one = PhaseFunction.constant(1, OMEGA)
    f = PhaseFunction.monomial((1, 2, 0, 1), OMEGA)
    assert star(one, f, P) == f == star(f, one, P)


@given(polys(), polys(), polys(), small)
def test_bilinear(f, g, h, c):
    assert star(f + h.scale(c), g, P) == star(f, g, P) + star(h, g, P).scale(c)
    assert star(f, g + h, P) == star(f, g, P) + star(f, h, P)


@given(polys(), polys())
def test_commutator_antisymmetric(f, g):
    assert commutator(f, g, P) == -commutator(g, f, P)


@given(polys(), polys())
def test_conjugation_reverses_order(f, g):
    assert star(f, g, P).conjugate() == star(g.conjugate(), f.conjugate(), P)


@pytest.mark.parametrize("a,b", list(itertools.combinations(VARIABLES, 2)))
def test_coordinate_commutators(a, b):
    x = {v: PhaseFunction.variable(v, OMEGA) for v in VARIABLES}
    assert commutator(x[a], x[b], P) == expected_commutator(a, b, P)


@given(exps)
def test_action_rules(e):
    f = PhaseFunction.monomial(e, OMEGA)
    for v in VARIABLES:
        x = PhaseFunction.variable(v, OMEGA)
        assert star(x, f, P) == left_action_rule(v, f, P)
        assert star(f, x, P) == right_action_rule(v, f, P)


def test_jacobiator_vanishes():
    for t in itertools.product((1, 2), repeat=3):
        assert jacobiator(*t, P).is_zero()


def test_associativity_defect_is_order_theta_squared():
    # nonassociativity on x1 * x1 * x2 is a structural property of this star product
    d = DeformationParams()
    x1, x2 = (PhaseFunction.variable(v, d.omega) for v in ("x1", "x2"))
    r = associativity_residual(x1, x1, x2, d)
    assert r == (x2 + PhaseFunction.constant(1, d.omega)).scale(Fraction(1, 4))
    assert associativity_residual(x1, x2, x1, d).is_zero()
