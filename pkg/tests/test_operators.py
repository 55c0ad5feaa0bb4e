import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistmoyal import (AnalyticFunction, DeformationParams, DiffOperator, Grid, GridError,
                        PhaseFunction, RepresentationError, TildeFunction, TruncationWarning,
                        apply_numeric, expand_left_star, h1_star_operator, trig_to_shift)
from twistmoyal.operators import (comparison_report, derivative_handle, oracle_check,
                                  printed_h1_operator, recombine)
from twistmoyal.transform import oscillator_hamiltonian

ONE = TildeFunction.constant(1)


@st.composite
def tilde_polys(draw):
    f = TildeFunction.constant(0)
    for _ in range(draw(st.integers(1, 4))):
        key = (draw(st.integers(0, 3)), draw(st.integers(0, 6)), 0, draw(st.integers(0, 1)), 0)
        f = f + TildeFunction({key: draw(st.integers(-5, 5))})
    return f


@given(tilde_polys(), st.sampled_from(["cos", "sin"]), st.sampled_from([1, Fraction(1, 2), 3]))
def test_trig_shift_matches_taylor(psi, func, scale):
    op = DiffOperator.trig("xt2", func, scale, ONE)
    assert op.apply(psi, trig="shift") == op.apply(psi, trig="taylor")
    assert trig_to_shift(op).apply(psi) == op.apply(psi, trig="taylor")


def test_sin_of_derivative_on_exponential():
    psi = TildeFunction.exp_xt1(1)
    op = DiffOperator.trig("xt1", "sin", Fraction(1, 2), ONE)
    got = op.apply(psi, trig="shift").evaluate(xt1=0.3)
    assert abs(got - np.sin(0.5) * np.exp(0.3)) < 1e-14


def test_identity_and_linearity():
    psi = TildeFunction.variable("xt1") * TildeFunction.variable("pt2")
    ident = DiffOperator.multiplication(ONE)
    d = DiffOperator.derivative((1, 0, 0, 0), ONE)
    assert ident.apply(psi) == psi
    assert (ident + d).apply(psi) == psi + TildeFunction.variable("pt2")
    assert (d - d).is_zero()


def test_real_part_rejects_shifts():
    op = DiffOperator.shift("xt2", 1j, TildeFunction.constant(1.0, exact=False))
    with pytest.raises(RepresentationError):
        op.real_part()


def test_finite_difference_accuracy():
    f = AnalyticFunction(lambda a, b, c, d: np.sin(a))
    x = np.linspace(-2, 2, 9)
    d1 = derivative_handle(f, (1, 0, 0, 0))(x, 0, 0, 0)
    d2 = derivative_handle(f, (2, 0, 0, 0))(x, 0, 0, 0)
    assert np.max(np.abs(d1 - np.cos(x))) < 1e-11
    assert np.max(np.abs(d2 + np.sin(x))) < 1e-8


def test_apply_numeric_matches_exact_application():
    psi = TildeFunction.variable("xt2") ** 3 + TildeFunction.variable("xt1")
    op = DiffOperator.trig("xt2", "cos", 1, ONE) + DiffOperator.derivative((0, 1, 0, 0), ONE)
    grid = Grid.parse("xt1:-1:1:5,xt2:-1:1:7")
    f = AnalyticFunction(lambda a, b, c, d: b ** 3 + a)
    got = apply_numeric(op, f, grid)
    xs = grid.coordinates(("xt1", "xt2", "pt1", "pt2"))
    want = op.apply(psi).evaluate(*xs)
    assert np.max(np.abs(got - want)) < 1e-8


def test_apply_numeric_rejects_bad_step():
    with pytest.raises(GridError):
        apply_numeric(DiffOperator.multiplication(ONE), lambda *a: 0, Grid.parse("xt1:0:1:3"), step=0)


@pytest.mark.parametrize("params", [DeformationParams(), DeformationParams.unit_gamma_preset(),
                                    DeformationParams(theta=Fraction(1, 3), omega1=2, omega2=-1)])
def test_split_reconstructs_star_product(params):
    rows = oracle_check(oscillator_hamiltonian(params), params)
    assert rows and all(r["agree"] for r in rows)


def test_split_recombines():
    p = DeformationParams()
    split = expand_left_star(oscillator_hamiltonian(p), p)
    assert split.terminated
    assert split.hr.has_real_coefficients() and split.him.has_real_coefficients()
    psi = PhaseFunction.monomial((1, 1, 0, 2), p.omega)
    from twistmoyal import star
    assert recombine(split, psi) == star(oscillator_hamiltonian(p), psi, p)


def test_truncation_warns():
    p = DeformationParams()
    h = PhaseFunction.monomial((4, 4, 0, 0), p.omega)
    with pytest.warns(TruncationWarning):
        split = expand_left_star(h, p, order=1)
    assert not split.terminated


def test_comparison_report_lists_known_mismatches():
    rep = comparison_report(DeformationParams.symbolic())
    assert rep["mismatches"] == sum(not r["agree"] for r in rep["rows"])
    assert rep["mismatches"] > 0


def test_h1_operator_matches_printed_form():
    assert h1_star_operator() == printed_h1_operator()
