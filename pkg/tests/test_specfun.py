import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistmoyal import (ConvergenceError, DomainError, ParameterError, QuadratureSpec, bessel_k,
                        hermite, integrate, psi1, psi2)
from twistmoyal.specfun import bessel_k_derivative, psi1_parts, psi2_second_derivative

zs = st.floats(0.01, 30)
orders = st.complex_numbers(max_magnitude=6, allow_nan=False, allow_infinity=False)


def test_integrate_examples():
    assert abs(integrate(lambda t: t * t, 0.0, 3.0) - 9.0) < 1e-12
    assert abs(integrate(lambda t: 1 / (1 + t * t), 0.0, np.inf) - math.pi / 2) < 1e-10
    assert abs(integrate(lambda t: np.sqrt(t), 1.0, 0.0) + 2 / 3) < 1e-12


def test_integrate_reports_nonconvergence():
    with pytest.raises(ConvergenceError):
        integrate(lambda t: np.sin(200 * t), 0.0, 1.0, QuadratureSpec(max_levels=2))


def test_quadrature_spec_validation():
    with pytest.raises(ParameterError):
        QuadratureSpec(abs_tol=1e-16)
    with pytest.raises(ParameterError):
        QuadratureSpec(max_levels=30)


@given(zs)
def test_half_order_closed_form(z):
    assert abs(bessel_k(0.5, z) - math.sqrt(math.pi / (2 * z)) * math.exp(-z)) < 1e-12


@given(orders, zs)
def test_even_in_order(nu, z):
    a, b = bessel_k(nu, z), bessel_k(-nu, z)
    assert abs(a - b) <= 1e-12 * max(1, abs(a))


@given(orders, zs)
def test_recurrence(nu, z):
    k0 = bessel_k(nu, z)
    r = bessel_k(nu + 1, z) - bessel_k(nu - 1, z) - 2 * nu / z * k0
    assert abs(r) <= 1e-9 * max(1, abs(k0))


def test_pinned_against_oracle(oracle):
    assert bessel_k(0, 1.0) == pytest.approx(oracle["besselK_0_at_1"], rel=1e-12)
    assert bessel_k(0.5, 1.0) == pytest.approx(oracle["besselK_half_at_1"], rel=1e-12)
    ref = complex(*oracle["besselK_half_plus_i_at_2"])
    assert abs(bessel_k(0.5 + 1j, 2.0) - ref) < 1e-12
    assert float(psi1(1.0, 0.0)) == pytest.approx(oracle["psi1_E1_1_at_0"], rel=1e-12)
    assert float(psi1_parts(1.0, 0.0)[1]) == pytest.approx(oracle["dpsi1_E1_1_at_0"], rel=1e-10)


def test_derivative_matches_difference():
    h = 1e-4
    nu, z = 0.5 + 2j, 1.7
    fd = (bessel_k(nu, z + h) - bessel_k(nu, z - h)) / (2 * h)
    assert abs(bessel_k_derivative(nu, z) - fd) < 1e-7


@pytest.mark.parametrize("nu,z", [(25, 1.0), (1, 1e-4), (1, 60.0), (1, float("nan"))])
def test_domain(nu, z):
    with pytest.raises(DomainError):
        bessel_k(nu, z)


def test_hermite_values_and_parity():
    assert [hermite(n, 1) for n in range(5)] == [1, 2, 2, -4, -20]
    x = np.linspace(-2, 2, 7)
    for n in range(8):
        assert np.allclose(hermite(n, -x), (-1) ** n * hermite(n, x))


def test_psi2_matches_explicit_formula():
    p = np.linspace(-3, 3, 13)
    for n in range(8):
        explicit = hermite(n, p) * np.exp(-p * p / 2) / math.sqrt(2 ** n * math.factorial(n) * math.sqrt(math.pi))
        assert np.allclose(psi2(n, p), explicit, atol=1e-14)


def test_psi2_eigen_equation():
    p = np.linspace(-5, 5, 41)
    for n in range(12):
        r = -psi2_second_derivative(n, p) + p * p * psi2(n, p) - (2 * n + 1) * psi2(n, p)
        assert np.max(np.abs(r)) < 1e-12


def test_psi1_real_and_decaying():
    x = np.linspace(0.5, 3.5, 20)
    v = psi1(2.0, x)
    assert v.dtype.kind == "f"
    assert np.all(np.diff(np.abs(v[5:])) < 0)


def test_psi1_normalisation_singular_at_zero():
    with pytest.raises(DomainError):
        psi1(0.0, 0.0)
    assert np.isfinite(psi1(0.0, 0.0, normalized=False))
