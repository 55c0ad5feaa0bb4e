"""Coefficient arithmetic helpers.

Two coefficient modes coexist: exact (sympy numbers and expressions, used when
every parameter is rational or symbolic) and float (python ``complex``).
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Number

import sympy as sp

FLOAT_ZERO_TOL = 1e-12


def coerce(value):
    """Bring a scalar into one of the two coefficient modes."""
    if isinstance(value, sp.Basic):
        return value
    if isinstance(value, bool):
        return sp.Integer(int(value))
    if isinstance(value, int):
        return sp.Integer(value)
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, (float, complex)):
        return complex(value)
    if isinstance(value, Number):
        return complex(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


def clean(c):
    if isinstance(c, sp.Basic):
        if c.is_Number:
            return c
        return sp.expand(c)
    return c


def is_zero(c) -> bool:
    if isinstance(c, sp.Basic):
        return clean(c) == 0
    return abs(c) < FLOAT_ZERO_TOL


def is_exact(c) -> bool:
    return isinstance(c, sp.Basic)


def conj(c):
    if isinstance(c, sp.Basic):
        return clean(sp.conjugate(c))
    return c.conjugate()


def real(c):
    if isinstance(c, sp.Basic):
        return clean(sp.re(c))
    return complex(c.real)


def imag(c):
    if isinstance(c, sp.Basic):
        return clean(sp.im(c))
    return complex(c.imag)


def to_complex(c) -> complex:
    if isinstance(c, sp.Basic):
        return complex(sp.N(c, 20))
    return complex(c)


def fmt(c) -> str:
    if isinstance(c, sp.Basic):
        return sp.sstr(c)
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return repr(c)


def exact_pow(base, n: int):
    """``base**n`` that keeps exact coefficients exact."""
    if isinstance(base, sp.Basic):
        return clean(base ** n)
    return base ** n


def factorial_inv(n: int):
    return sp.Rational(1, sp.factorial(n))


def json_parts(c):
    """(re, im) for serialization: floats for numbers, strings for symbols."""
    if isinstance(c, sp.Basic):
        c = clean(c)
        if c.free_symbols:
            return sp.sstr(sp.re(c)), sp.sstr(sp.im(c))
        z = complex(sp.N(c, 20))
        return z.real, z.imag
    z = complex(c)
    return z.real, z.imag


def from_json_parts(re, im):
    if isinstance(re, str) or isinstance(im, str):
        return clean(sp.sympify(re) + sp.I * sp.sympify(im))
    return complex(re, im)
