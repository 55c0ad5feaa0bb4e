"""Differential, trigonometric and shift operators built from star products.

A :class:`DiffOperator` is a finite sum of three kinds of terms, each with a
function coefficient (PhaseFunction or TildeFunction) multiplied after the
action::

    c(q) * d^alpha psi                    ("d", alpha)
    c(q) * cos(s d_v) psi, sin(s d_v) psi ("trig", v, "cos"|"sin", s)
    c(q) * psi(..., v + a, ...)           ("shift", v, a)

Left star multiplication by H is ``psi -> sum_alpha c_alpha d^alpha psi``.  Its
split is taken so that for real psi::

    H * psi = Hr(psi) + (i/2) Him(psi)

with real coefficients in both Hr and Him.
"""
from __future__ import annotations

import warnings
from math import comb
from typing import Callable, NamedTuple

import numpy as np
import sympy as sp

from . import _coeff
from .errors import GridError, RepresentationError, TruncationWarning
from .grid import Grid
from .params import DeformationParams
from .phase import VARIABLES, PhaseFunction
from .star import DEFAULT_ORDER, left_star_operator, star
from .tilde import TILDE_VARIABLES, TildeFunction
from .transform import block_gamma, transform_hamiltonian

_SERIES_CAP = 64


def _sort_key(key):
    return tuple(str(k) for k in key)


def _fmt_key(key, variables):
    kind = key[0]
    if kind == "d":
        return "*".join(f"d_{v}^{n}" if n > 1 else f"d_{v}" for v, n in zip(variables, key[1]) if n) or "1"
    if kind == "trig":
        return f"{key[2]}(({_coeff.fmt(key[3])})*d_{variables[key[1]]})"
    return f"shift({variables[key[1]]}, {_coeff.fmt(key[2])})"


class DiffOperator:
    """Immutable operator; see the module docstring for the term kinds.

    Examples
    --------
    >>> from twistmoyal.tilde import TildeFunction
    >>> x = TildeFunction.variable("xt2")
    >>> op = DiffOperator.trig("xt2", "cos", 1, TildeFunction.constant(1))
    >>> op.apply(x * x)
    TildeFunction((-1) + (1)*xt2^2)
    """

    __slots__ = ("_terms", "_variables")

    def __init__(self, terms=None, variables=TILDE_VARIABLES):
        self._variables = tuple(variables)
        out = {}
        for key, c in (terms or {}).items():
            key = self._normalise_key(key)
            out[key] = out[key] + c if key in out else c
        self._terms = {k: c for k, c in out.items() if not c.is_zero()}

    def _normalise_key(self, key):
        kind = key[0]
        if kind == "d":
            alpha = tuple(int(n) for n in key[1])
            if len(alpha) != 4 or min(alpha) < 0:
                raise ValueError("multi-index must be 4 non-negative integers")
            return ("d", alpha)
        if kind == "trig":
            if key[2] not in ("cos", "sin"):
                raise ValueError("trig function must be 'cos' or 'sin'")
            return ("trig", self._index(key[1]), key[2], _coeff.coerce(key[3]))
        if kind == "shift":
            return ("shift", self._index(key[1]), _coeff.coerce(key[2]))
        raise ValueError(f"unknown term kind {kind!r}")

    def _index(self, var):
        if isinstance(var, int) and 0 <= var < 4:
            return var
        try:
            return self._variables.index(var)
        except ValueError:
            raise ValueError(f"unknown variable {var!r}") from None

    # -- constructors ------------------------------------------------------
    @classmethod
    def multiplication(cls, coeff, variables=None):
        return cls({("d", (0, 0, 0, 0)): coeff}, variables or _variables_of(coeff))

    @classmethod
    def derivative(cls, alpha, coeff, variables=None):
        return cls({("d", tuple(alpha)): coeff}, variables or _variables_of(coeff))

    @classmethod
    def trig(cls, var, func, scale, coeff, variables=None):
        return cls({("trig", var, func, scale): coeff}, variables or _variables_of(coeff))

    @classmethod
    def shift(cls, var, amount, coeff, variables=None):
        return cls({("shift", var, amount): coeff}, variables or _variables_of(coeff))

    # -- protocol ----------------------------------------------------------
    @property
    def variables(self) -> tuple:
        return self._variables

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: _sort_key(kv[0]))

    @property
    def diff_terms(self):
        return [(k[1], c) for k, c in self.sorted_items() if k[0] == "d"]

    @property
    def trig_terms(self):
        return [(k[1:], c) for k, c in self.sorted_items() if k[0] == "trig"]

    @property
    def shift_terms(self):
        return [(k[1:], c) for k, c in self.sorted_items() if k[0] == "shift"]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _check(self, other):
        if not isinstance(other, DiffOperator):
            raise TypeError("can only combine DiffOperators")
        if other._variables != self._variables:
            raise ValueError("operators act on different variables")

    def __add__(self, other):
        self._check(other)
        merged = dict(self._terms)
        for k, c in other._terms.items():
            merged[k] = merged[k] + c if k in merged else c
        return DiffOperator(merged, self._variables)

    def __neg__(self):
        return DiffOperator({k: -c for k, c in self._terms.items()}, self._variables)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return DiffOperator({k: v.scale(c) for k, v in self._terms.items()}, self._variables)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return other._variables == self._variables and (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if not self._terms:
            return "DiffOperator(0)"
        return "DiffOperator(" + " + ".join(
            f"[{c!r}]*{_fmt_key(k, self._variables)}" for k, c in self.sorted_items()) + ")"

    # -- real / imaginary split --------------------------------------------
    def _split(self, part):
        if any(k[0] == "shift" for k in self._terms):
            raise RepresentationError("complex shifts are not real operators; split before trig_to_shift")
        return DiffOperator({k: getattr(c, part)() for k, c in self._terms.items()}, self._variables)

    def real_part(self):
        """Coefficient-wise real part (d, cos, sin are real operators)."""
        return self._split("real_part")

    def imag_part(self):
        return self._split("imag_part")

    def has_real_coefficients(self) -> bool:
        return all(c.is_real() for c in self._terms.values())

    # -- symbolic action ---------------------------------------------------
    def apply(self, psi, *, trig: str = "shift"):
        """Exact action on a PhaseFunction or TildeFunction.

        ``trig="shift"`` evaluates cos/sin through complex shifts,
        ``trig="taylor"`` through their (terminating) Taylor series.
        """
        if trig not in ("shift", "taylor"):
            raise ValueError("trig must be 'shift' or 'taylor'")
        total = None
        for key, c in self.sorted_items():
            kind = key[0]
            if kind == "d":
                val = psi
                for i, n in enumerate(key[1]):
                    for _ in range(n):
                        val = val.diff(self._variables[i])
            elif kind == "shift":
                val = _shift(psi, self._variables[key[1]], key[2])
            elif trig == "shift":
                unit = DiffOperator({key: c.constant_like(1)}, self._variables)
                val = trig_to_shift(unit).apply(psi)
            else:
                val = _trig_taylor(psi, self._variables[key[1]], key[2], key[3])
            term = c * val
            total = term if total is None else total + term
        return psi.constant_like(0) if total is None else total

    # -- serialisation -----------------------------------------------------
    def to_json(self):
        out = {"variables": list(self._variables), "diffTerms": [], "trigTerms": [], "shiftTerms": []}
        for key, c in self.sorted_items():
            coeff = {"expression": str(c.to_sympy()), "terms": c.to_json()}
            if key[0] == "d":
                out["diffTerms"].append({"alpha": list(key[1]), "coeff": coeff})
            elif key[0] == "trig":
                re, im = _coeff.json_parts(key[3])
                out["trigTerms"].append({"variable": self._variables[key[1]], "function": key[2],
                                         "scale": {"re": re, "im": im}, "coeff": coeff})
            else:
                re, im = _coeff.json_parts(key[2])
                out["shiftTerms"].append({"variable": self._variables[key[1]],
                                          "shift": {"re": re, "im": im}, "coeff": coeff})
        return out


def _variables_of(coeff):
    return VARIABLES if isinstance(coeff, PhaseFunction) else TILDE_VARIABLES


def _imag_unit(exact):
    return sp.I if exact else 1j


def _shift(psi, var, amount):
    if isinstance(psi, TildeFunction):
        return psi.shift(var, amount)
    # Taylor series, exact whenever psi is polynomial in var
    out, term = psi, psi
    for n in range(1, _SERIES_CAP):
        term = term.diff(var)
        if term.is_zero():
            return out
        out = out + term.scale(_coeff.exact_pow(amount, n) * _coeff.factorial_inv(n))
    raise RepresentationError(f"shift in {var} does not terminate on this function")


def _trig_taylor(psi, var, func, s):
    out = psi.constant_like(0)
    term = psi if func == "cos" else psi.diff(var)
    start = 0 if func == "cos" else 1
    for k in range(_SERIES_CAP):
        if term.is_zero():
            return out
        n = start + 2 * k
        c = _coeff.exact_pow(s, n) * _coeff.factorial_inv(n) * (-1) ** k
        out = out + term.scale(c)
        term = term.diff(var).diff(var)
    raise RepresentationError(f"trig series in {var} does not terminate on this function")


def trig_to_shift(op: DiffOperator) -> DiffOperator:
    """cos(s d) = (T(+is) + T(-is))/2 and sin(s d) = (T(+is) - T(-is))/(2i).

    Exact on polynomials and on exponentials, for which the Taylor series
    of the shift converges everywhere.
    """
    out = {}
    for key, c in op.terms.items():
        if key[0] != "trig":
            out[key] = out[key] + c if key in out else c
            continue
        _, i, func, s = key
        iu = _imag_unit(c.exact)
        half = sp.Rational(1, 2) if c.exact else 0.5
        plus, minus = ("shift", i, _coeff.clean(iu * s)), ("shift", i, _coeff.clean(-iu * s))
        if func == "cos":
            cp, cm = c.scale(half), c.scale(half)
        else:
            cp, cm = c.scale(half / iu), c.scale(-half / iu)
        for k, v in ((plus, cp), (minus, cm)):
            out[k] = out[k] + v if k in out else v
    return DiffOperator(out, op.variables)


# -- left star multiplication ---------------------------------------------------

class LeftStarSplit(NamedTuple):
    hr: DiffOperator
    him: DiffOperator
    terminated: bool


def left_operator(h: PhaseFunction, params: DeformationParams, order: int = DEFAULT_ORDER,
                  *, convention: str = "pointwise"):
    """``psi -> h * psi`` as a DiffOperator, plus the termination flag."""
    coeffs, done = left_star_operator(h, params, order, convention=convention)
    return DiffOperator({("d", a): c for a, c in coeffs.items()}, VARIABLES), done


def expand_left_star(h: PhaseFunction, params: DeformationParams, order: int = DEFAULT_ORDER,
                     *, convention: str = "pointwise") -> LeftStarSplit:
    """Split left star multiplication by h into real operators Hr, Him.

    ``h * psi = Hr(psi) + (i/2) Him(psi)`` for real psi.  A TruncationWarning
    is issued when the theta series did not terminate within ``order``.
    """
    op, done = left_operator(h, params, order, convention=convention)
    if not done:
        warnings.warn(f"star series truncated at order {order}", TruncationWarning, stacklevel=2)
    hr = op.real_part()
    him = op.imag_part().scale(2)
    return LeftStarSplit(hr, him, done)


def recombine(split: LeftStarSplit, psi):
    """``Hr(psi) + (i/2) Him(psi)``."""
    iu = _imag_unit(psi.exact)
    half = sp.Rational(1, 2) if psi.exact else 0.5
    return split.hr.apply(psi) + split.him.apply(psi).scale(iu * half)


def test_monomials(params, max_degree: int = 2):
    """All monomials in (x1, x2, p1, p2) of total degree at most ``max_degree``."""
    out = []
    for a in range(max_degree + 1):
        for b in range(max_degree + 1 - a):
            for c in range(max_degree + 1 - a - b):
                for d in range(max_degree + 1 - a - b - c):
                    out.append(PhaseFunction.monomial((a, b, c, d), params.omega))
    return out


test_monomials.__test__ = False  # not a pytest test


def oracle_check(h: PhaseFunction, params: DeformationParams, order: int = DEFAULT_ORDER,
                 *, convention: str = "pointwise", max_degree: int = 2) -> list[dict]:
    """Compare ``Hr + (i/2) Him`` with the star product on low-degree monomials."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        split = expand_left_star(h, params, order, convention=convention)
    rows = []
    for psi in test_monomials(params, max_degree):
        direct = star(h, psi, params, order, convention=convention)
        via = recombine(split, psi)
        diff = direct - via
        rows.append({"psi": str(psi.to_sympy()), "agree": diff.is_zero(),
                     "difference": str(diff.to_sympy())})
    return rows


def printed_oscillator_operators(params: DeformationParams) -> tuple[DiffOperator, DiffOperator]:
    """The real and imaginary operators for the oscillator as printed in the source.

    The duplicated '+ +' in the printed real part is read as a single '+'.
    """
    omega = params.omega
    exact = params.exact
    half = sp.Rational(1, 2) if exact else 0.5
    quarter = half * half
    th, tb, hb = params.theta, params.thetabar, params.hbar_eff
    w1, w2 = omega
    one = PhaseFunction.constant(1, omega)
    e = PhaseFunction.e_power(2, omega)
    x1, x2, p1, p2 = (PhaseFunction.variable(v, omega) for v in VARIABLES)

    def d(*idx):
        alpha = [0, 0, 0, 0]
        for i in idx:
            alpha[i] += 1
        return ("d", tuple(alpha))

    real = {}

    def add(store, key, coeff):
        store[key] = store[key] + coeff if key in store else coeff

    add(real, d(), (p1 * p1 + p2 * p2 + x1 * x1 + x2 * x2).scale(half))
    add(real, d(3, 0), one.scale(half * tb * hb * half))
    add(real, d(2, 1), one.scale(-half * tb * hb * half))
    add(real, d(1, 2), e.scale(-half * th * hb * half))
    add(real, d(0, 3), e.scale(half * th * hb * half))
    for i in range(4):
        add(real, d(i, i), one.scale(-half * hb * hb * quarter))
    for i in (2, 3):
        add(real, d(i, i), one.scale(-half * tb * tb * quarter))
    for i in (0, 1):
        add(real, d(i, i), e.scale(-half * th * th * quarter))
    add(real, d(1), e.scale(-half * th * quarter * w2))
    add(real, d(0), e.scale(-half * th * quarter * w1))

    imag = {}
    add(imag, d(3), p1.scale(tb))
    add(imag, d(2), p2.scale(-tb))
    add(imag, d(1), (e * x1).scale(th))
    add(imag, d(0), (e * x2).scale(-th))
    add(imag, d(2), x1.scale(hb))
    add(imag, d(3), x2.scale(hb))
    add(imag, d(0), p1.scale(-hb))
    add(imag, d(1), p2.scale(-hb))
    return DiffOperator(real, VARIABLES), DiffOperator(imag, VARIABLES)


def compare_operators(name: str, computed: DiffOperator, printed: DiffOperator) -> list[dict]:
    """Term-by-term comparison rows, sorted by term key."""
    keys = sorted(set(computed.terms) | set(printed.terms), key=_sort_key)
    rows = []
    for key in keys:
        c = computed.terms.get(key)
        p = printed.terms.get(key)
        agree = c is not None and p is not None and c == p
        rows.append({
            "operator": name,
            "term": _fmt_key(key, computed.variables),
            "computed": str(c.to_sympy()) if c is not None else "0",
            "printed": str(p.to_sympy()) if p is not None else "0",
            "agree": bool(agree),
        })
    return rows


def comparison_report(params: DeformationParams, order: int = DEFAULT_ORDER,
                      *, convention: str = "pointwise") -> dict:
    """Own expansion of the oscillator versus the printed real/imaginary operators."""
    from .transform import oscillator_hamiltonian

    h = oscillator_hamiltonian(params)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        split = expand_left_star(h, params, order, convention=convention)
    pr, pi = printed_oscillator_operators(params)
    rows = compare_operators("Hr", split.hr, pr) + compare_operators("Him", split.him, pi)
    return {
        "convention": convention,
        "split": "H*psi = Hr(psi) + (i/2) Him(psi)",
        "terminated": split.terminated,
        "rows": rows,
        "mismatches": sum(not r["agree"] for r in rows),
    }


# -- the Liouville sector --------------------------------------------------------

def left_moyal_operator(f: TildeFunction, gamma=1) -> DiffOperator:
    """Left multiplication by f(xt1, xt2) under the constant Moyal product [xt1, xt2] = i gamma.

    ``xt2 *`` acts as ``xt2 - (i gamma/2) d_xt1`` and ``exp(k xt1) *`` as
    ``exp(k xt1) exp((i gamma k/2) d_xt2)``.  Supported terms are pure powers
    of xt2 and pure exponentials of xt1 (enough for H1).
    """
    exact = f.exact
    iu = _imag_unit(exact)
    half = sp.Rational(1, 2) if exact else 0.5
    gamma = _coeff.coerce(gamma) if exact else complex(gamma)
    terms = {}

    def add(key, coeff):
        terms[key] = terms[key] + coeff if key in terms else coeff

    for key, c in f.terms.items():
        m, a, b, cc, k = key
        if m or b or cc or (a and k):
            raise RepresentationError("only xt2**a and exp(k*xt1) terms are supported")
        if k == 0:
            for j in range(a + 1):
                coeff = TildeFunction({(0, a - j, 0, 0, 0): c * comb(a, j)
                                       * _coeff.exact_pow(-iu * gamma * half, j)}, exact=exact)
                add(("d", (j, 0, 0, 0)), coeff)
            continue
        s = _coeff.clean(gamma * k * half)
        sign = 1
        if _coeff.is_exact(s) and s.is_number and s.is_negative:
            s, sign = -s, -1
        base = TildeFunction({(0, 0, 0, 0, k): c}, exact=exact)
        add(("trig", 1, "cos", s), base)
        add(("trig", 1, "sin", s), base.scale(iu * sign))
    return DiffOperator(terms, TILDE_VARIABLES)


def h1_star_operator(params: DeformationParams | None = None, gamma=None) -> DiffOperator:
    """``H1 *_1`` for the Liouville sector.

    ``params`` defaults to the preset gamma = 1, omega2 = 2; ``gamma``
    defaults to ``theta*omega2``.
    """
    params = params or DeformationParams.unit_gamma_preset()
    h1, _ = transform_hamiltonian(params)
    return left_moyal_operator(h1, block_gamma(params) if gamma is None else gamma)


def printed_h1_operator(exact: bool = True) -> DiffOperator:
    """``(xt2^2 - i xt2 d1 - d1^2/4 + e^{2 xt1}(cos d2 + i sin d2)
    - e^{xt1}(cos(d2/2) + i sin(d2/2)) + 1/4) / 2`` as printed."""
    iu = _imag_unit(exact)
    half = sp.Rational(1, 2) if exact else 0.5

    def t(key, coeff=1):
        return TildeFunction({key: coeff}, exact=exact)

    terms = {
        ("d", (0, 0, 0, 0)): t((0, 2, 0, 0, 0), half) + t((0, 0, 0, 0, 0), half * half * half),
        ("d", (1, 0, 0, 0)): t((0, 1, 0, 0, 0), -iu * half),
        ("d", (2, 0, 0, 0)): t((0, 0, 0, 0, 0), -half * half * half),
        ("trig", 1, "cos", 1): t((0, 0, 0, 0, 2), half),
        ("trig", 1, "sin", 1): t((0, 0, 0, 0, 2), iu * half),
        ("trig", 1, "cos", half): t((0, 0, 0, 0, 1), -half),
        ("trig", 1, "sin", half): t((0, 0, 0, 0, 1), -iu * half),
    }
    return DiffOperator(terms, TILDE_VARIABLES)


# -- numerical application ----------------------------------------------------------

class AnalyticFunction:
    """Callable ``f(q1, q2, q3, q4)`` accepting complex arrays, with optional exact derivatives.

    ``derivatives`` maps a multi-index to a callable of the same signature.
    """

    def __init__(self, func: Callable, derivatives: dict | None = None):
        self._func = func
        self._derivatives = {tuple(k): v for k, v in (derivatives or {}).items()}

    def __call__(self, *coords):
        return self._func(*coords)

    def derivative(self, alpha):
        alpha = tuple(alpha)
        if not any(alpha):
            return self._func
        return self._derivatives.get(alpha)


def _fd(func, i, n, h):
    if n == 0:
        return func

    def at(coords, k):
        shifted = list(coords)
        shifted[i] = coords[i] + k * h
        return func(*shifted)

    if n == 1:
        def d1(*coords):
            return (at(coords, -2) - 8 * at(coords, -1) + 8 * at(coords, 1) - at(coords, 2)) / (12 * h)
        return d1

    def d2(*coords):
        return (-at(coords, -2) + 16 * at(coords, -1) - 30 * func(*coords)
                + 16 * at(coords, 1) - at(coords, 2)) / (12 * h * h)
    return _fd(d2, i, n - 2, h)


def derivative_handle(psi, alpha, step: float = 1e-3):
    """Exact derivative from ``psi.derivative`` when available, else 4th-order central differences."""
    alpha = tuple(alpha)
    exact = getattr(psi, "derivative", None)
    if exact is not None:
        d = exact(alpha)
        if d is not None:
            return d
    func = psi
    for i, n in enumerate(alpha):
        func = _fd(func, i, n, step)
    return func


def apply_numeric(op: DiffOperator, psi, grid: Grid, *, step: float = 1e-3) -> np.ndarray:
    """Pointwise ``op(psi)`` on the grid; shifts evaluate psi at complex arguments."""
    if not isinstance(grid, Grid):
        raise GridError("apply_numeric needs a Grid")
    if step <= 0:
        raise GridError("finite-difference step must be positive")
    coords = [np.asarray(c, dtype=complex) for c in grid.coordinates(op.variables)]
    total = np.zeros(grid.shape, dtype=complex)
    for key, c in trig_to_shift(op).sorted_items():
        coeff = c.evaluate(*coords)
        if key[0] == "d":
            val = derivative_handle(psi, key[1], step)(*coords)
        else:
            shifted = list(coords)
            shifted[key[1]] = coords[key[1]] + _coeff.to_complex(key[2])
            val = psi(*shifted)
        total = total + coeff * val
    return total

