"""Exact phase-space functions: polynomials in (x1, x2, p1, p2) times e(x)**(s/2).

A key is ``(a, b, c, d, s)`` for ``x1**a x2**b p1**c p2**d e**(s/2)``, with
``e(x) = 1 + omega1*x1 + omega2*x2``.  The power of ``e`` is stored doubled so
keys stay integral.

Canonical form: within each parity class of ``s`` all terms share one power.
Non-negative powers are expanded down to ``s = 0`` (even) or ``s = 1`` (odd);
negative powers are raised as long as ``e`` divides the polynomial factor.
Two functions are equal iff their canonical term maps agree.
"""
from __future__ import annotations

import numpy as np
import sympy as sp

from . import _coeff
from ._termmap import TermMap
from .errors import RepresentationError

VARIABLES = ("x1", "x2", "p1", "p2")
_VAR_INDEX = {name: i for i, name in enumerate(VARIABLES)}


def var_index(var) -> int:
    if isinstance(var, int):
        if 0 <= var < 4:
            return var
    elif var in _VAR_INDEX:
        return _VAR_INDEX[var]
    raise ValueError(f"unknown phase-space variable {var!r}")


def _poly_mul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3])
            out[m] = out.get(m, 0) + c1 * c2
    return out


class _EPowers:
    """Cached polynomial expansions of e(x)**j for one omega."""

    def __init__(self, omega):
        self.omega = omega
        e = {(0, 0, 0, 0): sp.Integer(1) if _coeff.is_exact(omega[0]) else 1.0 + 0j}
        if not _coeff.is_zero(omega[0]):
            e[(1, 0, 0, 0)] = omega[0]
        if not _coeff.is_zero(omega[1]):
            e[(0, 1, 0, 0)] = omega[1]
        self._powers = [{(0, 0, 0, 0): e[(0, 0, 0, 0)]}, e]

    def __getitem__(self, j):
        while len(self._powers) <= j:
            nxt = _poly_mul(self._powers[-1], self._powers[1])
            self._powers.append({m: _coeff.clean(c) for m, c in nxt.items()})
        return self._powers[j]


_EPOW_CACHE: dict = {}


def _epowers(omega) -> _EPowers:
    key = tuple(_coeff.fmt(w) for w in omega)
    cached = _EPOW_CACHE.get(key)
    if cached is None:
        cached = _EPOW_CACHE[key] = _EPowers(omega)
    return cached


def _divide_by_e(poly, omega):
    """Exact quotient ``poly / e(x)`` or ``None`` when e does not divide it."""
    w1, w2 = omega
    if not _coeff.is_zero(w2):
        main, other, w_main, w_other = 1, 0, w2, w1
    else:
        main, other, w_main, w_other = 0, 1, w1, w2
    work = dict(poly)
    quotient = {}
    top = max((m[main] for m in poly), default=0)
    for deg in range(top, 0, -1):
        for m in [m for m in list(work) if m[main] == deg]:
            c = work.pop(m)
            if _coeff.is_zero(c):
                continue
            r = c / w_main
            qm = tuple(v - 1 if i == main else v for i, v in enumerate(m))
            quotient[qm] = quotient.get(qm, 0) + r
            # subtract r * (1 + w_other*other) * qm
            work[qm] = work.get(qm, 0) - r
            if not _coeff.is_zero(w_other):
                om = tuple(v + 1 if i == other else v for i, v in enumerate(qm))
                work[om] = work.get(om, 0) - r * w_other
    if any(not _coeff.is_zero(c) for c in work.values()):
        return None
    return {m: _coeff.clean(c) for m, c in quotient.items() if not _coeff.is_zero(c)}


class PhaseFunction(TermMap):
    """Finite sum of monomials in (x1, x2, p1, p2) times half-integer powers of e(x).

    Examples
    --------
    >>> from fractions import Fraction
    >>> from twistmoyal import DeformationParams, phase_variables
    >>> x1, x2, p1, p2, e = phase_variables(DeformationParams())
    >>> (x2 * e.sqrt()).diff("x2") == e.sqrt() + (x2 * e.sqrt().power(-1)).scale(Fraction(1, 2))
    True
    """

    __slots__ = ("_omega",)
    _context_name = "structure function"

    def __init__(self, terms=None, omega=(0, 0)):
        omega = tuple(_coeff.coerce(w) for w in omega)
        self._omega = omega
        exact = all(_coeff.is_exact(w) for w in omega)
        super().__init__(terms, exact=exact)

    # -- TermMap hooks ------------------------------------------------------
    def _context(self):
        return tuple(_coeff.fmt(w) for w in self._omega)

    def _new(self, terms):
        return PhaseFunction(terms, self._omega)

    def _zero_key(self):
        return (0, 0, 0, 0, 0)

    def _mul_key(self, k1, k2):
        return (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2], k1[3] + k2[3], k1[4] + k2[4])

    def _canonical(self, raw):
        raw = {k: _coeff.clean(c) for k, c in raw.items() if not _coeff.is_zero(c)}
        omega = self._omega
        if all(_coeff.is_zero(w) for w in omega):
            flat = {}
            for k, c in raw.items():
                kk = k[:4] + (0,)
                flat[kk] = flat.get(kk, 0) + c
            return {k: _coeff.clean(c) for k, c in flat.items() if not _coeff.is_zero(c)}
        epow = _epowers(omega)
        out = {}
        for parity in (0, 1):
            cls = {k: c for k, c in raw.items() if k[4] % 2 == parity}
            if not cls:
                continue
            floor = parity  # target power once non-negative
            base = min(min(k[4] for k in cls), floor)
            poly = {}
            for k, c in cls.items():
                j = (k[4] - base) // 2
                for m, ce in epow[j].items():
                    mm = (k[0] + m[0], k[1] + m[1], k[2] + m[2], k[3] + m[3])
                    poly[mm] = poly.get(mm, 0) + c * ce
            poly = {m: _coeff.clean(c) for m, c in poly.items() if not _coeff.is_zero(c)}
            while poly and base < floor:
                q = _divide_by_e(poly, omega)
                if q is None:
                    break
                poly, base = q, base + 2
            for m, c in poly.items():
                out[m + (base,)] = c
        return out

    # -- constructors --------------------------------------------------------
    @property
    def omega(self):
        return self._omega

    @classmethod
    def constant(cls, c, omega=(0, 0)):
        return cls({(0, 0, 0, 0, 0): c}, omega)

    @classmethod
    def variable(cls, name, omega=(0, 0)):
        key = [0, 0, 0, 0, 0]
        key[var_index(name)] = 1
        return cls({tuple(key): 1}, omega)

    @classmethod
    def monomial(cls, exponents, omega=(0, 0), coeff=1, ehalf: int = 0):
        a, b, c, d = exponents
        return cls({(a, b, c, d, ehalf): coeff}, omega)

    @classmethod
    def e_power(cls, s: int, omega=(0, 0)):
        """``e(x)**(s/2)``."""
        return cls({(0, 0, 0, 0, s): 1}, omega)

    def power(self, exponent):
        """Half-integer power; only defined on a single ``e(x)**(s/2)`` basis term."""
        if len(self._terms) == 1:
            (k, c), = self._terms.items()
            if k[:4] == (0, 0, 0, 0) and _coeff.is_zero(c - 1):
                s2 = sp.Rational(exponent) * k[4]
                if s2.q != 1:
                    raise RepresentationError("power leaves the half-integer class")
                return PhaseFunction.e_power(int(s2), self._omega)
        e = PhaseFunction.e_power(2, self._omega)
        if self == e:
            s2 = sp.Rational(exponent) * 2
            if s2.q == 1:
                return PhaseFunction.e_power(int(s2), self._omega)
        raise RepresentationError("power() needs a pure power of e(x)")

    def sqrt(self):
        return self.power(sp.Rational(1, 2))

    # -- calculus ----------------------------------------------------------
    def diff(self, var):
        i = var_index(var)
        out = {}
        for k, c in self._terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                kk = tuple(kk)
                out[kk] = out.get(kk, 0) + c * k[i]
            if i < 2 and k[4]:
                w = self._omega[i]
                if not _coeff.is_zero(w):
                    kk = k[:4] + (k[4] - 2,)
                    half = sp.Rational(k[4], 2) if self._exact else k[4] / 2
                    out[kk] = out.get(kk, 0) + c * half * w
        return self._new(out)

    def degree(self, var=None) -> int:
        if var is None:
            return max((sum(k[:4]) for k in self._terms), default=0)
        i = var_index(var)
        return max((k[i] for k in self._terms), default=0)

    def has_e_factors(self) -> bool:
        return any(k[4] for k in self._terms)

    # -- numerics ----------------------------------------------------------
    def e_values(self, x1, x2):
        w1, w2 = (_coeff.to_complex(w) for w in self._omega)
        return 1 + w1 * np.asarray(x1) + w2 * np.asarray(x2)

    def evaluate(self, x1=0.0, x2=0.0, p1=0.0, p2=0.0):
        """Vectorised numerical value; requires e(x) > 0 wherever a half power occurs."""
        args = [np.asarray(v) for v in (x1, x2, p1, p2)]
        e = self.e_values(args[0], args[1])
        total = np.zeros(np.broadcast(*args).shape, dtype=complex)
        for k, c in self._terms.items():
            term = _coeff.to_complex(c) * np.ones_like(total)
            for i in range(4):
                if k[i]:
                    term = term * args[i] ** k[i]
            if k[4]:
                term = term * np.power(e.astype(complex), k[4] / 2)
            total = total + term
        return total

    def to_sympy(self, symbols=None):
        x1, x2, p1, p2 = symbols or sp.symbols("x1 x2 p1 p2", real=True)
        e = 1 + self._omega[0] * x1 + self._omega[1] * x2
        return sp.Add(*[c * x1 ** k[0] * x2 ** k[1] * p1 ** k[2] * p2 ** k[3]
                        * e ** sp.Rational(k[4], 2) for k, c in self.sorted_items()])

    # -- presentation ------------------------------------------------------
    def __repr__(self):
        if not self._terms:
            return "PhaseFunction(0)"
        parts = []
        for k, c in self.sorted_items():
            factors = [f"{v}^{n}" if n > 1 else v for v, n in zip(VARIABLES, k[:4]) if n]
            if k[4]:
                factors.append(f"e^({k[4]}/2)")
            parts.append(f"({_coeff.fmt(c)})" + ("*" + "*".join(factors) if factors else ""))
        return "PhaseFunction(" + " + ".join(parts) + ")"

    def to_json(self):
        rows = []
        for k, c in self.sorted_items():
            re, im = _coeff.json_parts(c)
            rows.append({"x1": k[0], "x2": k[1], "p1": k[2], "p2": k[3], "ehalf": k[4],
                         "re": re, "im": im})
        return rows

    @classmethod
    def from_json(cls, rows, omega=(0, 0)):
        return cls({(r["x1"], r["x2"], r["p1"], r["p2"], r["ehalf"]):
                    _coeff.from_json_parts(r["re"], r["im"]) for r in rows}, omega)


def phase_variables(params):
    """``(x1, x2, p1, p2, e)`` as PhaseFunctions for the given parameters."""
    omega = params.omega
    return tuple(PhaseFunction.variable(v, omega) for v in VARIABLES) + (
        PhaseFunction.e_power(2, omega),)
