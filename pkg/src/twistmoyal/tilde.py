"""Functions of the transformed variables (xt1, xt2, pt1, pt2).

Key ``(m, a, b, c, k)`` stands for ``xt1**m xt2**a pt1**b pt2**c exp(k*xt1)``.
These basis functions are linearly independent, so canonical form is just
"merge keys, drop zeros".
"""
from __future__ import annotations

from math import comb

import numpy as np
import sympy as sp

from . import _coeff
from ._termmap import TermMap

TILDE_VARIABLES = ("xt1", "xt2", "pt1", "pt2")
_INDEX = {n: i for i, n in enumerate(TILDE_VARIABLES)}


def tilde_index(var) -> int:
    if isinstance(var, int) and 0 <= var < 4:
        return var
    if var in _INDEX:
        return _INDEX[var]
    raise ValueError(f"unknown transformed variable {var!r}")


class TildeFunction(TermMap):
    """Finite sum of monomials in the transformed variables times exp(k*xt1)."""

    __slots__ = ()
    _context_name = "coefficient mode"

    def __init__(self, terms=None, *, exact: bool = True):
        super().__init__(terms, exact=exact)

    def _context(self):
        return self._exact

    def _new(self, terms):
        return TildeFunction(terms, exact=self._exact)

    def _zero_key(self):
        return (0, 0, 0, 0, 0)

    def _mul_key(self, k1, k2):
        return tuple(a + b for a, b in zip(k1, k2))

    @classmethod
    def constant(cls, c, *, exact=True):
        return cls({(0, 0, 0, 0, 0): c}, exact=exact)

    @classmethod
    def variable(cls, name, *, exact=True):
        key = [0, 0, 0, 0, 0]
        key[tilde_index(name)] = 1
        return cls({tuple(key): 1}, exact=exact)

    @classmethod
    def exp_xt1(cls, k: int, *, exact=True, coeff=1):
        """``coeff * exp(k*xt1)``."""
        return cls({(0, 0, 0, 0, k): coeff}, exact=exact)

    def diff(self, var):
        i = tilde_index(var)
        out = {}
        for key, c in self._terms.items():
            if key[i]:
                kk = list(key)
                kk[i] -= 1
                kk = tuple(kk)
                out[kk] = out.get(kk, 0) + c * key[i]
            if i == 0 and key[4]:
                out[key] = out.get(key, 0) + c * key[4]
        return self._new(out)

    def diff_n(self, var, n: int):
        f = self
        for _ in range(n):
            f = f.diff(var)
        return f

    def shift(self, var, amount):
        """``f(..., var + amount, ...)`` exactly (binomial expansion, exp factor)."""
        i = tilde_index(var)
        amount = self._convert(amount)
        out = {}
        for key, c in self._terms.items():
            n = key[i]
            base = c
            if i == 0 and key[4]:
                base = base * (sp.exp(key[4] * amount) if self._exact else np.exp(key[4] * amount))
            for j in range(n + 1):
                kk = list(key)
                kk[i] = j
                kk = tuple(kk)
                out[kk] = out.get(kk, 0) + base * comb(n, j) * amount ** (n - j)
        return self._new(out)

    def degree(self, var) -> int:
        i = tilde_index(var)
        return max((k[i] for k in self._terms), default=0)

    def is_polynomial_in(self, var) -> bool:
        return tilde_index(var) != 0 or all(k[4] == 0 for k in self._terms)

    def depends_on(self, var) -> bool:
        i = tilde_index(var)
        return any(k[i] for k in self._terms) or (i == 0 and any(k[4] for k in self._terms))

    def evaluate(self, xt1=0.0, xt2=0.0, pt1=0.0, pt2=0.0):
        args = [np.asarray(v) for v in (xt1, xt2, pt1, pt2)]
        total = np.zeros(np.broadcast(*args).shape, dtype=complex)
        for k, c in self._terms.items():
            term = _coeff.to_complex(c) * np.ones_like(total)
            for i in range(4):
                if k[i]:
                    term = term * args[i] ** k[i]
            if k[4]:
                term = term * np.exp(k[4] * args[0])
            total = total + term
        return total

    def to_sympy(self, symbols=None):
        x1, x2, p1, p2 = symbols or sp.symbols("xt1 xt2 pt1 pt2", real=True)
        return sp.Add(*[c * x1 ** k[0] * x2 ** k[1] * p1 ** k[2] * p2 ** k[3] * sp.exp(k[4] * x1)
                        for k, c in self.sorted_items()])

    def __repr__(self):
        if not self._terms:
            return "TildeFunction(0)"
        parts = []
        for k, c in self.sorted_items():
            factors = [f"{v}^{n}" if n > 1 else v for v, n in zip(TILDE_VARIABLES, k[:4]) if n]
            if k[4]:
                factors.append(f"exp({k[4]}*xt1)")
            parts.append(f"({_coeff.fmt(c)})" + ("*" + "*".join(factors) if factors else ""))
        return "TildeFunction(" + " + ".join(parts) + ")"

    def to_json(self):
        rows = []
        for k, c in self.sorted_items():
            re, im = _coeff.json_parts(c)
            rows.append({"xt1": k[0], "xt2": k[1], "pt1": k[2], "pt2": k[3], "k": k[4],
                         "re": re, "im": im})
        return rows


def _key_diff(key, i):
    out = []
    if key[i]:
        kk = list(key)
        kk[i] -= 1
        out.append((tuple(kk), key[i]))
    if i == 0 and key[4]:
        out.append((key, key[4]))
    return out


def moyal_star(f: TildeFunction, g: TildeFunction, gamma=1, thetabar=1, order: int = 16):
    """Constant block Moyal product with Theta = diag(gamma J, thetabar J).

    Returns ``(value, terminated)``.  The series terminates whenever, in each
    block, one factor is polynomial of finite degree in the variable it is
    differentiated against.
    """
    if f.context_key() != g.context_key():
        raise ValueError("operands carry different coefficient modes")
    exact = f.exact
    iu = sp.I / 2 if exact else 0.5j
    gamma = f._convert(gamma)
    thetabar = f._convert(thetabar)
    pairs = ((0, 1, gamma), (1, 0, -gamma), (2, 3, thetabar), (3, 2, -thetabar))
    term = {(k1, k2): c1 * c2 for k1, c1 in f.terms.items() for k2, c2 in g.terms.items()}
    total = dict()
    n = 0
    while term:
        for (a, b), c in term.items():
            k = tuple(x + y for x, y in zip(a, b))
            total[k] = total.get(k, 0) + c
        if n == order:
            return TildeFunction(total, exact=exact), False
        n += 1
        nxt = {}
        for (a, b), c in term.items():
            for i, j, w in pairs:
                left = _key_diff(a, i)
                if not left:
                    continue
                right = _key_diff(b, j)
                for ka, fa in left:
                    for kb, fb in right:
                        nxt[(ka, kb)] = nxt.get((ka, kb), 0) + c * fa * fb * w
        scale = iu / n
        term = {k: _coeff.clean(v * scale) for k, v in nxt.items()}
        term = {k: v for k, v in term.items() if not _coeff.is_zero(v)}
    return TildeFunction(total, exact=exact), True


def moyal_commutator(f, g, gamma=1, thetabar=1, order: int = 16):
    a, ta = moyal_star(f, g, gamma, thetabar, order)
    b, tb = moyal_star(g, f, gamma, thetabar, order)
    return a - b, ta and tb
