"""Sparse term-map base shared by PhaseFunction and TildeFunction."""
from __future__ import annotations

from types import MappingProxyType

from . import _coeff


class TermMap:
    """Immutable finite sum ``sum coeff * basis(key)``.

    Subclasses define the basis through ``_canonical``, ``_mul_key`` and the
    compatibility ``_context`` (anything that must agree between operands).
    """

    __slots__ = ("_terms", "_hash", "_exact")

    _context_name = "context"

    def __init__(self, terms=None, *, exact: bool = True):
        self._exact = exact
        raw = {}
        for key, c in (terms or {}).items():
            c = self._convert(c)
            raw[key] = raw.get(key, 0) + c
        self._terms = self._canonical(raw)
        self._hash = None

    def _convert(self, c):
        c = _coeff.coerce(c)
        if self._exact:
            if not isinstance(c, complex):
                return c
            raise TypeError("float coefficient in an exact function; use float parameters throughout")
        return c if isinstance(c, complex) else _coeff.to_complex(c)

    @property
    def exact(self) -> bool:
        return self._exact

    # -- hooks -------------------------------------------------------------
    def _canonical(self, raw: dict) -> dict:
        return {k: _coeff.clean(c) for k, c in raw.items() if not _coeff.is_zero(c)}

    def _context(self):
        return None

    def context_key(self):
        return (type(self).__name__, self._context())

    def _new(self, terms):
        raise NotImplementedError

    def _mul_key(self, k1, k2):
        raise NotImplementedError

    # -- basic protocol ----------------------------------------------------
    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other._context() != self._context():
            raise ValueError(f"operands carry different {self._context_name}")

    def _lift(self, other):
        if isinstance(other, TermMap):
            self._check(other)
            return other
        return self.constant_like(other)

    def constant_like(self, c):
        return self._new({self._zero_key(): c})

    def _zero_key(self):
        raise NotImplementedError

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c):
        c = self._convert(c)
        return self._new({k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TermMap):
            return self.scale(other)
        self._check(other)
        out = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = self._mul_key(k1, k2)
                out[k] = out.get(k, 0) + c1 * c2
        return self._new(out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = self.constant_like(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, TermMap):
            try:
                other = self.constant_like(other)
            except TypeError:
                return NotImplemented
        if type(other) is not type(self) or other._context() != self._context():
            return False
        return (self - other).is_zero()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, frozenset(
                (k, _coeff.fmt(c)) for k, c in self._terms.items())))
        return self._hash

    def conjugate(self):
        return self._new({k: _coeff.conj(c) for k, c in self._terms.items()})

    def real_part(self):
        """Term-wise real part of the coefficients (basis functions are real)."""
        return self._new({k: _coeff.real(c) for k, c in self._terms.items()})

    def imag_part(self):
        return self._new({k: _coeff.imag(c) for k, c in self._terms.items()})

    def is_real(self) -> bool:
        return self.imag_part().is_zero()

    def map_coefficients(self, func):
        return self._new({k: func(c) for k, c in self._terms.items()})

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: kv[0])
