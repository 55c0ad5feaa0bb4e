"""Deformation parameters of the twisted phase-space algebra."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from fractions import Fraction

import sympy as sp

from . import _coeff
from .errors import ParameterError

_ALIASES = {
    "theta": "theta",
    "thetabar": "thetabar",
    "theta_bar": "thetabar",
    "hbar": "hbar_eff",
    "hbar_eff": "hbar_eff",
    "hbareff": "hbar_eff",
    "omega1": "omega1",
    "w1": "omega1",
    "omega2": "omega2",
    "w2": "omega2",
}


def parse_number(text: str):
    """Parse ``"1/2"``, ``"0.25"`` or ``"3"`` as an exact rational."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"not a number: {text!r}") from exc


@dataclass(frozen=True)
class DeformationParams:
    """Structure constants of the algebra.

    ``theta`` scales ``[x1, x2] = i theta e(x)``, ``thetabar`` the momentum
    commutator and ``hbar_eff`` the mixed one, with
    ``e(x) = 1 + omega1*x1 + omega2*x2``.

    Rational inputs (int, Fraction, sympy numbers) keep every downstream
    coefficient exact; floats switch the whole computation to complex floats.
    """

    theta: object = 1
    thetabar: object = 1
    hbar_eff: object = 1
    omega1: object = 0
    omega2: object = 1

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _coeff.coerce(getattr(self, f.name)))
        modes = {_coeff.is_exact(getattr(self, f.name)) for f in fields(self)}
        if len(modes) > 1:
            # float mode wins so coefficients never mix sympy and complex
            for f in fields(self):
                v = getattr(self, f.name)
                if _coeff.is_exact(v):
                    if v.free_symbols:
                        raise ParameterError("cannot mix symbolic and float parameters")
                    object.__setattr__(self, f.name, complex(v))

    @property
    def exact(self) -> bool:
        return _coeff.is_exact(self.theta)

    @property
    def omega(self) -> tuple:
        return (self.omega1, self.omega2)

    @property
    def omega_sq(self):
        return _coeff.clean(self.omega1 ** 2 + self.omega2 ** 2)

    @property
    def gamma(self):
        """``theta*sqrt(omega1**2 + omega2**2)``."""
        if self.exact:
            return sp.simplify(self.theta * sp.sqrt(self.omega_sq))
        return complex(self.theta * abs(complex(self.omega_sq)) ** 0.5)

    def real_value(self, name: str) -> float:
        return _coeff.to_complex(getattr(self, name)).real

    def with_(self, **changes) -> "DeformationParams":
        return replace(self, **changes)

    @classmethod
    def from_mapping(cls, mapping) -> "DeformationParams":
        kwargs = {}
        for key, value in mapping.items():
            name = _ALIASES.get(key.strip().lower())
            if name is None:
                raise ParameterError(f"unknown parameter {key!r}")
            kwargs[name] = parse_number(value) if isinstance(value, str) else value
        return cls(**kwargs)

    @classmethod
    def from_string(cls, text: str) -> "DeformationParams":
        """Parse ``"theta=1,omega2=1/2"``."""
        mapping = {}
        for item in filter(None, (s.strip() for s in text.split(","))):
            if "=" not in item:
                raise ParameterError(f"expected key=value, got {item!r}")
            k, v = item.split("=", 1)
            mapping[k] = v
        return cls.from_mapping(mapping)

    @classmethod
    def symbolic(cls, **overrides) -> "DeformationParams":
        """All five constants as real sympy symbols, unless overridden."""
        names = {f.name: sp.Symbol(f.name, real=True) for f in fields(cls)}
        names.update(overrides)
        return cls(**names)

    @classmethod
    def unit_gamma_preset(cls) -> "DeformationParams":
        """gamma = 1, omega2 = 2, thetabar = 1 (so theta = 1/2), omega1 = 0."""
        return cls(theta=Fraction(1, 2), thetabar=1, hbar_eff=1, omega1=0, omega2=2)

    def as_dict(self) -> dict:
        return {f.name: _coeff.fmt(getattr(self, f.name)) for f in fields(self)}
