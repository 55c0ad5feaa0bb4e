"""The change of variables T, its inverse, and the factorised oscillator.

``backward`` maps transformed variables to the original ones::

    x1 = theta w1 exp(xt1) - theta w2 xt2 - w1/W
    x2 = theta w2 exp(xt1) + theta w1 xt2 - w2/W      (W = w1**2 + w2**2)

and ``forward`` inverts it on the half plane e(x) > 0::

    xt1 = log(e(x) / (theta W)),   xt2 = (-w2 x1 + w1 x2) / (theta W)

Momenta are unchanged.  Along the image, ``e(x) = theta W exp(xt1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import sympy as sp

from . import _coeff
from .errors import DomainError, ParameterError, RepresentationError
from .params import DeformationParams
from .phase import PhaseFunction
from .star import commutator as star_commutator
from .tilde import TildeFunction, moyal_commutator


class PhasePoint(NamedTuple):
    x1: object
    x2: object
    p1: object
    p2: object


class TildePoint(NamedTuple):
    xt1: object
    xt2: object
    pt1: object
    pt2: object


def _require_transformable(params: DeformationParams):
    theta = params.theta
    if _coeff.is_exact(theta) and theta.free_symbols:
        return
    if _coeff.to_complex(theta).real <= 0:
        raise ParameterError("the transformation needs theta > 0 (no commutative limit)")
    if all(_coeff.is_zero(w) for w in params.omega):
        raise ParameterError("the transformation is undefined for omega1 = omega2 = 0")


def _floats(params):
    return (params.real_value("theta"), params.real_value("omega1"), params.real_value("omega2"))


def forward(q, params: DeformationParams) -> TildePoint:
    """Original phase-space point(s) to transformed variables (vectorised)."""
    _require_transformable(params)
    theta, w1, w2 = _floats(params)
    x1, x2, p1, p2 = (np.asarray(v, dtype=float) for v in q)
    e = 1 + w1 * x1 + w2 * x2
    if np.any(e <= 0):
        raise DomainError("e(x) must be positive")
    big_w = w1 * w1 + w2 * w2
    xt1 = np.log(e / (theta * big_w))
    xt2 = (-w2 * x1 + w1 * x2) / (theta * big_w)
    return TildePoint(xt1, xt2, p1, p2)


def backward(qt, params: DeformationParams) -> PhasePoint:
    """Transformed variables to the original phase-space point(s) (vectorised)."""
    _require_transformable(params)
    theta, w1, w2 = _floats(params)
    xt1, xt2, pt1, pt2 = (np.asarray(v, dtype=float) for v in qt)
    big_w = w1 * w1 + w2 * w2
    ex = np.exp(xt1)
    x1 = theta * w1 * ex - theta * w2 * xt2 - w1 / big_w
    x2 = theta * w2 * ex + theta * w1 * xt2 - w2 / big_w
    return PhasePoint(x1, x2, pt1, pt2)


def e_of(q, params) -> np.ndarray:
    _, w1, w2 = _floats(params)
    return 1 + w1 * np.asarray(q[0], dtype=float) + w2 * np.asarray(q[1], dtype=float)


# -- commutator tables ---------------------------------------------------------

@dataclass(frozen=True)
class CommutatorTable:
    """Commutators of the transformed variables as stated for T.

    ``[xt1, xt2] = i gamma``, ``[xt1, pt1] = i hbar1(x)``,
    ``[xt2, pt2] = i hbar2``, ``[pt1, pt2] = i thetabar``; the other pairs
    are listed as vanishing.  ``hbar1 = hbar w1 / e`` is kept as a
    TildeFunction (``e = theta W exp(xt1)``).
    """

    gamma: object
    hbar1: TildeFunction
    hbar2: object
    thetabar: object
    exact: bool = True

    def commutators(self) -> dict:
        iu = sp.I if self.exact else 1j
        zero = TildeFunction(None, exact=self.exact)
        return {
            ("xt1", "xt2"): iu * self.gamma,
            ("xt1", "pt1"): self.hbar1.scale(iu) if self.hbar1 else zero,
            ("xt1", "pt2"): 0,
            ("xt2", "pt1"): 0,
            ("xt2", "pt2"): iu * self.hbar2,
            ("pt1", "pt2"): iu * self.thetabar,
        }

    def to_json(self):
        def scalar(v):
            re, im = _coeff.json_parts(_coeff.coerce(v) if not isinstance(v, complex) else v)
            return {"re": re, "im": im}

        hb1 = self.hbar1
        return {
            "gamma": scalar(self.gamma),
            "hbar1": {"expression": hb1.to_json(), "position_dependent": bool(hb1)},
            "hbar2": scalar(self.hbar2),
            "thetabar": scalar(self.thetabar),
        }


def tilde_commutator_table(params: DeformationParams) -> CommutatorTable:
    _require_transformable(params)
    exact = params.exact
    w1, w2 = params.omega
    big_w = params.omega_sq
    theta, hbar = params.theta, params.hbar_eff
    if exact:
        gamma = sp.simplify(theta * sp.sqrt(big_w))
        hbar2 = sp.simplify(w1 * hbar / (theta * big_w))
        hb1_coeff = sp.simplify(hbar * w1 / (theta * big_w))
    else:
        gamma = theta * complex(big_w) ** 0.5
        hbar2 = w1 * hbar / (theta * big_w)
        hb1_coeff = hbar * w1 / (theta * big_w)
    hbar1 = TildeFunction.exp_xt1(-1, exact=exact, coeff=hb1_coeff)
    return CommutatorTable(gamma, hbar1, hbar2, params.thetabar, exact)


def pushforward_commutators(params: DeformationParams) -> list[dict]:
    """Star commutators of the transformed coordinates computed in x-space.

    ``xt1 = log(e/(theta W))`` is outside the PhaseFunction class, so the
    brackets are taken with sympy.  Every pair contains a factor linear in
    (x, p), and for the pointwise product only first-order terms then survive:
    ``[f, g] = i (theta e eps^ij d_i f d_j g + hbar (d_xk f d_pk g - d_pk f d_xk g)
    + thetabar eps^ij d_pi f d_pj g)``.  Pairs whose entries are PhaseFunctions
    are recomputed with the star-product engine as a second route.
    """
    _require_transformable(params)
    x1, x2, p1, p2 = sp.symbols("x1 x2 p1 p2", real=True)
    w1, w2 = (sp.nsimplify(w) if not _coeff.is_exact(w) else w for w in params.omega)
    theta = params.theta if params.exact else sp.nsimplify(params.theta)
    hbar = params.hbar_eff if params.exact else sp.nsimplify(params.hbar_eff)
    tbar = params.thetabar if params.exact else sp.nsimplify(params.thetabar)
    e = 1 + w1 * x1 + w2 * x2
    big_w = w1 ** 2 + w2 ** 2
    fns = {
        "xt1": sp.log(e / (theta * big_w)),
        "xt2": (-w2 * x1 + w1 * x2) / (theta * big_w),
        "pt1": p1,
        "pt2": p2,
    }

    def bracket(f, g):
        d = sp.diff
        val = (theta * e * (d(f, x1) * d(g, x2) - d(f, x2) * d(g, x1))
               + hbar * (d(f, x1) * d(g, p1) - d(f, p1) * d(g, x1)
                         + d(f, x2) * d(g, p2) - d(f, p2) * d(g, x2))
               + tbar * (d(f, p1) * d(g, p2) - d(f, p2) * d(g, p1)))
        return sp.simplify(sp.I * val)

    stated = {
        ("xt1", "xt2"): sp.I * theta * sp.sqrt(big_w),
        ("xt1", "pt1"): sp.I * hbar * w1 / e,
        ("xt1", "pt2"): sp.Integer(0),
        ("xt2", "pt1"): sp.Integer(0),
        ("xt2", "pt2"): sp.I * w1 * hbar / (theta * big_w),
        ("pt1", "pt2"): sp.I * tbar,
    }

    rows = []
    for (a, b), given in stated.items():
        computed = bracket(fns[a], fns[b])
        row = {
            "pair": f"[{a},{b}]",
            "stated": sp.sstr(sp.simplify(given)),
            "computed": sp.sstr(computed),
            "agree": bool(sp.simplify(computed - given) == 0),
        }
        engine = _engine_bracket(a, b, params)
        if engine is not None:
            row["engine_agrees_with_computed"] = bool(
                sp.simplify(engine.to_sympy((x1, x2, p1, p2)) - computed) == 0)
        rows.append(row)
    return rows


def _engine_bracket(a, b, params):
    """Second route for pairs representable as PhaseFunctions (everything but xt1)."""
    if "xt1" in (a, b) or not params.exact:
        return None
    omega = params.omega
    w1, w2 = omega
    scale = 1 / (params.theta * params.omega_sq)
    fn = {
        "xt2": (PhaseFunction.variable("x1", omega).scale(-w2)
                + PhaseFunction.variable("x2", omega).scale(w1)).scale(scale),
        "pt1": PhaseFunction.variable("p1", omega),
        "pt2": PhaseFunction.variable("p2", omega),
    }
    return star_commutator(fn[a], fn[b], params)


# -- Hamiltonian ------------------------------------------------------------------

def oscillator_hamiltonian(params) -> PhaseFunction:
    """``H = (p1^2 + p2^2 + x1^2 + x2^2) / 2``."""
    omega = params.omega
    half = sp.Rational(1, 2) if params.exact else 0.5
    total = PhaseFunction(None, omega)
    for v in ("x1", "x2", "p1", "p2"):
        total = total + PhaseFunction.monomial(
            tuple(2 if u == v else 0 for u in ("x1", "x2", "p1", "p2")), omega)
    return total.scale(half)


def substitute_backward(f: PhaseFunction, params) -> TildeFunction:
    """Rewrite f(x, p) in transformed variables through ``backward``.

    Only integer powers of e(x) are representable (``e = theta W exp(xt1)``).
    """
    _require_transformable(params)
    exact = params.exact
    theta = params.theta
    w1, w2 = params.omega
    big_w = params.omega_sq
    one = TildeFunction.constant(1, exact=exact)
    ex = TildeFunction.exp_xt1(1, exact=exact)
    xt2 = TildeFunction.variable("xt2", exact=exact)
    x1 = ex.scale(theta * w1) - xt2.scale(theta * w2) - one.scale(w1 / big_w)
    x2 = ex.scale(theta * w2) + xt2.scale(theta * w1) - one.scale(w2 / big_w)
    p1 = TildeFunction.variable("pt1", exact=exact)
    p2 = TildeFunction.variable("pt2", exact=exact)
    scale_e = theta * big_w
    total = TildeFunction(None, exact=exact)
    for k, c in f.terms.items():
        if k[4] % 2:
            raise RepresentationError("half-integer powers of e(x) have no exp(k*xt1) form")
        j = k[4] // 2
        term = (x1 ** k[0]) * (x2 ** k[1]) * (p1 ** k[2]) * (p2 ** k[3])
        term = term * TildeFunction.exp_xt1(j, exact=exact, coeff=_coeff.exact_pow(scale_e, j)
                                            if j >= 0 else 1 / _coeff.exact_pow(scale_e, -j))
        total = total + term.scale(c)
    return total


def pullback(f: TildeFunction, params) -> PhaseFunction:
    """Express a TildeFunction in original variables through ``forward``.

    ``exp(k xt1) = (e/(theta W))**k``; polynomial dependence on xt1 itself
    (a logarithm of e) is rejected.
    """
    _require_transformable(params)
    omega = params.omega
    w1, w2 = omega
    big_w = params.omega_sq
    scale_e = params.theta * big_w
    xt2 = (PhaseFunction.variable("x1", omega).scale(-w2)
           + PhaseFunction.variable("x2", omega).scale(w1)).scale(1 / scale_e)
    p1 = PhaseFunction.variable("p1", omega)
    p2 = PhaseFunction.variable("p2", omega)
    total = PhaseFunction(None, omega)
    for k, c in f.terms.items():
        if k[0]:
            raise RepresentationError("polynomial xt1 dependence pulls back to log e(x)")
        ek = PhaseFunction.e_power(2 * k[4], omega).scale(
            1 / _coeff.exact_pow(scale_e, k[4]) if k[4] >= 0 else _coeff.exact_pow(scale_e, -k[4]))
        total = total + (xt2 ** k[1] * p1 ** k[2] * p2 ** k[3] * ek).scale(c)
    return total


def _require_omega1_zero(params):
    if not _coeff.is_zero(params.omega1):
        raise ParameterError("the factorised Hamiltonian needs omega1 = 0")
    if _coeff.is_zero(params.omega2):
        raise ParameterError("the factorised Hamiltonian needs omega2 != 0")
    _require_transformable(params)


def split_hamiltonian(params) -> tuple[TildeFunction, TildeFunction]:
    """H1(xt1, xt2), H2(pt1, pt2) from direct substitution of the oscillator."""
    _require_omega1_zero(params)
    h = substitute_backward(oscillator_hamiltonian(params), params)
    xs, ps = {}, {}
    for k, c in h.terms.items():
        if (k[0] or k[1] or k[4]) and (k[2] or k[3]):
            raise AssertionError("mixed x/p term in the transformed Hamiltonian")
        (ps if (k[2] or k[3]) else xs)[k] = c
    return TildeFunction(xs, exact=params.exact), TildeFunction(ps, exact=params.exact)


def transform_hamiltonian(params) -> tuple[TildeFunction, TildeFunction]:
    """Closed forms with gamma = theta*omega2::

        H1 = (gamma^2 xt2^2 + gamma^2 exp(2 xt1) - (2 gamma/omega2) exp(xt1) + 1/omega2^2) / 2
        H2 = (pt1^2 + pt2^2) / 2
    """
    _require_omega1_zero(params)
    exact = params.exact
    gamma = params.theta * params.omega2
    w2 = params.omega2
    half = sp.Rational(1, 2) if exact else 0.5
    xt2 = TildeFunction.variable("xt2", exact=exact)
    h1 = ((xt2 * xt2).scale(gamma ** 2)
          + TildeFunction.exp_xt1(2, exact=exact, coeff=gamma ** 2)
          - TildeFunction.exp_xt1(1, exact=exact, coeff=2 * gamma / w2)
          + TildeFunction.constant(1 / w2 ** 2, exact=exact)).scale(half)
    pt1 = TildeFunction.variable("pt1", exact=exact)
    pt2 = TildeFunction.variable("pt2", exact=exact)
    h2 = (pt1 * pt1 + pt2 * pt2).scale(half)
    return h1, h2


def block_gamma(params):
    """gamma = theta*omega2 on the omega1 = 0 branch used by the factorisation."""
    return _coeff.clean(params.theta * params.omega2) if params.exact else params.theta * params.omega2


def sector_commutator(f: TildeFunction, g: TildeFunction, params, order: int = 16):
    """Commutator under the block product Theta = diag(gamma J, thetabar J)."""
    return moyal_commutator(f, g, block_gamma(params), params.thetabar, order)


def sector_commutator_check(params) -> dict:
    """[H1, H2], [H1, H1] and all cross-sector variable brackets under the block product."""
    h1, h2 = transform_hamiltonian(params)
    exact = params.exact
    out = {}
    val, done = sector_commutator(h1, h2, params)
    out["[H1,H2]"] = (val, done)
    out["[H1,H1]"] = sector_commutator(h1, h1, params)
    for a in ("xt1", "xt2"):
        for b in ("pt1", "pt2"):
            out[f"[{a},{b}]"] = sector_commutator(
                TildeFunction.variable(a, exact=exact), TildeFunction.variable(b, exact=exact), params)
    return out
