"""Twisted star product on PhaseFunctions.

The product is ``m[exp(B_theta) exp(B_hbar) exp(B_thetabar) (f (x) g)]`` with

* ``B_hbar = (i hbar/2) (d_xk (x) d_pk - d_pk (x) d_xk)``
* ``B_thetabar = (i thetabar/2) eps^ij d_pi (x) d_pj``
* ``B_theta = (i theta/2) eps^ij ...`` in one of two readings:

``"pointwise"`` (default)
    ``theta^ij(x) = theta e(x) eps^ij`` multiplies after ``m``; the n-th term is
    ``(i theta e/2)**n / n! eps.. d^n f d^n g``.  The three sectors commute.
``"nested"``
    n-fold composition of ``(sqrt(e) d_i) (x) (sqrt(e) d_j)`` on the tensor
    product, so derivatives also hit the ``sqrt(e)`` factors of earlier orders.
    Sector order then matters and is configurable.

Both readings agree at first order.  Only the pointwise one reproduces the
closed-form left actions ``x1 * f = x1 f + (i theta e/2) d_x2 f + ...`` for
every f; see ``left_action_rule``.
"""
from __future__ import annotations

from typing import NamedTuple

import sympy as sp

from . import _coeff
from .params import DeformationParams
from .phase import PhaseFunction, var_index

CONVENTIONS = ("pointwise", "nested")
DEFAULT_ORDER = 8
DEFAULT_SECTORS = ("theta", "hbar", "thetabar")
_EXACT_SECTOR_CAP = 64

# (left derivative, right derivative, sign)
_THETA_PAIRS = ((0, 1, 1), (1, 0, -1))
_HBAR_PAIRS = ((0, 2, 1), (1, 3, 1), (2, 0, -1), (3, 1, -1))
_THETABAR_PAIRS = ((2, 3, 1), (3, 2, -1))


class StarExpansion(NamedTuple):
    value: object
    terminated: bool
    orders: dict


def _slot_diff(key, i, omega, exact):
    """Partial derivative of one slot term; slot keys are (a, b, c, d, s, alpha)."""
    out = []
    if key[i]:
        k = list(key)
        k[i] -= 1
        out.append((tuple(k), key[i]))
    if i < 2 and key[4] and not _coeff.is_zero(omega[i]):
        half = sp.Rational(key[4], 2) if exact else key[4] / 2
        out.append((key[:4] + (key[4] - 2, key[5]), half * omega[i]))
    alpha = key[5]
    if alpha is not None:
        a = list(alpha)
        a[i] += 1
        out.append((key[:5] + (tuple(a),), 1))
    return out


def _with_sqrt_e(key):
    return key[:4] + (key[4] + 1, key[5])


def _apply_bidiff(tensor, pairs, omega, exact, *, nested=False, eout_inc=0):
    out = {}
    for (lk, rk, eo), c in tensor.items():
        for i, j, sign in pairs:
            left = _slot_diff(lk, i, omega, exact)
            if not left:
                continue
            right = _slot_diff(rk, j, omega, exact)
            for l2, fl in left:
                if nested:
                    l2 = _with_sqrt_e(l2)
                for r2, fr in right:
                    if nested:
                        r2 = _with_sqrt_e(r2)
                    key = (l2, r2, eo + eout_inc)
                    out[key] = out.get(key, 0) + sign * c * fl * fr
    return {k: _coeff.clean(v) for k, v in out.items() if not _coeff.is_zero(v)}


def _exp_apply(tensor, pairs, scale, cap, omega, exact, **kw):
    """Apply ``exp(scale * B)``; returns (tensor, terminated, highest order reached)."""
    total = dict(tensor)
    term = tensor
    n = 0
    while term:
        if n == cap:
            return total, False, n
        n += 1
        term = _apply_bidiff(term, pairs, omega, exact, **kw)
        factor = scale / n
        term = {k: _coeff.clean(v * factor) for k, v in term.items()}
        term = {k: v for k, v in term.items() if not _coeff.is_zero(v)}
        for k, v in term.items():
            total[k] = total.get(k, 0) + v
    total = {k: _coeff.clean(v) for k, v in total.items() if not _coeff.is_zero(v)}
    return total, True, max(n - 1, 0)


def _imag_unit(exact):
    return sp.I if exact else 1j


def _half(exact):
    return sp.Rational(1, 2) if exact else 0.5


def _as_slot(f: PhaseFunction, formal=False):
    alpha = (0, 0, 0, 0) if formal else None
    return {k + (alpha,): c for k, c in f.terms.items()}


def _tensor(f, g_slot):
    return {(lk, rk, 0): c1 * c2 for lk, c1 in _as_slot(f).items() for rk, c2 in g_slot.items()}


def _sector_spec(name, params, order, convention):
    exact = params.exact
    i_half = _imag_unit(exact) * _half(exact)
    if name == "theta":
        scale = i_half * params.theta
        if convention == "pointwise":
            return _THETA_PAIRS, scale, order, {"eout_inc": 2}
        return _THETA_PAIRS, scale, order, {"nested": True}
    if name == "hbar":
        return _HBAR_PAIRS, i_half * params.hbar_eff, _EXACT_SECTOR_CAP, {}
    if name == "thetabar":
        return _THETABAR_PAIRS, i_half * params.thetabar, _EXACT_SECTOR_CAP, {}
    raise ValueError(f"unknown sector {name!r}")


def _run_sectors(tensor, params, order, convention, sectors):
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    if order < 0:
        raise ValueError("order must be non-negative")
    terminated = True
    reached = {}
    for name in sectors:
        pairs, scale, cap, kw = _sector_spec(name, params, order, convention)
        tensor, done, n = _exp_apply(tensor, pairs, scale, cap, params.omega, params.exact, **kw)
        terminated &= done
        reached[name] = n
    return tensor, terminated, reached


def _multiply(tensor, omega):
    """Collapse f (x) g to the diagonal, grouped by the formal derivative index."""
    groups: dict = {}
    for (lk, rk, eo), c in tensor.items():
        key = (lk[0] + rk[0], lk[1] + rk[1], lk[2] + rk[2], lk[3] + rk[3], lk[4] + rk[4] + eo)
        bucket = groups.setdefault(rk[5], {})
        bucket[key] = bucket.get(key, 0) + c
    return {alpha: PhaseFunction(terms, omega) for alpha, terms in groups.items()}


def expand_star(f: PhaseFunction, g: PhaseFunction, params: DeformationParams,
                order: int = DEFAULT_ORDER, *, convention: str = "pointwise",
                sectors=DEFAULT_SECTORS) -> StarExpansion:
    """Star product with termination info.

    ``terminated`` is True when every sector's series vanished identically below
    its cap, i.e. the value is exact rather than a truncation.
    """
    _check_operands(f, g, params)
    tensor, done, reached = _run_sectors(_tensor(f, _as_slot(g)), params, order, convention, sectors)
    groups = _multiply(tensor, params.omega)
    value = groups.get(None, PhaseFunction(None, params.omega))
    return StarExpansion(value, done, reached)


def _check_operands(f, g, params):
    for h in (f, g):
        if not isinstance(h, PhaseFunction):
            raise TypeError("star products act on PhaseFunction operands")
        if h._context() != PhaseFunction(None, params.omega)._context():
            raise ValueError("operand structure function does not match params")


def _single_sector(f, g, params, name, order):
    return expand_star(f, g, params, order, sectors=(name,)).value


def star_theta(f, g, params, order: int = DEFAULT_ORDER, *, convention="pointwise"):
    """x-sector product alone (theta^ij(x) = theta e(x) eps^ij), truncated at ``order``."""
    return expand_star(f, g, params, order, convention=convention, sectors=("theta",)).value


def star_hbar(f, g, params):
    """Mixed x-p sector alone; exact on PhaseFunctions."""
    return _single_sector(f, g, params, "hbar", 0)


def star_thetabar(f, g, params):
    """Momentum sector alone; exact on PhaseFunctions."""
    return _single_sector(f, g, params, "thetabar", 0)


def star(f, g, params, order: int = DEFAULT_ORDER, *, convention="pointwise",
         sectors=DEFAULT_SECTORS):
    """Full product ``f * g``; the theta sector is truncated at ``order``."""
    return expand_star(f, g, params, order, convention=convention, sectors=sectors).value


def commutator(f, g, params, order: int = DEFAULT_ORDER, **kw):
    return star(f, g, params, order, **kw) - star(g, f, params, order, **kw)


def left_star_operator(f: PhaseFunction, params, order: int = DEFAULT_ORDER, *,
                       convention="pointwise", sectors=DEFAULT_SECTORS):
    """Coefficients of ``psi -> f * psi`` for a formal psi.

    Returns ``(coeffs, terminated)`` with ``coeffs`` mapping a derivative
    multi-index (orders in x1, x2, p1, p2) to its PhaseFunction coefficient.
    """
    right = {(0, 0, 0, 0, 0, (0, 0, 0, 0)): sp.Integer(1) if params.exact else 1 + 0j}
    tensor, done, _ = _run_sectors(_tensor(f, right), params, order, convention, sectors)
    groups = _multiply(tensor, params.omega)
    return {a: c for a, c in groups.items() if not c.is_zero()}, done


def variables(params):
    omega = params.omega
    return {name: PhaseFunction.variable(name, omega) for name in ("x1", "x2", "p1", "p2")}


def theta_tensor(params, i: int, j: int) -> PhaseFunction:
    """theta^ij(x) = theta e(x) eps^ij with indices in {1, 2}."""
    eps = {(1, 2): 1, (2, 1): -1}.get((i, j), 0)
    return PhaseFunction.e_power(2, params.omega).scale(params.theta * eps)


def expected_commutator(a: str, b: str, params) -> PhaseFunction:
    """The defining commutator table: i theta e eps, i hbar delta, i thetabar eps."""
    ia, ib = var_index(a), var_index(b)
    iu = _imag_unit(params.exact)
    omega = params.omega
    eps = {(0, 1): 1, (1, 0): -1}
    if ia < 2 and ib < 2:
        return theta_tensor(params, ia + 1, ib + 1).scale(iu)
    if ia >= 2 and ib >= 2:
        return PhaseFunction.constant(iu * params.thetabar * eps.get((ia - 2, ib - 2), 0), omega)
    if ia < 2 <= ib:
        return PhaseFunction.constant(iu * params.hbar_eff * int(ia == ib - 2), omega)
    return PhaseFunction.constant(-iu * params.hbar_eff * int(ib == ia - 2), omega)


def left_action_rule(var: str, f: PhaseFunction, params) -> PhaseFunction:
    """Closed-form left multiplication by a coordinate or momentum.

    x1*f = x1 f + (i theta e/2) d_x2 f + (i hbar/2) d_p1 f
    x2*f = x2 f - (i theta e/2) d_x1 f + (i hbar/2) d_p2 f
    p1*f = p1 f + (i thetabar/2) d_p2 f - (i hbar/2) d_x1 f
    p2*f = p2 f - (i thetabar/2) d_p1 f - (i hbar/2) d_x2 f
    """
    omega = params.omega
    ih = _imag_unit(params.exact) * _half(params.exact)
    e = PhaseFunction.e_power(2, omega)
    v = PhaseFunction.variable(var, omega)
    te = e.scale(ih * params.theta)
    hb = ih * params.hbar_eff
    tb = ih * params.thetabar
    if var == "x1":
        return v * f + te * f.diff("x2") + f.diff("p1").scale(hb)
    if var == "x2":
        return v * f - te * f.diff("x1") + f.diff("p2").scale(hb)
    if var == "p1":
        return v * f + f.diff("p2").scale(tb) - f.diff("x1").scale(hb)
    if var == "p2":
        return v * f - f.diff("p1").scale(tb) - f.diff("x2").scale(hb)
    raise ValueError(var)


def right_action_rule(var: str, f: PhaseFunction, params) -> PhaseFunction:
    """``f * var`` from the left rules through ``f*g = conj(g*f)`` (real f, g).

    Complex f is handled by linearity over its real and imaginary parts.
    """
    iu = _imag_unit(params.exact)
    re, im = f.real_part(), f.imag_part()
    return (left_action_rule(var, re, params).conjugate()
            + left_action_rule(var, im, params).conjugate().scale(iu))


def jacobiator(mu: int, nu: int, rho: int, params, order: int = DEFAULT_ORDER, **kw):
    """Cyclic sum of nested star commutators of x^mu, x^nu, x^rho (indices 1, 2)."""
    xs = {1: PhaseFunction.variable("x1", params.omega), 2: PhaseFunction.variable("x2", params.omega)}
    for i in (mu, nu, rho):
        if i not in xs:
            raise ValueError("coordinate indices must be 1 or 2")

    def br(f, g):
        return commutator(f, g, params, order, **kw)

    a, b, c = xs[mu], xs[nu], xs[rho]
    return br(a, br(b, c)) + br(c, br(a, b)) + br(b, br(c, a))


def jacobiator_closed_form(mu: int, nu: int, rho: int, params) -> PhaseFunction:
    """``-e(x) omega_s (th^nr th^ms + th^mn th^rs + th^rm th^ns)`` with constant th = theta eps."""
    def th(i, j):
        return params.theta * {(1, 2): 1, (2, 1): -1}.get((i, j), 0)

    total = 0
    for s, w in zip((1, 2), params.omega):
        total = total + w * (th(nu, rho) * th(mu, s) + th(mu, nu) * th(rho, s)
                             + th(rho, mu) * th(nu, s))
    return PhaseFunction.e_power(2, params.omega).scale(-_coeff.clean(sp.sympify(total))
                                                       if params.exact else -total)


def associativity_residual(f, g, h, params, order: int = DEFAULT_ORDER, **kw):
    """``(f*g)*h - f*(g*h)``."""
    return (star(star(f, g, params, order, **kw), h, params, order, **kw)
            - star(f, star(g, h, params, order, **kw), params, order, **kw))


def lowest_theta_order(residual: PhaseFunction, theta) -> int | None:
    """Smallest power of the symbol ``theta`` present in a residual, None if zero."""
    if residual.is_zero():
        return None
    orders = []
    for c in residual.terms.values():
        poly = sp.Poly(sp.expand(c), theta)
        orders.extend(m[0] for m in poly.monoms())
    return min(orders)
