"""Double-exponential quadrature, Bessel K of complex order, Hermite functions.

The Liouville eigenfunction is ``psi1(xt1) = C(E1) exp(xt1/2) (K_nu(z) + K_conj(nu)(z))``
with ``z = exp(xt1)``, ``nu = 1/2 + i sqrt(E1)`` and
``C(E1) = (cosh(pi sqrt(E1)) / (4 pi^2 sqrt(E1)))**(1/2)``.  The oscillator
factor ``psi2(n, p)`` is the unit-norm Hermite function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, ParameterError

Z_RANGE = (1e-3, 50.0)
NU_MAX = 20.0
_TMAX = 4.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`integrate` and :func:`bessel_k`.

    Convergence means ``|I_L - I_{L-1}| <= max(abs_tol, rel_tol |I_L|)``
    between successive halvings of the step.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_levels: int = 12

    def __post_init__(self):
        if not self.abs_tol >= 1e-14:
            raise ParameterError("abs_tol must be >= 1e-14")
        if not self.rel_tol > 0:
            raise ParameterError("rel_tol must be positive")
        if not 2 <= int(self.max_levels) <= 20:
            raise ParameterError("max_levels must be in [2, 20]")

    def tolerance(self, value):
        return np.maximum(self.abs_tol, self.rel_tol * np.abs(value))


DEFAULT_QUAD = QuadratureSpec()


def _tanh_sinh_nodes(level: int):
    """Nodes s in (0, 1) and weights for int_0^1 at step 2**-level."""
    h = 2.0 ** -level
    t = np.arange(-_TMAX, _TMAX + h / 2, h)
    u = 0.5 * np.pi * np.sinh(t)
    s = 0.5 * (1 + np.tanh(u))
    w = h * 0.25 * np.pi * np.cosh(t) / np.cosh(u) ** 2
    keep = (s > 0) & (s < 1) & (w > 0)
    return s[keep], w[keep]


def _exp_sinh_nodes(level: int):
    """Nodes x in (0, inf) and weights for int_0^inf."""
    h = 2.0 ** -level
    t = np.arange(-_TMAX - 2, _TMAX + 2 + h / 2, h)
    u = 0.5 * np.pi * np.sinh(t)
    keep = u < 700
    t, u = t[keep], u[keep]
    x = np.exp(u)
    w = h * 0.5 * np.pi * np.cosh(t) * x
    return x, w


def _converge(estimate, q: QuadratureSpec, what: str):
    prev = None
    for level in range(1, q.max_levels + 1):
        cur = estimate(level)
        if prev is not None and np.all(np.abs(cur - prev) <= q.tolerance(cur)):
            return cur
        prev = cur
    raise ConvergenceError(f"{what}: tolerance not met after {q.max_levels} levels")


def integrate(f, a: float, b: float, q: QuadratureSpec = DEFAULT_QUAD):
    """Double-exponential quadrature of a vectorised ``f`` over [a, b] (b may be +inf).

    Examples
    --------
    >>> round(float(integrate(lambda t: np.exp(-t), 0.0, np.inf)), 12)
    1.0
    """
    if not a < b:
        if a == b:
            return 0.0
        return -integrate(f, b, a, q)
    if np.isinf(a):
        raise DomainError("the lower limit must be finite")
    if np.isinf(b):
        def estimate(level):
            x, w = _exp_sinh_nodes(level)
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                fx = np.asarray(f(a + x))
            fx = np.where(np.isfinite(fx), fx, 0.0)
            return np.sum(w * fx)
    else:
        width = b - a

        def estimate(level):
            s, w = _tanh_sinh_nodes(level)
            return width * np.sum(w * np.asarray(f(a + width * s)))
    return _converge(estimate, q, "integrate")


def _truncation(z, nu_re, abs_tol):
    """Smallest T with exp(-z cosh T + |Re nu| T) < abs_tol/10 (vectorised in z)."""
    target = math.log(abs_tol / 10)
    z = np.asarray(z, dtype=float)
    lo = np.zeros_like(z)
    hi = np.full_like(z, 1.0)
    for _ in range(200):
        bad = -z * np.cosh(hi) + nu_re * hi >= target
        if not bad.any():
            break
        hi = np.where(bad, hi * 2, hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ok = -z * np.cosh(mid) + nu_re * mid < target
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


def bessel_k(nu, z, q: QuadratureSpec = DEFAULT_QUAD):
    """Modified Bessel ``K_nu(z)`` for complex order and real ``z``, vectorised in z.

    ``K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt``, truncated where the
    tail falls below ``abs_tol/10`` and integrated by tanh-sinh.

    Examples
    --------
    >>> abs(bessel_k(0.5, 1.0) - math.sqrt(math.pi / 2) * math.exp(-1)) < 1e-12
    True
    """
    nu = complex(nu)
    z_arr = np.asarray(z, dtype=float)
    if abs(nu) > NU_MAX:
        raise DomainError(f"|nu| = {abs(nu):.6g} exceeds {NU_MAX}")
    if np.any(~np.isfinite(z_arr)) or np.any(z_arr < Z_RANGE[0]) or np.any(z_arr > Z_RANGE[1]):
        raise DomainError(f"z must lie in [{Z_RANGE[0]}, {Z_RANGE[1]}]")
    flat = z_arr.reshape(-1)
    T = _truncation(flat, abs(nu.real), q.abs_tol)
    a, b = nu.real, nu.imag

    def estimate(level):
        s, w = _tanh_sinh_nodes(level)
        t = T[:, None] * s[None, :]
        # cosh(nu t) split into real and imaginary parts
        ch = np.cosh(a * t) * np.cos(b * t) + 1j * np.sinh(a * t) * np.sin(b * t)
        vals = np.exp(-flat[:, None] * np.cosh(t)) * ch
        return T * (vals @ w)

    out = _converge(estimate, q, f"bessel_k(nu={nu})")
    return out.reshape(z_arr.shape) if z_arr.shape else complex(out[0])


def bessel_k_derivative(nu, z, q: QuadratureSpec = DEFAULT_QUAD):
    """``dK_nu/dz = -(K_{nu-1} + K_{nu+1}) / 2``."""
    nu = complex(nu)
    return -0.5 * (bessel_k(nu - 1, z, q) + bessel_k(nu + 1, z, q))


# -- Hermite -----------------------------------------------------------------------

def hermite(n: int, x):
    """Physicists' Hermite polynomial by ``H_{k+1} = 2x H_k - 2k H_{k-1}``.

    Exact for int, Fraction or sympy arguments; vectorised for arrays.

    Examples
    --------
    >>> hermite(3, 2)
    40
    """
    if n < 0 or int(n) != n:
        raise DomainError("n must be a non-negative integer")
    if n > 200:
        raise DomainError("n must be at most 200")
    h_prev, h = 1 + 0 * x, 2 * x
    if n == 0:
        return h_prev
    for k in range(1, n):
        h_prev, h = h, 2 * x * h - 2 * k * h_prev
    return h


def _hermite_functions(nmax: int, p):
    """Unit-norm Hermite functions 0..nmax by the normalised three-term recurrence."""
    p = np.asarray(p, dtype=float)
    out = [np.pi ** -0.25 * np.exp(-0.5 * p * p)]
    if nmax >= 1:
        out.append(math.sqrt(2.0) * p * out[0])
    for k in range(1, nmax):
        out.append(math.sqrt(2.0 / (k + 1)) * p * out[k] - math.sqrt(k / (k + 1)) * out[k - 1])
    return out


def psi2(n: int, p):
    """``pi**-0.25 (2**n n!)**-0.5 H_n(p) exp(-p**2/2)``, unit L2 norm.

    Examples
    --------
    >>> float(psi2(1, 0.0))
    0.0
    """
    if n < 0 or int(n) != n or n > 60:
        raise DomainError("n must be an integer in [0, 60]")
    return _hermite_functions(int(n), p)[int(n)]


def psi2_second_derivative(n: int, p):
    """Exact ``psi2''`` from the ladder relation
    ``psi_n'' = (sqrt(n(n-1)) psi_{n-2} - (2n+1) psi_n + sqrt((n+1)(n+2)) psi_{n+2}) / 2``."""
    if n < 0 or int(n) != n or n > 60:
        raise DomainError("n must be an integer in [0, 60]")
    hs = _hermite_functions(n + 2, p)
    low = math.sqrt(n * (n - 1)) * hs[n - 2] if n >= 2 else 0.0
    return 0.5 * (low - (2 * n + 1) * hs[n] + math.sqrt((n + 1) * (n + 2)) * hs[n + 2])


# -- Liouville eigenfunction ----------------------------------------------------------

def liouville_order(E1: float, m: int = 1) -> complex:
    return complex(0.5, m * math.sqrt(E1))


def psi1_prefactor(E1: float) -> float:
    """``(cosh(pi sqrt(E1)) / (4 pi^2 sqrt(E1)))**(1/2)``; undefined at E1 = 0."""
    if not E1 > 0:
        raise DomainError("the normalisation needs E1 > 0; use normalized=False")
    k = math.sqrt(E1)
    return math.sqrt(math.cosh(math.pi * k) / (4 * math.pi ** 2 * k))


def _check_real(total, what):
    resid = np.max(np.abs(np.imag(total)) / np.maximum(1.0, np.abs(total)), initial=0.0)
    if resid > 1e-12:
        raise ConvergenceError(f"{what}: imaginary residue {resid:.3g} above 1e-12")
    return np.real(total)


def psi1_parts(E1: float, xt1, q: QuadratureSpec = DEFAULT_QUAD, *, normalized: bool = True, m: int = 1):
    """``(psi1, psi1', psi1'')`` in xt1, with derivatives from Bessel identities.

    For ``u(x) = exp(x/2) K_nu(exp(x))``: ``u' = exp(x/2)(K/2 + z K')`` and
    ``u'' = exp(x/2)((1/4 + z**2 + nu**2) K + z K')``.
    """
    if E1 < 0:
        raise DomainError("E1 must be non-negative")
    c = psi1_prefactor(E1) if normalized else 1.0
    x = np.asarray(xt1, dtype=float)
    z = np.exp(x)
    g = np.exp(x / 2)
    vals = np.zeros((3,) + x.shape, dtype=complex)
    orders = (liouville_order(E1, m), liouville_order(E1, m).conjugate())
    for nu in orders:
        k = bessel_k(nu, z, q)
        dk = bessel_k_derivative(nu, z, q)
        vals[0] += g * k
        vals[1] += g * (0.5 * k + z * dk)
        vals[2] += g * ((0.25 + z * z + nu * nu) * k + z * dk)
    return tuple(c * _check_real(v, "psi1") for v in vals)


def psi1(E1: float, xt1, q: QuadratureSpec = DEFAULT_QUAD, *, normalized: bool = True, m: int = 1):
    """Liouville eigenfunction; ``normalized=False`` drops the constant ``C(E1)``.

    Examples
    --------
    >>> abs(float(psi1(1.0, 3.5))) < 1e-10
    True
    """
    if E1 < 0:
        raise DomainError("E1 must be non-negative")
    c = psi1_prefactor(E1) if normalized else 1.0
    x = np.asarray(xt1, dtype=float)
    z = np.exp(x)
    nu = liouville_order(E1, m)
    total = np.exp(x / 2) * (bessel_k(nu, z, q) + bessel_k(nu.conjugate(), z, q))
    return c * _check_real(total, "psi1")
