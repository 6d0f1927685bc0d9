from __future__ import annotations

import cmath
import math
import sys
import threading
from typing import Callable, Sequence

import mpmath
import numpy as np
import sympy
from sympy.utilities.iterables import partitions

import barnes_zeta.exact
from barnes_zeta.context import DEFAULT_CONTEXT, EvalContext
from barnes_zeta.errors import PoleError

POLE_RADIUS = 1e-12
# extra decimal digits carried by the extended-precision lane beyond the cancellation
GUARD_DIGITS = 20

_local = threading.local()


def _em_terms(s: complex, x: float, ctx: EvalContext) -> int:
    """
    Direct-sum length M. Left of Re(s) = 0 the direct sum and a^{1-s}/(s-1) cancel, so
    a = M + x is kept just large enough for the Bernoulli tail to converge.
    """
    if s.real >= 0:
        return max(ctx.em_terms, math.ceil(2 * abs(s.imag)))
    a_min = (abs(s) + 2 * ctx.em_order) / math.pi
    return max(0, math.ceil(a_min - x))


def _cancellation(n: int, s: complex, a: float) -> float:
    """Rough size of the largest terms of the Euler-Maclaurin sum relative to its result."""
    return 4 * a ** max(1 - s.real, 1.0) * (1 + math.log(a)) ** n


def _mp_context(dps: int) -> mpmath.MPContext:
    """Per-thread mpmath context; the module-level one would share its precision across threads."""
    mp = getattr(_local, "mp", None)
    if mp is None:
        mp = _local.mp = mpmath.MPContext()
    mp.dps = dps
    return mp


def _times_linear(poly: list, constant) -> list:
    """poly(h) * (constant + h), truncated to len(poly) coefficients."""
    return [constant * poly[0]] + [constant * poly[r] + poly[r - 1] for r in range(1, len(poly))]


def _tail_jet(s, a, n: int, order: int, rational: Callable[[sympy.Rational], object] = float) -> list:
    """
    Taylor coefficients in h, up to h^n, of
    G(s+h) = a/(s+h-1) + 1/2 + sum_{j<=order} B_2j/(2j)! a^{1-2j} (s+h)(s+h+1)...(s+h+2j-2),
    so that the Euler-Maclaurin remainder of zeta(s, x) is a^{-s} G(s).
    Works on complex floats as well as mpmath numbers.
    """
    jet = [a * (-1) ** r / (s - 1) ** (r + 1) for r in range(n + 1)]
    jet[0] += rational(sympy.Rational(1, 2))

    rising: list = [1] + [0] * n
    factors = 0
    for j in range(1, order + 1):
        while factors < 2 * j - 1:
            rising = _times_linear(rising, s + factors)
            factors += 1
        weight = rational(barnes_zeta.exact.bernoulli_number(2 * j) / sympy.factorial(2 * j))
        coefficient = weight * a ** (1 - 2 * j)
        jet = [g + coefficient * p for g, p in zip(jet, rising)]
    return jet


def _check_finite(value: complex, n: int, s: complex, x: float) -> complex:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise OverflowError(f"zeta^({n})(s={s}, x={x}) left the float range")
    return value


def _hurwitz_deriv_float(n: int, s: complex, x: float, M: int, J: int) -> complex:
    bases = np.arange(M, dtype=float) + x
    logs = np.log(bases)
    powers = np.power(bases, -s.real) if s.imag == 0 else np.exp(-s * logs)
    direct = (-logs) ** n * powers

    a = M + x
    L = math.log(a)
    jet = _tail_jet(s, a, n, J)
    # d^n/ds^n [a^{-s} G(s)] = n! sum_r g_r (-L)^{n-r}/(n-r)! a^{-s}
    scale = (a ** (-s.real) if s.imag == 0 else cmath.exp(-s * L)) * math.factorial(n)
    tail = [scale * jet[r] * (-L) ** (n - r) / math.factorial(n - r) for r in range(n + 1)]

    direct = np.asarray(direct, dtype=complex)
    re = math.fsum(direct.real.tolist() + [t.real for t in tail])
    im = math.fsum(direct.imag.tolist() + [t.imag for t in tail])
    return _check_finite(complex(re, im), n, s, x)


def _hurwitz_deriv_mp(n: int, s: complex, x: float, M: int, J: int, dps: int) -> complex:
    """The same Euler-Maclaurin sum carried out with `dps` decimal digits."""
    mp = _mp_context(dps)
    s_mp = mp.mpc(s.real, s.imag)
    bases = [mp.mpf(x) + k for k in range(M)]
    direct = [(-mp.log(b)) ** n * mp.power(b, -s_mp) for b in bases]

    a = mp.mpf(x) + M
    L = mp.log(a)
    jet = _tail_jet(s_mp, a, n, J, rational=lambda r: mp.mpf(int(r.p)) / int(r.q))
    scale = mp.power(a, -s_mp) * math.factorial(n)
    tail = [scale * jet[r] * (-L) ** (n - r) / math.factorial(n - r) for r in range(n + 1)]
    total = mp.fsum(direct + tail)
    value = complex(float(total.real), float(total.imag))
    return _check_finite(value, n, s, x)


def _hurwitz_deriv_uncached(n: int, s: complex, x: float, ctx: EvalContext) -> complex:
    M, J = _em_terms(s, x, ctx), ctx.em_order
    if s.real >= 0:
        return _hurwitz_deriv_float(n, s, x, M, J)
    cancellation = _cancellation(n, s, M + x)
    if cancellation * sys.float_info.epsilon <= ctx.target_tol * 1e-2:
        return _hurwitz_deriv_float(n, s, x, M, J)
    dps = GUARD_DIGITS + math.ceil(math.log10(cancellation))
    return _hurwitz_deriv_mp(n, s, x, M, J, dps)


def hurwitz_zeta_deriv(n: int, s: complex, x: float, ctx: EvalContext = DEFAULT_CONTEXT) -> complex:
    """
    n-th s-derivative of the analytically continued Hurwitz zeta function, from the
    Euler-Maclaurin formula differentiated term by term. Left of Re(s) = 0 the sum is
    redone in extended precision whenever double precision cannot absorb its cancellation.

    Only integer s is memoized; those are the arguments the lattice sums keep asking for.

    >>> round(hurwitz_zeta_deriv(1, 0, 1.0).real, 10)
    -0.9189385332
    >>> exact = barnes_zeta.exact.hurwitz_value_nonpos(20, sympy.Rational(1, 4))
    >>> abs(hurwitz_zeta_deriv(0, -20, 0.25).real - float(exact)) < 1e-10
    True
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    s = complex(s)
    if abs(s - 1) < POLE_RADIUS:
        raise PoleError(f"zeta(s, x) has a pole at s=1, got s={s}")
    x = float(x)
    if s.imag != 0 or not s.real.is_integer():
        return _hurwitz_deriv_uncached(n, s, x, ctx)
    key = ("hurwitz", n, int(s.real), x, ctx.em_terms, ctx.em_order)
    return ctx.value_cache.get_or_compute(key, lambda: _hurwitz_deriv_uncached(n, s, x, ctx))


def hurwitz_zeta(s: complex, x: float, ctx: EvalContext = DEFAULT_CONTEXT) -> complex:
    """
    >>> round(hurwitz_zeta(0, 0.25).real, 12)
    0.25
    >>> round(hurwitz_zeta(2, 1.0).real, 12)
    1.644934066848
    """
    return hurwitz_zeta_deriv(0, s, x, ctx)


def _stieltjes_uncached(n: int, x: float, M: int, J: int) -> float:
    bases = np.arange(M, dtype=float) + x
    logs = np.log(bases)
    parts = (logs**n / bases).tolist()

    u = M + x
    L = math.log(u)
    parts.append(-(L ** (n + 1)) / (n + 1))
    parts.append(L**n / u / 2)

    # d-th derivative of log^n(u)/u is u^{-1-d} sum_p coeffs[p] log^p(u)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    for d in range(1, 2 * J):
        coeffs = [-d * coeffs[p] + (p + 1) * (coeffs[p + 1] if p < n else 0) for p in range(n + 1)]
        if d % 2 == 1:
            j = (d + 1) // 2
            weight = float(barnes_zeta.exact.bernoulli_number(2 * j) / sympy.factorial(2 * j))
            derivative = u ** (-1 - d) * math.fsum(c * L**p for p, c in enumerate(coeffs))
            parts.append(-weight * derivative)
    return math.fsum(parts)


def stieltjes(n: int, x: sympy.Rational | int, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """
    Generalized Stieltjes constant gamma_n(x) for 0 < x <= 1, as the Euler-Maclaurin limit
    of sum_{k<=m} log^n(k+x)/(k+x) - log^{n+1}(m+x)/(n+1).

    >>> round(stieltjes(0, 1), 10)
    0.5772156649
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    x = sympy.Rational(x)
    if not 0 < x <= 1:
        raise ValueError(f"x must lie in (0, 1], got {x}")
    M, J = ctx.stieltjes_terms, ctx.stieltjes_order
    key = (n, int(x.p), int(x.q), M, J)
    return ctx.stieltjes_cache.get_or_compute(key, lambda: _stieltjes_uncached(n, float(x), M, J))


def psi_deriv(ell: int, m: int, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """
    psi^(ell)(m) at a positive integer m:
    -gamma + H_{m-1} for ell = 0 and (-1)^{ell+1} ell! (zeta(ell+1) - H_{m-1}^{(ell+1)}) otherwise.

    >>> round(psi_deriv(0, 3) + stieltjes(0, 1), 12)
    1.5
    """
    if ell < 0 or m < 1:
        raise ValueError(f"need ell >= 0 and m >= 1, got ell={ell}, m={m}")
    if ell == 0:
        return -stieltjes(0, 1, ctx) + float(sympy.harmonic(m - 1))
    zeta_value = hurwitz_zeta(ell + 1, 1.0, ctx).real
    partial = float(sympy.harmonic(m - 1, ell + 1))
    return (-1) ** (ell + 1) * math.factorial(ell) * (zeta_value - partial)


def bell_complete(args: Sequence, n: int):
    """
    Complete Bell polynomial B_n(X_1, ..., X_n) through B_{i+1} = sum_k C(i, k) B_{i-k} X_{k+1}.
    Works on anything with + and *, including sympy symbols.

    >>> bell_complete([], 0)
    1
    >>> a, b, c = sympy.symbols("a b c")
    >>> sympy.expand(bell_complete([a, b, c], 3))
    a**3 + 3*a*b + c
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if len(args) < n:
        raise ValueError(f"need at least {n} arguments, got {len(args)}")
    bell = [1]
    for i in range(n):
        bell.append(sum(math.comb(i, k) * bell[i - k] * args[k] for k in range(i + 1)))
    return bell[n]


def gamma_deriv(a: int, m: int, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """
    Gamma^(a)(m) = (m-1)! B_a(psi(m), psi'(m), ..., psi^(a-1)(m)).

    >>> round(gamma_deriv(1, 2) + stieltjes(0, 1), 12)
    1.0
    """
    if a < 0 or m < 1:
        raise ValueError(f"need a >= 0 and m >= 1, got a={a}, m={m}")
    key = ("gamma_deriv", a, m)

    def compute() -> float:
        psis = [psi_deriv(i, m, ctx) for i in range(a)]
        return math.factorial(m - 1) * float(bell_complete(psis, a))

    return ctx.value_cache.get_or_compute(key, compute)


def gamma_deriv_at_one_table(n: int, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """
    Gamma^(n)(1) as the partition sum of (-1)^n n!/prod(k_j!) prod (z_j/j)^{k_j},
    z_1 = gamma and z_j = zeta(j).

    >>> gamma_deriv_at_one_table(0)
    1.0
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if n == 0:
        return 1.0
    z = [0.0, stieltjes(0, 1, ctx)] + [hurwitz_zeta(j, 1.0, ctx).real for j in range(2, n + 1)]
    terms = []
    for partition in partitions(n):
        term = float((-1) ** n * math.factorial(n))
        for part, multiplicity in partition.items():
            term *= (z[part] / part) ** multiplicity / math.factorial(multiplicity)
        terms.append(term)
    return math.fsum(terms)
