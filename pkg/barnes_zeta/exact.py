from __future__ import annotations

import functools
import math
from typing import Sequence

import sympy

import barnes_zeta.datatypes
from barnes_zeta.datatypes import PeriodVector

X = sympy.Symbol("X")

RationalPolynomial = sympy.Poly


@functools.lru_cache(maxsize=None)
def bernoulli_number(n: int) -> sympy.Rational:
    """
    B_n with B_1 = -1/2, i.e. the coefficients of t/(e^t - 1). Computed from
    sum_{k=0}^{n} C(n+1, k) B_k = 0; sympy >= 1.12 uses B_1 = +1/2 instead.

    >>> bernoulli_number(0), bernoulli_number(1), bernoulli_number(12)
    (1, -1/2, -691/2730)
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if n == 0:
        return sympy.Integer(1)
    if n % 2 == 1 and n > 1:
        return sympy.Integer(0)
    total = sum((math.comb(n + 1, k) * bernoulli_number(k) for k in range(n)), sympy.Integer(0))
    return sympy.Rational(-total, n + 1)


def bernoulli_poly(n: int) -> RationalPolynomial:
    """
    Classical Bernoulli polynomial B_n(X) = sum_k C(n, k) B_k X^{n-k}.

    >>> bernoulli_poly(2).as_expr()
    X**2 - X + 1/6
    """
    coeffs = [math.comb(n, k) * bernoulli_number(k) for k in range(n + 1)]
    return sympy.Poly(coeffs, X, domain=sympy.QQ)


def evaluate(poly: RationalPolynomial, value: sympy.Expr) -> sympy.Expr:
    if isinstance(value, sympy.Rational):
        return sympy.Rational(poly.eval(value))
    return sympy.expand(poly.as_expr().subs(poly.gen, value))


def hurwitz_value_nonpos(m: int, y: sympy.Expr) -> sympy.Expr:
    """
    zeta(-m, y) = -B_{m+1}(y)/(m+1).

    >>> hurwitz_value_nonpos(0, sympy.Rational(1, 4))
    1/4
    >>> hurwitz_value_nonpos(1, sympy.Integer(1))
    -1/12
    """
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    return -evaluate(bernoulli_poly(m + 1), y) / (m + 1)


def _series_product(a: list[sympy.Rational], b: list[sympy.Rational], order: int) -> list[sympy.Rational]:
    out = [sympy.Integer(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            out[i + j] += ai * bj
    return out


def _series_inverse(a: list[sympy.Rational], order: int) -> list[sympy.Rational]:
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    inv = [sympy.Integer(1) / a[0]]
    for n in range(1, order + 1):
        acc = sum((a[i] * inv[n - i] for i in range(1, min(n, len(a) - 1) + 1)), sympy.Integer(0))
        inv.append(-acc / a[0])
    return inv


@functools.lru_cache(maxsize=4096)
def _bernoulli_barnes_cached(k: int, w: PeriodVector) -> RationalPolynomial:
    denominator = [sympy.Integer(1)] + [sympy.Integer(0)] * k
    for period in w:
        # (e^{w t} - 1)/t = sum_j w^{j+1} t^j / (j+1)!
        factor = [period ** (j + 1) / sympy.factorial(j + 1) for j in range(k + 1)]
        denominator = _series_product(denominator, factor, k)
    inverse = _series_inverse(denominator, k)

    shift = sympy.Poly(sum(w) - X, X, domain=sympy.QQ)
    power = sympy.Poly(1, X, domain=sympy.QQ)
    result = sympy.Poly(0, X, domain=sympy.QQ)
    for j in range(k + 1):
        # e^{(sum w - X) t}: t^j coefficient is (sum w - X)^j / j!
        if inverse[k - j] != 0:
            result += power * (inverse[k - j] / sympy.factorial(j))
        power = power * shift
    return result * sympy.factorial(k)


def bernoulli_barnes_poly(k: int, w: Sequence[sympy.Rational]) -> RationalPolynomial:
    """
    Bernoulli-Barnes polynomial B_k(X | w), k! times the t^k coefficient of
    t^N e^{(w_1+...+w_N-X)t} / prod(e^{w_i t} - 1).

    >>> bernoulli_barnes_poly(1, (sympy.Integer(1),)).as_expr()
    1/2 - X
    >>> bernoulli_barnes_poly(3, barnes_zeta.datatypes.period_vector([1, "1/2", "1/3"])).eval(sympy.Rational(1, 3))
    0
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    periods = barnes_zeta.datatypes.period_vector(w)
    # symmetric in the periods, so sorting shares cache entries between permutations
    return _bernoulli_barnes_cached(k, tuple(sorted(periods)))


def _check_args(N: int, x: sympy.Rational, w: Sequence[sympy.Rational]) -> PeriodVector:
    periods = barnes_zeta.datatypes.period_vector(w)
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if len(periods) != N:
        raise ValueError(f"expected {N} periods, got {len(periods)}")
    if sympy.Rational(x) <= 0:
        raise ValueError(f"x must be positive, got {x}")
    return periods


def barnes_value_nonpos(N: int, ell: int, x: sympy.Rational, w: Sequence[sympy.Rational]) -> sympy.Rational:
    """
    zeta_N(-ell, x | w) = (-1)^ell ell! / (N+ell)! * B_{N+ell}(x | w).

    >>> barnes_value_nonpos(1, 0, sympy.Rational(1, 4), [1])
    1/4
    >>> barnes_value_nonpos(3, 0, sympy.Rational(1, 3), [1, "1/2", "1/3"])
    0
    """
    periods = _check_args(N, x, w)
    if ell < 0:
        raise ValueError(f"ell must be non-negative, got {ell}")
    poly = bernoulli_barnes_poly(N + ell, periods)
    factor = sympy.Integer(-1) ** ell * sympy.factorial(ell) / sympy.factorial(N + ell)
    return sympy.Rational(factor * poly.eval(sympy.Rational(x)))


def barnes_value_nonpos_via_reduction(
    N: int, ell: int, x: sympy.Rational, w: Sequence[sympy.Rational]
) -> sympy.Rational:
    """
    Same value assembled from the Hurwitz decomposition and zeta(-m, y) = -B_{m+1}(y)/(m+1).

    >>> barnes_value_nonpos_via_reduction(2, 1, sympy.Rational(1, 2), [1, 1])
    1/48
    """
    import barnes_zeta.reduction

    _check_args(N, x, w)
    decomposition = barnes_zeta.reduction.decompose(N, sympy.Rational(x), w)
    total = sympy.Integer(0)
    for term in decomposition.terms:
        total += term.coeff * hurwitz_value_nonpos(ell + term.k, term.y)
    return sympy.Rational(decomposition.w**ell * total)
