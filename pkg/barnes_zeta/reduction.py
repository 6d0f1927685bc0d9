from __future__ import annotations

import cmath
import itertools
import math
import warnings
from typing import Sequence

import numpy as np
import scipy.optimize
import sympy

import barnes_zeta.hurwitz
import barnes_zeta.numbers
from barnes_zeta.context import DEFAULT_CONTEXT, EvalContext
from barnes_zeta.datatypes import (
    DecompositionModel,
    HurwitzDecomposition,
    HurwitzTerm,
    ZeroReport,
    period_vector,
)
from barnes_zeta.errors import ConvergenceError, InternalError, NoSignChange, PoleError

T = sympy.Symbol("t")
X_SYMBOL = sympy.Symbol("x")


def scale_params(w_vec: Sequence[sympy.Rational]) -> tuple[sympy.Rational, list[int]]:
    """
    Common scale w = lcm(r_1..r_N)/gcd(q_1..q_N) for periods w_i = r_i/q_i and the
    fold counts l_i = w/w_i.

    >>> scale_params([1, sympy.Rational(1, 2)])
    (1, [1, 2])
    >>> scale_params([1, 2])
    (2, [2, 1])
    """
    periods = period_vector(w_vec)
    w = sympy.Rational(math.lcm(*(int(p.p) for p in periods)), math.gcd(*(int(p.q) for p in periods)))
    ells = []
    for i, period in enumerate(periods):
        ratio = w / period
        if not ratio.is_Integer:
            raise InternalError(f"w/w{i + 1} = {ratio} is not an integer for periods {periods}")
        ells.append(int(ratio))
    return w, ells


def lattice_params(
    w_vec: Sequence[sympy.Rational], q: int | None = None, ell: int | None = None
) -> tuple[sympy.Rational, list[int]]:
    """
    Scale ell/q and fold counts ell/(q w_i) for any common multiple q of the denominators and
    any common multiple ell of the integers q w_i. The defaults give the coarsest lattice.

    >>> lattice_params([1, sympy.Rational(1, 2)])
    (1, [1, 2])
    >>> lattice_params([1, sympy.Rational(1, 2)], q=2, ell=4)
    (2, [2, 4])
    """
    periods = period_vector(w_vec)
    if q is None:
        q = math.lcm(*(int(p.q) for p in periods))
    for i, period in enumerate(periods):
        if q <= 0 or q % int(period.q) != 0:
            raise ValueError(f"q={q} is not a positive multiple of the denominator of w{i + 1}={period}")
    scaled = [int(q * period) for period in periods]
    if ell is None:
        ell = math.lcm(*scaled)
    for i, value in enumerate(scaled):
        if ell <= 0 or ell % value != 0:
            raise ValueError(f"ell={ell} is not a positive multiple of q*w{i + 1}={value}")
    return sympy.Rational(ell, q), [ell // value for value in scaled]


def _c_coefficients(N: int, x: sympy.Expr) -> list[sympy.Expr]:
    """Ascending t-coefficients of C_N(t - x) = prod_{i=1}^{N-1} (t - x + i)."""
    coeffs: list[sympy.Expr] = [sympy.Integer(1)]
    for i in range(1, N):
        constant = i - x
        shifted = [sympy.Integer(0)] + coeffs
        padded = coeffs + [sympy.Integer(0)]
        coeffs = [sympy.expand(shifted[j] + constant * padded[j]) for j in range(len(shifted))]
    return coeffs


def c_polynomial(N: int, x: sympy.Expr) -> sympy.Poly:
    """
    C_{N,x}(t) = C_N(t - x), C_1 = 1 and C_N(t) = (t+N-1)...(t+1).

    >>> c_polynomial(3, sympy.Integer(0)).as_expr()
    t**2 + 3*t + 2
    >>> c_polynomial(2, X_SYMBOL).all_coeffs()
    [1, 1 - x]
    """
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    return sympy.Poly(list(reversed(_c_coefficients(N, x))), T)


def c_coefficients_float(N: int, x: float) -> np.ndarray:
    """Ascending t-coefficients of C_N(t - x)/(N-1)! in floats."""
    roots = [x - i for i in range(1, N)]
    return np.polynomial.polynomial.polyfromroots(roots) / math.factorial(N - 1)


def _merge(terms: list[HurwitzTerm], key=lambda term: (term.k, term.y)) -> tuple[HurwitzTerm, ...]:
    merged: dict = {}
    for term in terms:
        k = key(term)
        if k in merged:
            merged[k] = merged[k]._replace(coeff=merged[k].coeff + term.coeff)
        else:
            merged[k] = term
    out = []
    for term in merged.values():
        coeff = sympy.expand(term.coeff) if isinstance(term.coeff, sympy.Expr) else term.coeff
        if coeff != 0:
            out.append(term._replace(coeff=coeff))
    return tuple(out)


def _is_symbolic(x) -> bool:
    return isinstance(x, sympy.Expr) and len(x.free_symbols) > 0


def decompose(
    N: int,
    x: sympy.Expr,
    w_vec: Sequence[sympy.Rational],
    merge: bool = True,
    q: int | None = None,
    ell: int | None = None,
) -> HurwitzDecomposition:
    """
    Finite Hurwitz expansion of zeta_N(s, x | w). `x` may be a positive rational or a
    sympy symbol, in which case the coefficients are polynomials in x.

    >>> d = decompose(2, sympy.Rational(1, 3), [1, sympy.Rational(1, 2)])
    >>> [(t.k, t.y, t.coeff) for t in d.terms]
    [(0, 1/3, 2/3), (1, 1/3, 1), (0, 5/6, 1/6), (1, 5/6, 1)]
    """
    periods = period_vector(w_vec)
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if len(periods) != N:
        raise ValueError(f"expected {N} periods, got {len(periods)}")
    if not _is_symbolic(x):
        x = sympy.Rational(x)
        if x <= 0:
            raise ValueError(f"x must be positive, got {x}")

    if q is None and ell is None:
        scale, ells = scale_params(periods)
    else:
        scale, ells = lattice_params(periods, q, ell)

    normalizer = sympy.Integer(1) / sympy.factorial(N - 1)
    terms = []
    for ks in itertools.product(*(range(count) for count in ells)):
        y = sympy.expand((x + sum(k * period for k, period in zip(ks, periods))) / scale)
        for k, coeff in enumerate(_c_coefficients(N, y)):
            if coeff != 0:
                terms.append(HurwitzTerm(k, y, sympy.expand(coeff * normalizer)))
    if merge:
        return HurwitzDecomposition(N, scale, _merge(terms))
    return HurwitzDecomposition(N, scale, tuple(terms))


def substitute(decomposition: HurwitzDecomposition, value: sympy.Rational) -> HurwitzDecomposition:
    """Evaluates a symbolic-x decomposition at a concrete x."""
    terms = [
        HurwitzTerm(
            term.k,
            sympy.sympify(term.y).subs(X_SYMBOL, value),
            sympy.sympify(term.coeff).subs(X_SYMBOL, value),
        )
        for term in decomposition.terms
    ]
    return HurwitzDecomposition(decomposition.N, decomposition.w, _merge(terms))


def decompose_real(
    N: int,
    x: float,
    w_vec: Sequence[float],
    max_den: int = 10**6,
    tol: float = DEFAULT_CONTEXT.target_tol,
) -> HurwitzDecomposition:
    """
    Float lane: periods replaced by their best convergents with denominator <= max_den,
    x kept as a float.

    >>> d = decompose_real(1, 1.5, [0.75], max_den=10)
    >>> d.w, [(t.k, t.y, t.coeff) for t in d.terms]
    (3/4, [(0, 2.0, 1.0)])
    """
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if len(w_vec) != N:
        raise ValueError(f"expected {N} periods, got {len(w_vec)}")
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    periods = []
    for i, value in enumerate(w_vec):
        rational = barnes_zeta.numbers.rationalize_positive(value, max_den, name=f"w{i + 1}")
        error = abs(float(rational) - float(value)) / abs(float(value))
        if error > tol:
            warnings.warn(f"w{i + 1}={value} rationalized to {rational} with relative error {error:.3g}")
        periods.append(rational)
    scale, ells = scale_params(periods)

    x_scaled = float(x) / float(scale)
    terms = []
    for ks in itertools.product(*(range(count) for count in ells)):
        shift = sum((k * period for k, period in zip(ks, periods)), sympy.Integer(0)) / scale
        y = x_scaled + float(shift)
        for k, coeff in enumerate(c_coefficients_float(N, y).tolist()):
            if coeff != 0.0:
                terms.append((shift, HurwitzTerm(k, y, coeff)))
    merged: dict = {}
    for shift, term in terms:
        key = (term.k, shift)
        merged[key] = merged[key]._replace(coeff=merged[key].coeff + term.coeff) if key in merged else term
    return HurwitzDecomposition(N, scale, tuple(term for term in merged.values() if term.coeff != 0.0))


def _check_poles(N: int, s: complex) -> None:
    for pole in range(1, N + 1):
        if abs(s - pole) < barnes_zeta.hurwitz.POLE_RADIUS:
            raise PoleError(f"zeta_{N}(s, x | w) has a pole at s={pole}, got s={s}")


def eval_decomposition_deriv(
    decomposition: HurwitzDecomposition, n: int, s: complex, ctx: EvalContext = DEFAULT_CONTEXT
) -> complex:
    """
    n-th s-derivative of w^{-s} sum coeff zeta(s-k, y):
    sum_j C(n, j) (-log w)^{n-j} w^{-s} sum coeff zeta^(j)(s-k, y).
    """
    s = complex(s)
    _check_poles(decomposition.N, s)
    for term in decomposition.terms:
        if _is_symbolic(term.y) or _is_symbolic(term.coeff):
            raise ValueError("decomposition has a symbolic x; substitute a value before evaluating")
    log_w = math.log(float(decomposition.w))
    re, im = [], []
    for j in range(n + 1):
        weight = math.comb(n, j) * (-log_w) ** (n - j)
        for term in decomposition.terms:
            zeta = barnes_zeta.hurwitz.hurwitz_zeta_deriv(j, s - term.k, float(term.y), ctx)
            value = weight * float(term.coeff) * zeta
            re.append(value.real)
            im.append(value.imag)
    return cmath.exp(-s * log_w) * complex(math.fsum(re), math.fsum(im))


def eval_decomposition(
    decomposition: HurwitzDecomposition, s: complex, ctx: EvalContext = DEFAULT_CONTEXT
) -> complex:
    return eval_decomposition_deriv(decomposition, 0, s, ctx)


def find_zero(
    N: int,
    x: sympy.Rational,
    w_vec: Sequence[sympy.Rational],
    bracket: tuple[float, float],
    ctx: EvalContext = DEFAULT_CONTEXT,
) -> ZeroReport:
    """
    Real zero of s -> zeta_N(s, x | w) inside `bracket`, by Brent's method.

    >>> report = find_zero(3, sympy.Rational(1, 3), [1, "1/2", "1/3"], (-0.1, 0.1))
    >>> abs(report.s_root) < 1e-10
    True
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"bracket ({lo}, {hi}) is empty")
    for pole in range(1, N + 1):
        if lo <= pole <= hi:
            raise PoleError(f"bracket ({lo}, {hi}) contains the pole s={pole}")
    decomposition = decompose(N, x, w_vec)

    def f(s: float) -> float:
        return eval_decomposition(decomposition, s, ctx).real

    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0 or f_hi == 0.0:
        root = lo if f_lo == 0.0 else hi
        return ZeroReport(s_root=root, residual=0.0, bracket=(lo, hi), iterations=0)
    if f_lo * f_hi > 0:
        raise NoSignChange(f"zeta_{N}(s) has the same sign at s={lo} ({f_lo:.3g}) and s={hi} ({f_hi:.3g})")
    root, result = scipy.optimize.brentq(f, lo, hi, xtol=ctx.target_tol * 1e-2, full_output=True)
    residual = abs(f(root))
    if residual > ctx.target_tol:
        raise ConvergenceError(
            f"Brent stopped at s={root!r} with |zeta_{N}| = {residual:.3g} > target_tol={ctx.target_tol:g}"
        )
    return ZeroReport(s_root=root, residual=residual, bracket=(lo, hi), iterations=result.iterations)


def multiple_hurwitz_deriv(
    N: int, n: int, s: complex, x: float, ctx: EvalContext = DEFAULT_CONTEXT
) -> complex:
    """zeta_N^(n)(s, x) with unit periods, for real x > 0."""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    s = complex(s)
    _check_poles(N, s)
    re, im = [], []
    for k, coeff in enumerate(c_coefficients_float(N, float(x)).tolist()):
        value = coeff * barnes_zeta.hurwitz.hurwitz_zeta_deriv(n, s - k, float(x), ctx)
        re.append(value.real)
        im.append(value.imag)
    return complex(math.fsum(re), math.fsum(im))


def multiple_hurwitz(N: int, s: complex, x: float, ctx: EvalContext = DEFAULT_CONTEXT) -> complex:
    """
    >>> round(multiple_hurwitz(2, 0, 0.5).real, 12)
    0.041666666667
    """
    return multiple_hurwitz_deriv(N, 0, s, x, ctx)


def recurrence_check_N(
    N: int, s: complex, x: float, ctx: EvalContext = DEFAULT_CONTEXT
) -> tuple[complex, complex]:
    """Both sides of (N-1) zeta_N(s, x) = zeta_{N-1}(s-1, x) + (N-1-x) zeta_{N-1}(s, x)."""
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    s = complex(s)
    x = float(x)
    lhs = (N - 1) * multiple_hurwitz(N, s, x, ctx)
    rhs = multiple_hurwitz(N - 1, s - 1, x, ctx) + (N - 1 - x) * multiple_hurwitz(N - 1, s, x, ctx)
    return lhs, rhs


def _term_label(term: HurwitzTerm) -> str:
    y = sympy.sstr(term.y)
    zeta = f"ζ(s,{y})" if term.k == 0 else f"ζ(s-{term.k},{y})"
    if term.coeff == 1:
        return zeta
    if term.coeff == -1:
        return f"-{zeta}"
    return f"({sympy.sstr(term.coeff)}){zeta}"


def render(decomposition: HurwitzDecomposition) -> str:
    """
    >>> render(decompose(2, X_SYMBOL, [1, sympy.Rational(1, 2)]))
    '(1 - x)ζ(s,x) + ζ(s-1,x) + (1/2 - x)ζ(s,x + 1/2) + ζ(s-1,x + 1/2)'
    """
    body = " + ".join(_term_label(term) for term in decomposition.terms)
    if decomposition.w == 1:
        return body
    w = sympy.sstr(decomposition.w)
    base = w if decomposition.w.is_Integer else f"({w})"
    return f"{base}^{{-s}}({body})"


def to_json(decomposition: HurwitzDecomposition) -> str:
    return DecompositionModel.from_decomposition(decomposition).model_dump_json()


def from_json(text: str) -> HurwitzDecomposition:
    return DecompositionModel.model_validate_json(text).to_decomposition()

