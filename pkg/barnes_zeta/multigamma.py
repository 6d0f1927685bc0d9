from __future__ import annotations

import math
import warnings
from typing import Sequence

import joblib
import numpy as np
import sympy

import barnes_zeta.exact
import barnes_zeta.hurwitz
import barnes_zeta.reduction
import barnes_zeta.special_values
from barnes_zeta.context import DEFAULT_CONTEXT, EvalContext
from barnes_zeta.datatypes import KummerReport
from barnes_zeta.errors import ConvergenceError

# largest tail bound kummer_rhs accepts by default, per N
DEFAULT_MAX_TAIL = {1: 1e-3, 2: 2e-4, 3: 1e-7}
FALLBACK_MAX_TAIL = 1e-9


def log_gamma_N(N: int, x: float, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """
    log Gamma_N(x) = zeta_N'(0, x), the multiple Hurwitz zeta function with unit periods.

    >>> round(log_gamma_N(1, 0.5), 12) == round(-0.5 * math.log(2), 12)
    True
    """
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    return barnes_zeta.reduction.multiple_hurwitz_deriv(N, 1, 0, float(x), ctx).real


def _hurwitz_deriv_reduced(k: int, y: sympy.Rational, ctx: EvalContext) -> float:
    """zeta'(-k, y) from zeta'(-k, u/v) plus the finite sum over the integer part of y."""
    frac = barnes_zeta.special_values.frac_decomp(y)
    reduced = float(frac.fraction)
    value = barnes_zeta.hurwitz.hurwitz_zeta_deriv(1, -k, reduced, ctx).real
    correction = [math.log(m + reduced) * (m + reduced) ** k for m in range(frac.Y)]
    return math.fsum([value] + correction)


def log_gamma_N_periods(
    N: int, x: sympy.Rational, w_vec: Sequence[sympy.Rational], ctx: EvalContext = DEFAULT_CONTEXT
) -> float:
    """
    log Gamma_N(x | w) = zeta_N'(0, x | w)
    = sum coeff * (zeta'(-k, y) - log(w) zeta(-k, y)), with zeta(-k, y) exact.

    >>> value = log_gamma_N_periods(1, sympy.Rational(1, 2), [sympy.Rational(1, 2)])
    >>> round(value, 12) == round(-0.5 * math.log(2 * math.pi) + 0.5 * math.log(0.5), 12)
    True
    """
    decomposition = barnes_zeta.reduction.decompose(N, sympy.Rational(x), w_vec)
    log_w = math.log(float(decomposition.w))
    parts = []
    for term in decomposition.terms:
        value = float(barnes_zeta.exact.hurwitz_value_nonpos(term.k, term.y))
        deriv = _hurwitz_deriv_reduced(term.k, term.y, ctx)
        parts.append(float(term.coeff) * (deriv - log_w * value))
    return math.fsum(parts)


def symmetric_sum(N: int, ell: int, x, lo: int = 1):
    """
    Sum over lo <= a_1 <= ... <= a_ell <= N - ell of (a_1 - x)...(a_ell - x), i.e. the
    complete homogeneous symmetric polynomial h_ell of {a - x : a = lo..N-ell}.
    Accepts floats or sympy expressions for x.

    >>> symmetric_sum(4, 2, 0)
    7
    >>> symmetric_sum(3, 0, 0.25)
    1
    """
    if ell < 0:
        raise ValueError(f"ell must be non-negative, got {ell}")
    h = [1] + [0] * ell
    for a in range(lo, N - ell + 1):
        z = a - x
        for j in range(1, ell + 1):
            h[j] = h[j] + z * h[j - 1]
    return h[ell]


def recurrence_check_k(
    N: int, k: int, s: complex, x: float, ctx: EvalContext = DEFAULT_CONTEXT
) -> tuple[complex, complex]:
    """
    Both sides of
    zeta_{N-k}(s-k, x) = sum_{l<=k} (-1)^l zeta_{N-l}(s, x) prod_{i=1}^{k-l} (N-k+i-1) h_l,
    where h_l runs over N-k <= a_1 <= ... <= a_l <= N-l.
    """
    if not 1 <= k <= N - 1:
        raise ValueError(f"need 1 <= k <= N-1, got N={N}, k={k}")
    x = float(x)
    lhs = barnes_zeta.reduction.multiple_hurwitz(N - k, s - k, x, ctx)
    parts = []
    for ell in range(k + 1):
        product = math.prod(N - k + i - 1 for i in range(1, k - ell + 1))
        weight = (-1) ** ell * product * symmetric_sum(N, ell, x, lo=N - k)
        parts.append(weight * barnes_zeta.reduction.multiple_hurwitz(N - ell, s, x, ctx))
    rhs = complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
    return lhs, rhs


def lhs_coefficients(N: int, x) -> list:
    """
    Coefficients of log Gamma_{N-l}(x), l = 0..N-1, in the multiple gamma side of the
    Kummer-type formula, normalized so log Gamma_N(x) has coefficient 1.

    >>> x = sympy.Symbol("x")
    >>> [sympy.expand(c) for c in lhs_coefficients(3, x)]
    [1, x - 3/2, x**2/2 - x + 1/2]
    """
    coefficients = []
    for ell in range(N):
        if isinstance(x, sympy.Expr):
            weight = sympy.Rational(math.factorial(N - ell - 1), math.factorial(N - 1))
        else:
            weight = math.factorial(N - ell - 1) / math.factorial(N - 1)
        coefficients.append((-1) ** ell * weight * symmetric_sum(N, ell, x))
    return coefficients


def zeta_deriv_neg_via_gammas(N: int, x: float, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """
    zeta'(-(N-1), x) = sum_l (-1)^l log Gamma_{N-l}(x) (N-l-1)! h_l(x).

    >>> round(zeta_deriv_neg_via_gammas(1, 1.0), 10)
    -0.9189385332
    """
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    parts = [
        (-1) ** ell
        * log_gamma_N(N - ell, x, ctx)
        * math.factorial(N - ell - 1)
        * symmetric_sum(N, ell, float(x))
        for ell in range(N)
    ]
    return math.fsum(parts)


def kummer_lhs(N: int, x: float, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """Multiple gamma side of the Kummer-type formula; it equals zeta'(-(N-1), x)."""
    _check_kummer_args(N, x)
    return zeta_deriv_neg_via_gammas(N, float(x), ctx)


def _check_kummer_args(N: int, x) -> None:
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if not 0 < x <= 1:
        raise ValueError(f"x must lie in (0, 1], got {x}")
    if N == 1 and x == 1:
        raise ValueError("the N=1 series diverges at x=1")


def _phases(n: np.ndarray, x: float | sympy.Rational) -> np.ndarray:
    """2 pi n x reduced mod 2 pi, exact in the integers when x is rational."""
    if isinstance(x, sympy.Rational):
        p, q = int(x.p), int(x.q)
        return 2 * np.pi * ((n * p) % q) / q
    return 2 * np.pi * np.mod(n * float(x), 1.0)


def _chunk_sums(start: int, stop: int, N: int, x) -> tuple[float, float, float]:
    """Compensated partial sums of log(n) f(2 pi n x)/n^N, f/n^N and g/n^N over [start, stop)."""
    n = np.arange(start, stop, dtype=np.int64)
    phase = _phases(n, x)
    weight = 1.0 / n.astype(float) ** N
    if N % 2 == 0:
        first, second = np.cos(phase) * weight, np.sin(phase) * weight
    else:
        first, second = np.sin(phase) * weight, np.cos(phase) * weight
    logged = np.log(n.astype(float)) * first
    return math.fsum(logged.tolist()), math.fsum(first.tolist()), math.fsum(second.tolist())


def _tail_bound(N: int, M: int, x: float, prefactor: float, constant: float) -> float:
    if N == 1:
        # Dirichlet test: partial sums of e^{2 pi i n x} are bounded by 1/sin(pi x)
        numerator = math.log(M + 1) + abs(constant) + math.pi / 2
        return abs(prefactor) * numerator / ((M + 1) * math.sin(math.pi * x))
    log_integral = math.log(M) / ((N - 1) * M ** (N - 1)) + 1 / ((N - 1) ** 2 * M ** (N - 1))
    power_integral = 1 / ((N - 1) * M ** (N - 1))
    return abs(prefactor) * (log_integral + (abs(constant) + math.pi / 2) * power_integral)


def kummer_rhs(
    N: int,
    x: float | sympy.Rational,
    ctx: EvalContext = DEFAULT_CONTEXT,
    terms: int | None = None,
    max_tail: float | None = None,
) -> tuple[float, float]:
    """
    Fourier side of the Kummer-type formula for zeta'(-(N-1), x), truncated after `terms`
    terms. Returns the value and a bound on the discarded tail.

    Even N: 2(-1)^{N/2}(N-1)!/(2 pi)^N {S_log,cos + (log 2 pi + gamma - H_{N-1}) S_cos - (pi/2) S_sin}.
    Odd N: 2(-1)^{(N-1)/2}(N-1)!/(2 pi)^N {S_log,sin + (log 2 pi + gamma - H_{N-1}) S_sin + (pi/2) S_cos}.
    """
    _check_kummer_args(N, x)
    terms = ctx.fourier_terms if terms is None else terms
    if terms < 1:
        raise ValueError(f"terms must be positive, got {terms}")
    if N == 1:
        warnings.warn("the N=1 series converges conditionally; treat the check as informational")

    sign = (-1) ** (N // 2) if N % 2 == 0 else (-1) ** ((N - 1) // 2)
    prefactor = 2 * sign * math.factorial(N - 1) / (2 * math.pi) ** N
    constant = math.log(2 * math.pi) + barnes_zeta.hurwitz.stieltjes(0, 1, ctx) - float(sympy.harmonic(N - 1))

    bounds = list(range(1, terms + 1, ctx.fourier_chunk)) + [terms + 1]
    parallel = joblib.Parallel(n_jobs=ctx.n_jobs, prefer="threads")
    chunks = parallel(joblib.delayed(_chunk_sums)(lo, hi, N, x) for lo, hi in zip(bounds, bounds[1:]))
    logged, first, second = (math.fsum(column) for column in zip(*chunks))

    if N % 2 == 0:
        value = prefactor * math.fsum([logged, constant * first, -math.pi / 2 * second])
    else:
        value = prefactor * math.fsum([logged, constant * first, math.pi / 2 * second])

    tail = _tail_bound(N, terms, float(x), prefactor, constant)
    limit = DEFAULT_MAX_TAIL.get(N, FALLBACK_MAX_TAIL) if max_tail is None else max_tail
    if tail > limit:
        raise ConvergenceError(
            f"tail bound {tail:.3g} after {terms} terms exceeds {limit:.3g} for N={N}, x={x}"
        )
    return value, tail


def kummer_check(
    N: int,
    x: float | sympy.Rational,
    ctx: EvalContext = DEFAULT_CONTEXT,
    terms: int | None = None,
    tolerance: float = 1e-8,
) -> KummerReport:
    """Evaluates both sides of the Kummer-type formula and reports their defect."""
    terms = ctx.fourier_terms if terms is None else terms
    lhs = kummer_lhs(N, float(x), ctx)
    rhs, tail = kummer_rhs(N, x, ctx, terms=terms)
    return KummerReport(
        N=N,
        x=float(x),
        terms=terms,
        lhs=lhs,
        rhs=rhs,
        tail_bound=tail,
        defect=abs(lhs - rhs),
        tolerance=tolerance,
    )
