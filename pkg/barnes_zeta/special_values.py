from __future__ import annotations

import math
from typing import Callable, Literal, Sequence

import joblib
import more_itertools
import sympy

import barnes_zeta.exact
import barnes_zeta.hurwitz
import barnes_zeta.numbers
import barnes_zeta.reduction
from barnes_zeta.context import DEFAULT_CONTEXT, EvalContext
from barnes_zeta.datatypes import FracDecomp, period_vector
from barnes_zeta.errors import CapExceededError

MAX_DERIV_ORDER = 5
MAX_ELL = 4
MAX_N = 4

Route = Literal["auto", "exact", "em", "closed-form"]


def frac_decomp(y: sympy.Rational) -> FracDecomp:
    """
    y = Y + u/v with 1 <= u <= v; positive integers map to u = v = 1.

    >>> frac_decomp(sympy.Rational(7, 6))
    FracDecomp(Y=1, u=1, v=6)
    >>> frac_decomp(2)
    FracDecomp(Y=1, u=1, v=1)
    """
    y = sympy.Rational(y)
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    if y.is_Integer:
        return FracDecomp(int(y) - 1, 1, 1)
    Y = int(y.p // y.q)
    frac = y - Y
    return FracDecomp(Y, int(frac.p), int(frac.q))


def _sin_half_pi(A: int, v: int) -> float:
    """sin(pi A / (2v)), exact at multiples of pi/2."""
    A %= 4 * v
    if A % v == 0:
        return (0.0, 1.0, 0.0, -1.0)[A // v]
    return math.sin(math.pi * A / (2 * v))


def _epsilon(c: int, u: int, v: int) -> float:
    if c % 2 == 1 or u != v:
        return 0.0
    return (-1) ** (c // 2 + 1) / (c + 1) * (math.pi / 2) ** (c + 1) * v


def _h_deriv_uncached(c: int, m: int, u: int, v: int, ctx: EvalContext) -> float:
    parts = []
    if m >= 2:
        for k in range(1, v + 1):
            for i in range(c + 1):
                sine = _sin_half_pi((m + c - i - 1) * v - 4 * k * u, v)
                if sine == 0.0:
                    continue
                zeta = barnes_zeta.hurwitz.hurwitz_zeta_deriv(i, m, k / v, ctx).real
                parts.append(-math.comb(c, i) * (math.pi / 2) ** (c - i) * sine * zeta)
        return math.fsum(parts)

    parts.append(_epsilon(c, u, v))
    for k in range(1, v + 1):
        for i in range(c + 1):
            sine = _sin_half_pi((c - i) * v - 4 * k * u, v)
            if sine == 0.0:
                continue
            gamma_i = barnes_zeta.hurwitz.stieltjes(i, sympy.Rational(k, v), ctx)
            parts.append((-1) ** (i + 1) * math.comb(c, i) * (math.pi / 2) ** (c - i) * sine * gamma_i)
    return math.fsum(parts)


def h_deriv(c: int, m: int, u: int, v: int, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """
    c-th derivative at s = m of H(s, u/v) = sum_{k=1}^v cos(pi s/2 - 2 pi k u/v) zeta(s, k/v).
    H depends on v and not only on u/v: H(s, 2/2) = 2^s H(s, 1/1). Only (2 pi v)^{-s} H(s, u/v)
    is a function of the ratio, so pass u/v as written in the functional equation.

    >>> round(h_deriv(0, 1, 1, 1), 12) == round(-math.pi / 2, 12)
    True
    """
    if c < 0 or m < 1:
        raise ValueError(f"need c >= 0 and m >= 1, got c={c}, m={m}")
    if not 1 <= u <= v:
        raise ValueError(f"need 1 <= u <= v, got u={u}, v={v}")
    key = ("h_deriv", c, m, u, v)
    return ctx.value_cache.get_or_compute(key, lambda: _h_deriv_uncached(c, m, u, v, ctx))


def _correction(j: int, power: int, frac: FracDecomp) -> float:
    """sum_{m<Y} (-log(m + u/v))^j (m + u/v)^power."""
    parts = []
    for m in range(frac.Y):
        base = m + frac.u / frac.v
        parts.append((-math.log(base)) ** j * base**power)
    return math.fsum(parts)


def _functional_equation_sum(
    j: int, s: int, frac: FracDecomp, gamma_at: Callable[[int], float], ctx: EvalContext
) -> float:
    two_pi_v = 2 * math.pi * frac.v
    log_factor = -math.log(two_pi_v)
    parts = []
    for (a, b, c), multinomial in sorted(sympy.multinomial_coefficients(3, j).items()):
        parts.append(
            int(multinomial)
            * gamma_at(a)
            * log_factor**b
            * two_pi_v ** (-s)
            * h_deriv(c, s, frac.u, frac.v, ctx)
        )
    return (-1) ** j * 2 * math.fsum(parts)


def hurwitz_deriv_nonpos_rational(
    j: int, ell: int, y: sympy.Rational, ctx: EvalContext = DEFAULT_CONTEXT
) -> float:
    """
    zeta^(j)(-ell, y) for rational y > 0 from the functional equation at s = ell + 1:
    (-1)^j 2 sum_{a+b+c=j} (j; a,b,c) Gamma^(a)(s) (-log 2 pi v)^b (2 pi v)^{-s} H^(c)(s, u/v)
    minus the finite correction for the integer part of y.

    >>> round(hurwitz_deriv_nonpos_rational(0, 0, sympy.Rational(1, 4)), 10)
    0.25
    """
    if j < 0 or ell < 0:
        raise ValueError(f"need j >= 0 and ell >= 0, got j={j}, ell={ell}")
    y = sympy.Rational(y)
    frac = frac_decomp(y)
    key = ("hurwitz_deriv_nonpos_rational", j, ell, int(y.p), int(y.q))

    def compute() -> float:
        s = ell + 1
        main = _functional_equation_sum(j, s, frac, lambda a: barnes_zeta.hurwitz.gamma_deriv(a, s, ctx), ctx)
        return main - _correction(j, ell, frac)

    return ctx.value_cache.get_or_compute(key, compute)


def hurwitz_deriv_zero(n: int, x: sympy.Rational, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """
    zeta^(n)(0, x) with Gamma^(a)(1) taken from its gamma/zeta partition form; at x = 1 this is
    the derivative of the Riemann zeta function at 0.

    >>> round(hurwitz_deriv_zero(1, 1), 10)
    -0.9189385332
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    frac = frac_decomp(x)
    main = _functional_equation_sum(
        n, 1, frac, lambda a: barnes_zeta.hurwitz.gamma_deriv_at_one_table(a, ctx), ctx
    )
    return main - _correction(n, 0, frac)


def zeta_zero_closed_form(u: int, v: int, n: int = 0, ctx: EvalContext = DEFAULT_CONTEXT) -> float:
    """
    zeta(0, u/v) (n=0) and zeta'(0, u/v) (n=1) written through gamma_0(k/v) and gamma_1(k/v).

    >>> zeta_zero_closed_form(3, 3)
    -0.5
    """
    if not 1 <= u <= v:
        raise ValueError(f"need 1 <= u <= v, got u={u}, v={v}")
    if n not in (0, 1):
        raise ValueError(f"closed forms exist for n = 0 and n = 1 only, got n={n}")
    gamma0 = [barnes_zeta.hurwitz.stieltjes(0, sympy.Rational(k, v), ctx) for k in range(1, v + 1)]
    sines = [_sin_half_pi(4 * k * u, v) for k in range(1, v + 1)]
    if n == 0:
        if u == v:
            return -0.5
        return math.fsum(g * s for g, s in zip(gamma0, sines)) / (math.pi * v)

    euler = barnes_zeta.hurwitz.stieltjes(0, 1, ctx)
    log_2_pi_v = math.log(2 * math.pi * v)
    if u == v:
        return -0.5 * (euler + log_2_pi_v) + math.fsum(gamma0) / (2 * v)
    gamma1 = [barnes_zeta.hurwitz.stieltjes(1, sympy.Rational(k, v), ctx) for k in range(1, v + 1)]
    cosines = [_sin_half_pi(v - 4 * k * u, v) for k in range(1, v + 1)]
    parts = [(euler + log_2_pi_v) * g * s for g, s in zip(gamma0, sines)]
    parts += [math.pi / 2 * g * c for g, c in zip(gamma0, cosines)]
    parts += [g1 * s for g1, s in zip(gamma1, sines)]
    return math.fsum(parts) / (math.pi * v)


def check_caps(n: int, ell: int, N: int) -> None:
    if n > MAX_DERIV_ORDER or ell > MAX_ELL or N > MAX_N:
        raise CapExceededError(
            f"closed form supports n <= {MAX_DERIV_ORDER}, ell <= {MAX_ELL}, N <= {MAX_N}; "
            f"got n={n}, ell={ell}, N={N}"
        )
    if n < 0 or ell < 0 or N < 1:
        raise ValueError(f"need n >= 0, ell >= 0, N >= 1; got n={n}, ell={ell}, N={N}")


def barnes_deriv_nonpos(
    n: int,
    ell: int,
    N: int,
    x: sympy.Rational,
    w_vec: Sequence[sympy.Rational],
    ctx: EvalContext = DEFAULT_CONTEXT,
) -> float:
    """
    zeta_N^(n)(-ell, x | w) for rational x and periods:
    sum_j C(n, j) (-log w)^{n-j} w^ell sum coeff zeta^(j)(-ell-k, y), each Hurwitz
    derivative taken from the functional equation.

    >>> abs(barnes_deriv_nonpos(0, 0, 3, sympy.Rational(1, 3), [1, "1/2", "1/3"])) < 1e-10
    True
    """
    check_caps(n, ell, N)
    decomposition = barnes_zeta.reduction.decompose(N, sympy.Rational(x), period_vector(w_vec))
    w = decomposition.w
    log_w = math.log(float(w))
    w_power = float(w**ell)
    parts = []
    for j in range(n + 1):
        weight = math.comb(n, j) * (-log_w) ** (n - j) * w_power
        for term in decomposition.terms:
            value = hurwitz_deriv_nonpos_rational(j, ell + term.k, term.y, ctx)
            parts.append(weight * float(term.coeff) * value)
    return math.fsum(parts)


def grid_nodes(lo: float, hi: float, steps: int) -> list[float]:
    """
    Cell midpoints of [lo, hi].

    >>> grid_nodes(0.0, 1.0, 4)
    [0.125, 0.375, 0.625, 0.875]
    """
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps}")
    if not lo < hi:
        raise ValueError(f"empty range ({lo}, {hi})")
    width = (hi - lo) / steps
    return [lo + (i + 0.5) * width for i in range(steps)]


def _evaluate_rows(
    points: list[tuple[float, float]], evaluate: Callable[[float, float], float], ctx: EvalContext
) -> list[tuple[float, float, float]]:
    def run(chunk: list[tuple[float, float]]) -> list[tuple[float, float, float]]:
        return [(a, b, evaluate(a, b)) for a, b in chunk]

    chunks = more_itertools.chunked(points, max(1, len(points) // max(1, 4 * ctx.n_jobs)))
    parallel = joblib.Parallel(n_jobs=ctx.n_jobs, prefer="threads")
    results = parallel(joblib.delayed(run)(chunk) for chunk in chunks)
    return [row for chunk in results for row in chunk]


def barnes_zeta0_grid(
    x: sympy.Rational,
    w1_range: tuple[float, float],
    w2_range: tuple[float, float],
    steps: int,
    n: int = 0,
    ctx: EvalContext = DEFAULT_CONTEXT,
    max_den: int = 100,
    route: Route = "auto",
) -> list[tuple[float, float, float]]:
    """
    Rows (w1, w2, zeta_2^(n)(0, x | w1, w2)) over the midpoints of a steps x steps grid.
    Each node is rationalized with denominators <= max_den before evaluation.
    """
    x = sympy.Rational(x)
    if route == "auto":
        route = "exact" if n == 0 else "em"
    if route == "exact" and n != 0:
        raise ValueError("the exact route only yields values, not derivatives (n must be 0)")
    if route not in ("exact", "em", "closed-form"):
        raise ValueError(f"unknown route {route!r}")

    def evaluate(w1: float, w2: float) -> float:
        periods = (
            barnes_zeta.numbers.rationalize_positive(w1, max_den, name="w1"),
            barnes_zeta.numbers.rationalize_positive(w2, max_den, name="w2"),
        )
        if route == "exact":
            return float(barnes_zeta.exact.barnes_value_nonpos(2, 0, x, periods))
        if route == "closed-form":
            return barnes_deriv_nonpos(n, 0, 2, x, periods, ctx)
        decomposition = barnes_zeta.reduction.decompose(2, x, periods)
        return barnes_zeta.reduction.eval_decomposition_deriv(decomposition, n, 0, ctx).real

    points = [(a, b) for a in grid_nodes(*w1_range, steps) for b in grid_nodes(*w2_range, steps)]
    return _evaluate_rows(points, evaluate, ctx)


def barnes_zeta_surface(
    N: int,
    w_vec: Sequence[sympy.Rational],
    s_range: tuple[float, float],
    x_range: tuple[float, float],
    steps: int,
    ctx: EvalContext = DEFAULT_CONTEXT,
) -> list[tuple[float, float, float]]:
    """Rows (s, x, zeta_N(s, x | w)) for real s and x over a steps x steps grid of midpoints."""
    periods = period_vector(w_vec)
    if len(periods) != N:
        raise ValueError(f"expected {N} periods, got {len(periods)}")
    if x_range[0] < 0:
        raise ValueError(f"x range must be non-negative, got {x_range}")
    decompositions = {
        x: barnes_zeta.reduction.decompose_real(N, x, periods, ctx.max_den, ctx.target_tol)
        for x in grid_nodes(*x_range, steps)
    }

    def evaluate(s: float, x: float) -> float:
        return barnes_zeta.reduction.eval_decomposition(decompositions[x], s, ctx).real

    points = [(s, x) for s in grid_nodes(*s_range, steps) for x in decompositions]
    return _evaluate_rows(points, evaluate, ctx)
