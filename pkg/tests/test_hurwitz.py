from __future__ import annotations

import math
import random

import mpmath
import pytest
import scipy.special
import sympy
from sympy.utilities.iterables import partitions

from barnes_zeta import hurwitz
from barnes_zeta.context import EvalContext
from barnes_zeta.errors import PoleError

R = sympy.Rational
EULER = 0.5772156649015329


@pytest.mark.parametrize("s", [-2.5, -1.0, 0.0, 0.5, 2.0, 3 + 4j, -1.5 + 2j])
@pytest.mark.parametrize("x", [0.25, 1.0, 2.5])
def test_hurwitz_zeta_matches_mpmath(ctx, s, x):
    expected = complex(mpmath.zeta(s, x))
    assert abs(hurwitz.hurwitz_zeta(s, x, ctx) - expected) <= 1e-10 * max(1.0, abs(expected))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [-2.0, 0.0, 0.5, 2.0])
@pytest.mark.parametrize("x", [1 / 3, 1.0, 1.75])
def test_hurwitz_derivatives_match_mpmath(ctx, n, s, x):
    expected = float(mpmath.zeta(s, x, n))
    value = hurwitz.hurwitz_zeta_deriv(n, s, x, ctx)
    assert value.real == pytest.approx(expected, rel=1e-10, abs=1e-11)
    assert abs(value.imag) < 1e-14


def test_pole_is_rejected(ctx):
    with pytest.raises(PoleError):
        hurwitz.hurwitz_zeta(1, 0.5, ctx)
    with pytest.raises(ValueError):
        hurwitz.hurwitz_zeta(2, 0.0, ctx)


def test_derivative_at_zero_of_riemann_zeta(ctx):
    value = hurwitz.hurwitz_zeta_deriv(1, 0, 1.0, ctx).real
    assert value == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-13)


def test_euler_and_first_stieltjes_constants(ctx):
    assert hurwitz.stieltjes(0, 1, ctx) == pytest.approx(EULER, abs=1e-12)
    assert hurwitz.stieltjes(1, 1, ctx) == pytest.approx(-0.0728158454836767, abs=1e-11)


@pytest.mark.parametrize("n", range(6))
@pytest.mark.parametrize("x", [R(1, 2), R(1, 3), R(5, 6), R(1)])
def test_stieltjes_matches_mpmath(ctx, n, x):
    expected = float(mpmath.stieltjes(n, float(x)))
    assert hurwitz.stieltjes(n, x, ctx) == pytest.approx(expected, rel=1e-9, abs=1e-10)


@pytest.mark.parametrize("x", [R(1, 2), R(1, 4), R(2, 3)])
def test_zeroth_stieltjes_is_minus_digamma(ctx, x):
    assert hurwitz.stieltjes(0, x, ctx) == pytest.approx(-scipy.special.digamma(float(x)), abs=1e-12)


def test_stieltjes_domain(ctx):
    with pytest.raises(ValueError):
        hurwitz.stieltjes(0, R(3, 2), ctx)
    with pytest.raises(ValueError):
        hurwitz.stieltjes(-1, 1, ctx)


@pytest.mark.parametrize("ell", range(4))
@pytest.mark.parametrize("m", range(1, 5))
def test_psi_deriv_matches_scipy(ctx, ell, m):
    expected = float(scipy.special.polygamma(ell, m))
    assert hurwitz.psi_deriv(ell, m, ctx) == pytest.approx(expected, rel=1e-11, abs=1e-12)


def test_bell_polynomials_have_gamma_derivative_structure():
    # coefficients of Gamma^(n)(s)/Gamma(s) in psi, psi', ...
    a, b, c, d, e = sympy.symbols("a b c d e")
    assert sympy.expand(hurwitz.bell_complete([a, b], 2)) == a**2 + b
    assert sympy.expand(hurwitz.bell_complete([a, b, c, d], 4)) == sympy.expand(
        a**4 + 6 * a**2 * b + 4 * a * c + 3 * b**2 + d
    )
    assert sympy.expand(hurwitz.bell_complete([a, b, c, d, e], 5)) == sympy.expand(
        a**5 + 10 * a**3 * b + 10 * a**2 * c + 15 * a * b**2 + 5 * a * d + 10 * b * c + e
    )


@pytest.mark.parametrize("m", range(1, 5))
def test_gamma_derivatives_from_digamma_expansions(ctx, m):
    psi = [float(scipy.special.polygamma(i, m)) for i in range(4)]
    gamma = math.gamma(m)
    expected = [
        gamma,
        gamma * psi[0],
        gamma * (psi[0] ** 2 + psi[1]),
        gamma * (psi[0] ** 3 + 3 * psi[0] * psi[1] + psi[2]),
        gamma * (psi[0] ** 4 + 6 * psi[0] ** 2 * psi[1] + 4 * psi[0] * psi[2] + 3 * psi[1] ** 2 + psi[3]),
    ]
    for a, value in enumerate(expected):
        assert hurwitz.gamma_deriv(a, m, ctx) == pytest.approx(value, rel=1e-11)


def test_gamma_derivatives_at_one(ctx):
    zeta2, zeta3 = math.pi**2 / 6, 1.2020569031595942
    assert hurwitz.gamma_deriv_at_one_table(1, ctx) == pytest.approx(-EULER, abs=1e-12)
    assert hurwitz.gamma_deriv_at_one_table(2, ctx) == pytest.approx(EULER**2 + zeta2, abs=1e-12)
    assert hurwitz.gamma_deriv_at_one_table(3, ctx) == pytest.approx(
        -(EULER**3) - 3 * EULER * zeta2 - 2 * zeta3, abs=1e-11
    )


@pytest.mark.parametrize("n", range(11))
def test_partition_form_agrees_with_bell_form(ctx, n):
    expected = hurwitz.gamma_deriv(n, 1, ctx)
    assert hurwitz.gamma_deriv_at_one_table(n, ctx) == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize("s", [-3, -4, -5, -6, -7, -7.5, -20])
@pytest.mark.parametrize("x", [0.25, 1.0, 2.5])
def test_hurwitz_zeta_far_left_of_the_origin(ctx, s, x):
    with mpmath.workdps(30):
        expected = float(mpmath.zeta(s, x))
    value = hurwitz.hurwitz_zeta(s, x, ctx)
    assert abs(value - expected) <= 1e-10 * max(1.0, abs(expected))


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("s", [-3.0, -5.5])
@pytest.mark.parametrize("x", [0.25, 1.0, 2.5])
def test_hurwitz_derivatives_far_left_of_the_origin(ctx, n, s, x):
    with mpmath.workdps(30):
        expected = float(mpmath.zeta(s, x, n))
    value = hurwitz.hurwitz_zeta_deriv(n, s, x, ctx)
    assert value.real == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_shift_in_x(ctx):
    rng = random.Random(314)
    for _ in range(20):
        s = rng.uniform(-6.0, 4.0)
        if abs(s - 1) < 0.05:
            continue
        x = rng.uniform(0.05, 3.0)
        difference = hurwitz.hurwitz_zeta(s, x, ctx) - hurwitz.hurwitz_zeta(s, x + 1, ctx)
        expected = x**-s
        scale = max(1.0, abs(expected), abs(hurwitz.hurwitz_zeta(s, x, ctx)))
        assert abs(difference - expected) <= 1e-10 * scale, (s, x)


@pytest.mark.parametrize("x", [R(1), R(1, 2), R(1, 3), R(2, 3)])
@pytest.mark.parametrize("h", [1e-2, 1e-3])
def test_laurent_expansion_at_the_pole(ctx, x, h):
    gammas = [hurwitz.stieltjes(n, x, ctx) for n in range(3)]
    regular = hurwitz.hurwitz_zeta(1 + h, float(x), ctx).real - 1 / h
    expansion = gammas[0] - gammas[1] * h + gammas[2] * h**2 / 2
    assert abs(regular - expansion) <= 10 * h**3 + 1e-9


@pytest.mark.parametrize("n", range(6, 11))
@pytest.mark.parametrize("x", [R(1), R(1, 7), R(1, 2)])
def test_high_order_stieltjes_constants(ctx, n, x):
    with mpmath.workdps(30):
        expected = float(mpmath.stieltjes(n, mpmath.mpf(x.p) / x.q))
    assert hurwitz.stieltjes(n, x, ctx) == pytest.approx(expected, rel=1e-10, abs=1e-10)


def bell_by_partitions(args: list[int], n: int) -> int:
    total = 0
    for parts in partitions(n):
        weight = math.factorial(n)
        term = 1
        for size, count in parts.items():
            weight //= math.factorial(count) * math.factorial(size) ** count
            term *= args[size - 1] ** count
        total += weight * term
    return total


def test_bell_polynomials_at_integers():
    rng = random.Random(99)
    for _ in range(25):
        n = rng.randint(1, 8)
        args = [rng.randint(-5, 5) for _ in range(n)]
        value = hurwitz.bell_complete(args, n)
        assert isinstance(value, int)
        assert value == bell_by_partitions(args, n)


# Gamma^(n)(1) written out in the Euler constant g and zeta values zk
GAMMA_AT_ONE = {
    0: "1",
    1: "-g",
    2: "g**2 + z2",
    3: "-g**3 - 3*g*z2 - 2*z3",
    4: "g**4 + 6*g**2*z2 + 8*g*z3 + 3*z2**2 + 6*z4",
    5: "-g**5 - 10*g**3*z2 - 20*g**2*z3 - 15*g*z2**2 - 30*g*z4 - 20*z2*z3 - 24*z5",
    6: (
        "g**6 + 15*g**4*z2 + 40*g**3*z3 + 45*g**2*z2**2 + 90*g**2*z4 + 120*g*z2*z3 + 144*g*z5"
        " + 15*z2**3 + 90*z2*z4 + 40*z3**2 + 120*z6"
    ),
    7: (
        "-g**7 - 21*g**5*z2 - 70*g**4*z3 - 105*g**3*z2**2 - 210*g**3*z4 - 420*g**2*z2*z3"
        " - 504*g**2*z5 - 105*g*z2**3 - 630*g*z2*z4 - 280*g*z3**2 - 840*g*z6 - 210*z2**2*z3"
        " - 504*z2*z5 - 420*z3*z4 - 720*z7"
    ),
    8: (
        "g**8 + 28*g**6*z2 + 112*g**5*z3 + 210*g**4*z2**2 + 420*g**4*z4 + 1120*g**3*z2*z3"
        " + 1344*g**3*z5 + 420*g**2*z2**3 + 2520*g**2*z2*z4 + 1120*g**2*z3**2 + 3360*g**2*z6"
        " + 1680*g*z2**2*z3 + 4032*g*z2*z5 + 3360*g*z3*z4 + 5760*g*z7 + 105*z2**4"
        " + 1260*z2**2*z4 + 1120*z2*z3**2 + 3360*z2*z6 + 2688*z3*z5 + 1260*z4**2 + 5040*z8"
    ),
    9: (
        "-g**9 - 36*g**7*z2 - 168*g**6*z3 - 378*g**5*z2**2 - 756*g**5*z4 - 2520*g**4*z2*z3"
        " - 3024*g**4*z5 - 1260*g**3*z2**3 - 7560*g**3*z2*z4 - 3360*g**3*z3**2 - 10080*g**3*z6"
        " - 7560*g**2*z2**2*z3 - 18144*g**2*z2*z5 - 15120*g**2*z3*z4 - 25920*g**2*z7"
        " - 945*g*z2**4 - 11340*g*z2**2*z4 - 10080*g*z2*z3**2 - 30240*g*z2*z6 - 24192*g*z3*z5"
        " - 11340*g*z4**2 - 45360*g*z8 - 2520*z2**3*z3 - 9072*z2**2*z5 - 15120*z2*z3*z4"
        " - 25920*z2*z7 - 2240*z3**3 - 20160*z3*z6 - 18144*z4*z5 - 40320*z9"
    ),
    10: (
        "g**10 + 45*g**8*z2 + 240*g**7*z3 + 630*g**6*z2**2 + 1260*g**6*z4 + 5040*g**5*z2*z3"
        " + 6048*g**5*z5 + 3150*g**4*z2**3 + 18900*g**4*z2*z4 + 8400*g**4*z3**2 + 25200*g**4*z6"
        " + 25200*g**3*z2**2*z3 + 60480*g**3*z2*z5 + 50400*g**3*z3*z4 + 86400*g**3*z7"
        " + 4725*g**2*z2**4 + 56700*g**2*z2**2*z4 + 50400*g**2*z2*z3**2 + 151200*g**2*z2*z6"
        " + 120960*g**2*z3*z5 + 56700*g**2*z4**2 + 226800*g**2*z8 + 25200*g*z2**3*z3"
        " + 90720*g*z2**2*z5 + 151200*g*z2*z3*z4 + 259200*g*z2*z7 + 22400*g*z3**3"
        " + 201600*g*z3*z6 + 181440*g*z4*z5 + 403200*g*z9 + 945*z2**5 + 18900*z2**3*z4"
        " + 25200*z2**2*z3**2 + 75600*z2**2*z6 + 120960*z2*z3*z5 + 56700*z2*z4**2"
        " + 226800*z2*z8 + 50400*z3**2*z4 + 172800*z3*z7 + 151200*z4*z6 + 72576*z5**2"
        " + 362880*z10"
    ),
}


@pytest.mark.parametrize("n", range(11))
def test_gamma_derivatives_at_one_written_out(ctx, n):
    constants = {"g": hurwitz.stieltjes(0, 1, ctx)}
    constants.update({f"z{k}": hurwitz.hurwitz_zeta(k, 1.0, ctx).real for k in range(2, 11)})
    symbols = {name: sympy.Symbol(name) for name in constants}
    expression = sympy.sympify(GAMMA_AT_ONE[n], locals=symbols)
    expected = float(expression.subs({symbols[name]: value for name, value in constants.items()}))
    assert hurwitz.gamma_deriv(n, 1, ctx) == pytest.approx(expected, rel=1e-9)


def test_only_integer_arguments_are_memoized():
    ctx = EvalContext()
    for i in range(50):
        hurwitz.hurwitz_zeta(0.5 + i / 1000, 0.3, ctx)
    assert len(ctx.value_cache) == 0
    hurwitz.hurwitz_zeta(3, 0.3, ctx)
    assert len(ctx.value_cache) == 1


def test_value_cache_is_bounded():
    ctx = EvalContext(value_cache_size=3)
    for m in range(2, 10):
        value = hurwitz.hurwitz_zeta(m, 1.0, ctx).real
        assert value == pytest.approx(float(mpmath.zeta(m)), rel=1e-12)
    assert len(ctx.value_cache) == 3
