from __future__ import annotations

import math
import random
import types

import numpy as np
import pytest
import scipy.special
import sympy

from barnes_zeta import exact, reduction
from barnes_zeta.errors import ConvergenceError, NoSignChange, PoleError

R = sympy.Rational
x = reduction.X_SYMBOL


def test_scale_params():
    assert reduction.scale_params([R(2, 3), R(3, 4)]) == (6, [9, 8])
    assert reduction.scale_params([1, R(1, 2), R(1, 3)]) == (1, [1, 2, 3])


def test_lattice_params_rejects_non_multiples():
    with pytest.raises(ValueError):
        reduction.lattice_params([1, R(1, 2)], q=3)
    with pytest.raises(ValueError):
        reduction.lattice_params([1, R(1, 2)], q=2, ell=3)


def test_c_polynomial():
    assert reduction.c_polynomial(1, x).as_expr() == 1
    assert reduction.c_polynomial(4, sympy.Integer(0)).all_coeffs() == [1, 6, 11, 6]
    assert reduction.c_coefficients_float(3, 0.0).tolist() == pytest.approx([1.0, 1.5, 0.5])


def test_render_half_period():
    decomposition = reduction.decompose(2, x, [1, R(1, 2)])
    assert reduction.render(decomposition) == (
        "(1 - x)ζ(s,x) + ζ(s-1,x) + (1/2 - x)ζ(s,x + 1/2) + ζ(s-1,x + 1/2)"
    )


def test_render_doubled_period():
    decomposition = reduction.decompose(2, x, [1, 2])
    assert reduction.render(decomposition) == (
        "2^{-s}((1 - x/2)ζ(s,x/2) + ζ(s-1,x/2) + (1/2 - x/2)ζ(s,x/2 + 1/2) + ζ(s-1,x/2 + 1/2))"
    )


def test_render_single_unit_period():
    assert reduction.render(reduction.decompose(1, x, [1])) == "ζ(s,x)"


def test_symbolic_substitution_matches_direct_reduction():
    symbolic = reduction.decompose(3, x, [1, R(1, 2), R(1, 3)])
    concrete = reduction.decompose(3, R(1, 3), [1, R(1, 2), R(1, 3)])
    substituted = reduction.substitute(symbolic, R(1, 3))
    assert sorted(substituted.terms) == sorted(concrete.terms)
    assert substituted.w == concrete.w


@pytest.mark.parametrize(
    "N, x0, w",
    [
        (1, R(1, 4), [1]),
        (2, R(1, 3), [1, R(1, 2)]),
        (2, R(1, 10), [R(2, 5), R(3, 7)]),
        (3, R(1, 3), [1, R(1, 2), R(1, 3)]),
        (4, R(3, 2), [1, 1, R(1, 2), 2]),
    ],
)
def test_float_evaluation_matches_exact_values(ctx, N, x0, w):
    decomposition = reduction.decompose(N, x0, w)
    for ell in range(3):
        value = reduction.eval_decomposition(decomposition, -ell, ctx)
        expected = float(exact.barnes_value_nonpos(N, ell, x0, w))
        assert value.real == pytest.approx(expected, rel=1e-9, abs=1e-10)


def test_brute_force_double_series(ctx):
    # zeta_2(5, 1/2 | 1, 1/2) = sum_n zeta(5, 1/2 + n/2)
    n = np.arange(20_000)
    expected = math.fsum(scipy.special.zeta(5.0, 0.5 + n / 2).tolist())
    value = reduction.eval_decomposition(reduction.decompose(2, R(1, 2), [1, R(1, 2)]), 5, ctx)
    assert value.real == pytest.approx(expected, rel=1e-9)


def test_any_common_multiple_gives_the_same_function(ctx):
    coarse = reduction.decompose(2, R(1, 3), [1, R(1, 2)])
    fine = reduction.decompose(2, R(1, 3), [1, R(1, 2)], q=2, ell=4)
    assert len(fine.terms) > len(coarse.terms)
    for s in [0.5, -1.5, 2 + 1j]:
        a = reduction.eval_decomposition(coarse, s, ctx)
        b = reduction.eval_decomposition(fine, s, ctx)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_unmerged_decomposition_evaluates_identically(ctx):
    merged = reduction.decompose(2, R(1, 2), [1, 1])
    raw = reduction.decompose(2, R(1, 2), [1, 1], merge=False)
    assert reduction.eval_decomposition(merged, 0.3, ctx) == pytest.approx(
        reduction.eval_decomposition(raw, 0.3, ctx), rel=1e-12
    )


def test_json_round_trip_evaluates_bit_for_bit(ctx):
    decomposition = reduction.decompose(3, R(2, 7), [R(1, 2), R(1, 3), 1])
    parsed = reduction.from_json(reduction.to_json(decomposition))
    assert parsed == decomposition
    direct = reduction.eval_decomposition(decomposition, 0.25, ctx)
    assert reduction.eval_decomposition(parsed, 0.25, ctx) == direct


def test_symbolic_json_round_trip():
    decomposition = reduction.decompose(2, x, [1, R(1, 2)])
    assert reduction.from_json(reduction.to_json(decomposition)) == decomposition


def test_symbolic_decomposition_cannot_be_evaluated(ctx):
    with pytest.raises(ValueError):
        reduction.eval_decomposition(reduction.decompose(2, x, [1, 1]), 0.5, ctx)


def test_float_lane_matches_exact_lane(ctx):
    real = reduction.decompose_real(2, 0.3, [1.0, 0.5])
    rational = reduction.decompose(2, R(3, 10), [1, R(1, 2)])
    for s in [0.5, -2.0]:
        assert reduction.eval_decomposition(real, s, ctx).real == pytest.approx(
            reduction.eval_decomposition(rational, s, ctx).real, rel=1e-12
        )


def test_coarse_rationalization_warns():
    with pytest.warns(UserWarning):
        reduction.decompose_real(2, 0.5, [1.0, math.pi / 4], max_den=100)


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("s", [0.3, -1.5, 0.5 + 2j])
@pytest.mark.parametrize("x0", [0.25, 0.75, 1.5])
def test_order_recurrence(ctx, N, s, x0):
    lhs, rhs = reduction.recurrence_check_N(N, s, x0, ctx)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_poles_of_multiple_hurwitz(ctx):
    for pole in (1, 2, 3):
        with pytest.raises(PoleError):
            reduction.multiple_hurwitz(3, pole, 0.5, ctx)


def test_zero_of_two_period_function(ctx):
    report = reduction.find_zero(2, R(1, 3), [1, R(1, 2)], (0.1, 0.4), ctx)
    assert report.s_root == pytest.approx(0.2558028917231215, abs=1e-10)
    assert report.residual <= ctx.target_tol
    assert report.bracket[0] <= report.s_root <= report.bracket[1]


def test_exact_zero_at_the_origin(ctx):
    report = reduction.find_zero(3, R(1, 3), [1, R(1, 2), R(1, 3)], (-0.1, 0.1), ctx)
    assert abs(report.s_root) < 1e-10


def test_find_zero_errors(ctx):
    with pytest.raises(PoleError):
        reduction.find_zero(3, R(1, 3), [1, R(1, 2), R(1, 3)], (2.5, 3.5), ctx)
    with pytest.raises(NoSignChange):
        reduction.find_zero(2, R(1, 3), [1, R(1, 2)], (0.3, 0.4), ctx)


def test_zero_with_large_residual_is_rejected(ctx, monkeypatch):
    def stop_early(f, lo, hi, **kwargs):
        return lo, types.SimpleNamespace(iterations=1)

    monkeypatch.setattr(reduction.scipy.optimize, "brentq", stop_early)
    with pytest.raises(ConvergenceError):
        reduction.find_zero(2, R(1, 3), [1, R(1, 2)], (0.1, 0.4), ctx)


def test_four_periods_far_left_of_the_origin(ctx):
    w = [1, 1, R(1, 2), 2]
    value = reduction.eval_decomposition(reduction.decompose(4, R(5, 2), w), -4, ctx)
    expected = float(exact.barnes_value_nonpos(4, 4, R(5, 2), w))
    assert value.real == pytest.approx(expected, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("c", [R(1, 2), 2, 3])
@pytest.mark.parametrize(
    "N, x0, w",
    [(1, R(1, 3), [R(1, 2)]), (2, R(1, 3), [1, R(1, 2)]), (3, R(3, 4), [1, R(2, 3), R(1, 2)])],
)
def test_scaling_all_arguments(ctx, c, N, x0, w):
    s = N + 2
    scaled = reduction.decompose(N, c * x0, [c * wi for wi in w])
    value = reduction.eval_decomposition(scaled, s, ctx)
    expected = float(c) ** -s * reduction.eval_decomposition(reduction.decompose(N, x0, w), s, ctx)
    assert value == pytest.approx(expected, rel=1e-10)


def direct_series(s: float, y, w: list[float], terms: int = 400):
    """
    sum over n >= 0 of (y + n . w)^(-s), elementwise in y. The last period is summed
    exactly by scipy's Hurwitz zeta; the others are cut after `terms` steps and the rest
    replaced by the Euler-Maclaurin tail, using
    int_Y^inf zeta_M(s, y) dy = zeta_M(s-1, Y) / (s-1) and d/dy zeta_M(s, y) = -s zeta_M(s+1, y).
    The neglected remainder is of order h^3 Y^(M-s-3) and needs s > len(w).
    """
    y = np.asarray(y, dtype=float)
    if len(w) == 1:
        return w[0] ** -s * scipy.special.zeta(s, y / w[0])
    h, rest = w[0], w[1:]
    body = direct_series(s, y[..., None] + h * np.arange(terms), rest, terms).sum(axis=-1)
    Y = y + h * terms
    tail = (
        direct_series(s - 1, Y, rest, terms) / ((s - 1) * h)
        + direct_series(s, Y, rest, terms) / 2
        + h * s * direct_series(s + 1, Y, rest, terms) / 12
    )
    return body + tail


def test_direct_series_matches_known_double_sum():
    n = np.arange(20_000)
    expected = math.fsum(scipy.special.zeta(5.0, 0.5 + n / 2).tolist())
    assert float(direct_series(5.0, 0.5, [0.5, 1.0])) == pytest.approx(expected, rel=1e-12)


def test_reduction_matches_direct_series(ctx):
    rng = random.Random(20231017)
    for _ in range(50):
        N = rng.randint(1, 3)
        x0 = R(rng.randint(1, 8), rng.randint(1, 4))
        w = [R(rng.randint(1, 3), rng.randint(1, 4)) for _ in range(N)]
        s = N + 1.5
        value = reduction.eval_decomposition(reduction.decompose(N, x0, w), s, ctx)
        expected = float(direct_series(s, float(x0), [float(wi) for wi in w]))
        assert value.real == pytest.approx(expected, rel=1e-9, abs=1e-7), (N, x0, w)
