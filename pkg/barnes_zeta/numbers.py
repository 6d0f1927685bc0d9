from __future__ import annotations

import sympy
from sympy.ntheory.continued_fraction import continued_fraction_convergents, continued_fraction_iterator

from barnes_zeta.errors import ApproximationError

BigRational = sympy.Rational


def best_convergent(value: float | sympy.Rational, max_den: int) -> sympy.Rational:
    """
    Last continued-fraction convergent of `value` whose denominator does not exceed `max_den`.
    Floats are expanded from their exact binary value, so the expansion always terminates.
    Semiconvergents are skipped: for pi and max_den=100 this gives 22/7, not the closer 311/99.

    >>> best_convergent(0.5, 10)
    1/2
    >>> best_convergent(3.14159265358979, 100)
    22/7
    >>> best_convergent(3.14159265358979, 120)
    355/113
    """
    if max_den < 1:
        raise ValueError(f"max_den must be a positive integer, got {max_den}")
    exact = sympy.Rational(value)
    best = sympy.Integer(0)
    for convergent in continued_fraction_convergents(continued_fraction_iterator(exact)):
        if convergent.q > max_den:
            break
        best = convergent
    return sympy.Rational(best)


def rationalize_positive(value: float | sympy.Rational, max_den: int, name: str = "value") -> sympy.Rational:
    rational = best_convergent(value, max_den)
    if rational <= 0:
        raise ApproximationError(
            f"{name}={value!r} has no positive convergent with denominator <= {max_den}"
        )
    return rational


def parse_rational(text: str, max_den: int) -> sympy.Rational:
    """
    Accepts "a/b", integers and decimals. Decimals are read exactly and then
    rationalized with denominators bounded by `max_den`.

    >>> parse_rational("1/3", 10**6)
    1/3
    >>> parse_rational(" 0.25 ", 10**6)
    1/4
    >>> parse_rational("2/4", 10)
    1/2
    """
    text = text.strip()
    if text == "":
        raise ValueError("empty number")
    if "/" in text:
        num, den = text.split("/", 1)
        try:
            numerator = int(num.strip())
            denominator = int(den.strip())
        except ValueError as e:
            raise ValueError(f"malformed fraction {text!r}") from e
        if denominator == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return sympy.Rational(numerator, denominator)
    try:
        exact = sympy.Rational(text)
    except (TypeError, ValueError, sympy.SympifyError) as e:
        raise ValueError(f"malformed number {text!r}") from e
    if exact.q <= max_den:
        return exact
    return best_convergent(exact, max_den)


def parse_rational_list(text: str, max_den: int) -> list[sympy.Rational]:
    """
    >>> parse_rational_list("1, 1/2,1/3", 100)
    [1, 1/2, 1/3]
    """
    return [parse_rational(part, max_den) for part in text.split(",") if part.strip() != ""]


def parse_complex(text: str) -> complex:
    """
    >>> parse_complex("2+3i")
    (2+3j)
    >>> parse_complex("0.5")
    (0.5+0j)
    """
    text = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(text)
    except ValueError as e:
        raise ValueError(f"malformed complex number {text!r}") from e


def format_float(x: float) -> str:
    """
    Lossless decimal form with 17 significant digits.

    >>> format_float(0.1)
    '0.10000000000000001'
    >>> format_float(-0.5)
    '-0.5'
    """
    return f"{float(x):.17g}"


def format_complex(z: complex) -> str:
    """
    >>> format_complex(complex(0.25, 0.0))
    '0.25'
    >>> format_complex(complex(1, -2))
    '1-2j'
    """
    if z.imag == 0:
        return format_float(z.real)
    sign = "-" if z.imag < 0 else "+"
    return f"{format_float(z.real)}{sign}{format_float(abs(z.imag))}j"


def format_rational(x: sympy.Rational) -> str:
    """
    >>> format_rational(sympy.Rational(-691, 2730))
    '-691/2730'
    >>> format_rational(sympy.Integer(3))
    '3'
    """
    x = sympy.Rational(x)
    if x.q == 1:
        return str(x.p)
    return f"{x.p}/{x.q}"
