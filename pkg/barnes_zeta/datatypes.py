from __future__ import annotations

import enum
from typing import NamedTuple, Sequence, Tuple, Union

import pydantic
import sympy

import barnes_zeta.context

PeriodVector = Tuple[sympy.Rational, ...]

# exact (Rational), symbolic-x (sympy expression) or float lane
Coefficient = Union[sympy.Expr, float]


def period_vector(values: Sequence[int | str | float | sympy.Rational]) -> PeriodVector:
    """
    Normalizes periods into reduced positive rationals.

    >>> period_vector([1, "1/2", sympy.Rational(2, 6)])
    (1, 1/2, 1/3)
    """
    periods = tuple(sympy.Rational(value) for value in values)
    if len(periods) == 0:
        raise ValueError("period vector must not be empty")
    for i, period in enumerate(periods):
        if period <= 0:
            raise ValueError(f"period w{i + 1}={period} must be positive")
    return periods


class HurwitzTerm(NamedTuple):
    """One summand coeff * zeta(s - k, y) of a decomposition."""

    k: int
    y: Coefficient
    coeff: Coefficient


class HurwitzDecomposition(NamedTuple):
    """
    zeta_N(s, x | w_1..w_N) = w^{-s} * sum(coeff * zeta(s - k, y)), with 1/(N-1)! folded into coeff.
    """

    N: int
    w: sympy.Rational
    terms: tuple[HurwitzTerm, ...]

    @property
    def max_shift(self) -> int:
        return max((term.k for term in self.terms), default=0)

    def distinct_arguments(self) -> list[Coefficient]:
        seen: dict = {}
        for term in self.terms:
            seen.setdefault(term.y, None)
        return list(seen)


class FracDecomp(NamedTuple):
    """y = Y + u/v with Y >= 0 and 1 <= u <= v."""

    Y: int
    u: int
    v: int

    @property
    def fraction(self) -> sympy.Rational:
        return sympy.Rational(self.u, self.v)


class RationalModel(pydantic.BaseModel):
    """
    Wire form of an exact rational; numerator and denominator are decimal strings.

    >>> RationalModel.from_rational(sympy.Rational(-1, 3)).model_dump_json()
    '{"num":"-1","den":"3"}'
    >>> RationalModel(num="4", den="6").to_rational()
    2/3
    """

    num: str
    den: str

    @classmethod
    def from_rational(cls, value: sympy.Rational) -> RationalModel:
        value = sympy.Rational(value)
        return cls(num=str(value.p), den=str(value.q))

    def to_rational(self) -> sympy.Rational:
        return sympy.Rational(int(self.num), int(self.den))


# exact rational, float lane, or a sympy string for symbolic x
WireNumber = Union[RationalModel, float, str]


def _to_wire(value: Coefficient) -> WireNumber:
    if isinstance(value, (float, int)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, sympy.Rational):
        return RationalModel.from_rational(value)
    return sympy.sstr(value)


def _from_wire(value: WireNumber) -> Coefficient:
    if isinstance(value, RationalModel):
        return value.to_rational()
    if isinstance(value, str):
        return sympy.sympify(value, locals={"x": sympy.Symbol("x")})
    return float(value)


class TermModel(pydantic.BaseModel):
    k: int
    y: WireNumber
    coeff: WireNumber


class DecompositionModel(pydantic.BaseModel):
    """
    JSON wire format of a HurwitzDecomposition.

    >>> d = HurwitzDecomposition(1, sympy.Integer(1), (HurwitzTerm(0, sympy.Rational(1, 2), sympy.Integer(1)),))
    >>> DecompositionModel.from_decomposition(d).model_dump_json()
    '{"N":1,"w":{"num":"1","den":"1"},"terms":[{"k":0,"y":{"num":"1","den":"2"},"coeff":{"num":"1","den":"1"}}]}'
    """

    N: int
    w: RationalModel
    terms: list[TermModel]

    @classmethod
    def from_decomposition(cls, decomposition: HurwitzDecomposition) -> DecompositionModel:
        return cls(
            N=decomposition.N,
            w=RationalModel.from_rational(decomposition.w),
            terms=[
                TermModel(k=term.k, y=_to_wire(term.y), coeff=_to_wire(term.coeff))
                for term in decomposition.terms
            ],
        )

    def to_decomposition(self) -> HurwitzDecomposition:
        terms = tuple(
            HurwitzTerm(term.k, _from_wire(term.y), _from_wire(term.coeff)) for term in self.terms
        )
        return HurwitzDecomposition(self.N, self.w.to_rational(), terms)


class OutputFormat(str, enum.Enum):
    json = "json"
    csv = "csv"
    text = "text"


class CliConfig(pydantic.BaseModel):
    """
    Options shared by every subcommand.

    >>> CliConfig(tolerance=1e-8).to_context().target_tol
    1e-08
    """

    model_config = pydantic.ConfigDict(frozen=True)

    tolerance: float = pydantic.Field(default=1e-10, gt=0)
    em_terms: int = pydantic.Field(default=40, ge=1)
    em_order: int = pydantic.Field(default=15, ge=1, le=60)
    fourier_terms: int = pydantic.Field(default=1_000_000, ge=1)
    max_den: int = pydantic.Field(default=10**6, ge=1)
    output_format: OutputFormat = OutputFormat.text
    n_jobs: int = 1

    def to_context(self) -> barnes_zeta.context.EvalContext:
        return barnes_zeta.context.EvalContext(
            em_terms=self.em_terms,
            em_order=self.em_order,
            fourier_terms=self.fourier_terms,
            target_tol=self.tolerance,
            max_den=self.max_den,
            n_jobs=self.n_jobs,
        )


class ZeroReport(pydantic.BaseModel):
    s_root: float
    residual: float
    bracket: Tuple[float, float]
    iterations: int


class KummerReport(pydantic.BaseModel):
    N: int
    x: float
    terms: int
    lhs: float
    rhs: float
    tail_bound: float
    defect: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.defect <= self.tail_bound + self.tolerance
