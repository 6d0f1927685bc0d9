from __future__ import annotations

import contextlib
import enum
import json
import pathlib
from typing import Any, Iterator, List, Optional

import click
import polars as pl
import pydantic
import sympy
import typer
from rich.console import Console
from rich.table import Table

import barnes_zeta.exact
import barnes_zeta.hurwitz
import barnes_zeta.multigamma
import barnes_zeta.numbers
import barnes_zeta.reduction
import barnes_zeta.special_values
from barnes_zeta.context import EvalContext
from barnes_zeta.datatypes import CliConfig, OutputFormat
from barnes_zeta.errors import (
    ApproximationError,
    CapExceededError,
    ConvergenceError,
    NoSignChange,
    PoleError,
)

app = typer.Typer(add_completion=False, no_args_is_help=True, help="Barnes multiple zeta functions.")
err_console = Console(stderr=True)

EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3


class GridKind(str, enum.Enum):
    zeta2_surface = "zeta2_surface"
    zeta2_at0 = "zeta2_at0"
    zeta2_deriv_at0 = "zeta2_deriv_at0"
    zeta3_surface = "zeta3_surface"


class GridRoute(str, enum.Enum):
    auto = "auto"
    exact = "exact"
    em = "em"
    closed_form = "closed-form"


# (first axis, second axis, default steps) per grid kind
GRID_DEFAULTS = {
    GridKind.zeta2_surface: ((-2.0, 1.0), (0.0, 1.0), 50),
    GridKind.zeta2_at0: ((0.0, 1.0), (0.0, 1.0), 25),
    GridKind.zeta2_deriv_at0: ((0.0, 1.0), (0.0, 1.0), 25),
    GridKind.zeta3_surface: ((-2.0, 1.0), (0.0, 1.0), 50),
}


@contextlib.contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except ConvergenceError as e:
        err_console.print(f"[red]convergence failure:[/red] {e}", highlight=False)
        raise typer.Exit(EXIT_CONVERGENCE)
    except (PoleError, NoSignChange, ApproximationError, CapExceededError) as e:
        err_console.print(f"[red]error:[/red] {e}", highlight=False)
        raise typer.Exit(EXIT_DOMAIN)
    except ValueError as e:
        err_console.print(f"[red]invalid input:[/red] {e}", highlight=False)
        raise typer.Exit(EXIT_USAGE)


@contextlib.contextmanager
def _session(config: CliConfig) -> Iterator[EvalContext]:
    """Evaluation context with the persistent Stieltjes cache loaded and saved around the command."""
    ctx = config.to_context()
    ctx.load_stieltjes_cache()
    try:
        yield ctx
    finally:
        ctx.save_stieltjes_cache()


def _config(tol: float, terms: int, max_den: int, output_format: OutputFormat, n_jobs: int = 1) -> CliConfig:
    try:
        return CliConfig(
            tolerance=tol, em_terms=terms, max_den=max_den, output_format=output_format, n_jobs=n_jobs
        )
    except pydantic.ValidationError as e:
        err_console.print(f"[red]invalid option:[/red] {e}", highlight=False)
        raise typer.Exit(EXIT_USAGE)


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return barnes_zeta.numbers.format_float(value)
    if isinstance(value, complex):
        return barnes_zeta.numbers.format_complex(value)
    if isinstance(value, sympy.Rational):
        return barnes_zeta.numbers.format_rational(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, sympy.Rational):
        return barnes_zeta.numbers.format_rational(value)
    if isinstance(value, sympy.Expr):
        return sympy.sstr(value)
    return value


def _write(text: str, out: Optional[pathlib.Path]) -> None:
    if out is None:
        typer.echo(text, nl=not text.endswith("\n"))
    else:
        out.write_text(text)


def _emit(records: List[dict], output_format: OutputFormat, out: Optional[pathlib.Path], title: str) -> None:
    if output_format == OutputFormat.json:
        payload = [{key: _json_value(value) for key, value in record.items()} for record in records]
        _write(json.dumps(payload[0] if len(payload) == 1 else payload), out)
    elif output_format == OutputFormat.csv:
        frame = pl.DataFrame([{key: _cell(value) for key, value in record.items()} for record in records])
        _write(frame.write_csv(), out)
    else:
        table = Table(title=title)
        for key in records[0]:
            table.add_column(key)
        for record in records:
            table.add_row(*(_cell(value) for value in record.values()))
        if out is None:
            Console().print(table)
        else:
            with out.open("w") as handle:
                Console(file=handle, width=120).print(table)


def _parse_x(text: str, max_den: int, allow_symbol: bool = False) -> sympy.Expr:
    if text.strip() == "sym":
        if not allow_symbol:
            raise ValueError("a symbolic x is only supported by `reduce`")
        return barnes_zeta.reduction.X_SYMBOL
    x = barnes_zeta.numbers.parse_rational(text, max_den)
    if x <= 0:
        raise ValueError(f"x must be positive, got {text}")
    return x


def _parse_periods(text: str, N: int, max_den: int) -> list[sympy.Rational]:
    periods = barnes_zeta.numbers.parse_rational_list(text, max_den)
    if len(periods) != N:
        raise ValueError(f"expected {N} periods in -w, got {len(periods)}")
    return periods


N_OPTION = typer.Option(..., "-N", help="Order N of the zeta function.")
X_OPTION = typer.Option(..., "-x", help="Shift x as a/b or decimal ('sym' for symbolic in reduce).")
W_OPTION = typer.Option(None, "-w", help="Comma-separated periods; defaults to all ones.")
TOL_OPTION = typer.Option(1e-10, "--tol", help="Target tolerance.")
TERMS_OPTION = typer.Option(40, "--terms", help="Euler-Maclaurin direct terms.")
MAX_DEN_OPTION = typer.Option(10**6, "--max-den", help="Largest denominator when rationalizing decimals.")
FORMAT_OPTION = typer.Option(OutputFormat.text, "--format", help="Output format.")
OUT_OPTION = typer.Option(None, "--out", help="Write the result to FILE instead of stdout.")


def _periods_or_ones(w: Optional[str], N: int, max_den: int) -> list[sympy.Rational]:
    if w is None:
        return [sympy.Integer(1)] * N
    return _parse_periods(w, N, max_den)


@app.command()
def reduce(
    N: int = N_OPTION,
    x: str = X_OPTION,
    w: Optional[str] = W_OPTION,
    max_den: int = MAX_DEN_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    out: Optional[pathlib.Path] = OUT_OPTION,
) -> None:
    """Expands zeta_N(s, x | w) into Hurwitz zeta functions."""
    with _exit_codes():
        x_value = _parse_x(x, max_den, allow_symbol=True)
        decomposition = barnes_zeta.reduction.decompose(N, x_value, _periods_or_ones(w, N, max_den))
        if output_format == OutputFormat.json:
            _write(barnes_zeta.reduction.to_json(decomposition), out)
        elif output_format == OutputFormat.csv:
            records = [{"k": t.k, "y": t.y, "coeff": t.coeff} for t in decomposition.terms]
            frame = pl.DataFrame([{key: _cell(value) for key, value in r.items()} for r in records])
            _write(frame.write_csv(), out)
        else:
            _write(barnes_zeta.reduction.render(decomposition), out)


@app.command(name="eval")
def evaluate(
    N: int = N_OPTION,
    s: str = typer.Option(..., "-s", help="Complex argument, e.g. 0.5 or 2+3i."),
    x: str = X_OPTION,
    w: Optional[str] = W_OPTION,
    tol: float = TOL_OPTION,
    terms: int = TERMS_OPTION,
    max_den: int = MAX_DEN_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    out: Optional[pathlib.Path] = OUT_OPTION,
) -> None:
    """Evaluates zeta_N(s, x | w); the error estimate compares against doubled Euler-Maclaurin orders."""
    config = _config(tol, terms, max_den, output_format)
    with _exit_codes(), _session(config) as ctx:
        s_value = barnes_zeta.numbers.parse_complex(s)
        decomposition = barnes_zeta.reduction.decompose(
            N, _parse_x(x, max_den), _periods_or_ones(w, N, max_den)
        )
        value = barnes_zeta.reduction.eval_decomposition(decomposition, s_value, ctx)
        doubled = {"em_terms": 2 * ctx.em_terms, "em_order": min(60, 2 * ctx.em_order)}
        finer = ctx.model_copy(update=doubled)
        error = abs(value - barnes_zeta.reduction.eval_decomposition(decomposition, s_value, finer))
        _emit([{"value": value, "error": error}], output_format, out, title=f"zeta_{N}({s}, {x})")


@app.command()
def deriv(
    N: int = N_OPTION,
    n: int = typer.Option(0, "-n", help="Derivative order."),
    ell: int = typer.Option(0, "-l", help="Evaluate at s = -ell."),
    x: str = X_OPTION,
    w: Optional[str] = W_OPTION,
    tol: float = TOL_OPTION,
    terms: int = TERMS_OPTION,
    max_den: int = MAX_DEN_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    out: Optional[pathlib.Path] = OUT_OPTION,
) -> None:
    """n-th derivative of zeta_N at s = -ell in closed form; n = 0 also prints the exact rational."""
    config = _config(tol, terms, max_den, output_format)
    with _exit_codes(), _session(config) as ctx:
        x_value = _parse_x(x, max_den)
        periods = _periods_or_ones(w, N, max_den)
        record: dict = {
            "value": barnes_zeta.special_values.barnes_deriv_nonpos(n, ell, N, x_value, periods, ctx)
        }
        if n == 0:
            record["exact"] = barnes_zeta.exact.barnes_value_nonpos(N, ell, x_value, periods)
        _emit([record], output_format, out, title=f"zeta_{N}^({n})(-{ell}, {x})")


@app.command(name="find-zero")
def find_zero(
    N: int = N_OPTION,
    x: str = X_OPTION,
    w: Optional[str] = W_OPTION,
    lo: float = typer.Option(..., "--lo", help="Left end of the real bracket."),
    hi: float = typer.Option(..., "--hi", help="Right end of the real bracket."),
    tol: float = TOL_OPTION,
    terms: int = TERMS_OPTION,
    max_den: int = MAX_DEN_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    out: Optional[pathlib.Path] = OUT_OPTION,
) -> None:
    """Real zero of zeta_N(s, x | w) inside [lo, hi]."""
    config = _config(tol, terms, max_den, output_format)
    with _exit_codes(), _session(config) as ctx:
        report = barnes_zeta.reduction.find_zero(
            N, _parse_x(x, max_den), _periods_or_ones(w, N, max_den), (lo, hi), ctx
        )
        if output_format == OutputFormat.json:
            _write(report.model_dump_json(), out)
        else:
            record = {
                "s_root": report.s_root,
                "residual": report.residual,
                "lo": report.bracket[0],
                "hi": report.bracket[1],
                "iterations": report.iterations,
            }
            _emit([record], output_format, out, title="zero")


def _parse_range(text: Optional[str], default: tuple[float, float]) -> tuple[float, float]:
    if text is None:
        return default
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"a range is 'lo,hi', got {text!r}")
    return float(parts[0]), float(parts[1])


@app.command()
def grid(
    kind: GridKind = typer.Argument(..., help="Which grid to emit."),
    x: str = typer.Option("1/10", "-x", help="Shift x for the zeta2_at0 grids."),
    steps: Optional[int] = typer.Option(None, "--steps", help="Nodes per axis."),
    first: Optional[str] = typer.Option(None, "--range1", help="First axis range 'lo,hi' (s or w1)."),
    second: Optional[str] = typer.Option(None, "--range2", help="Second axis range 'lo,hi' (x or w2)."),
    route: GridRoute = typer.Option(GridRoute.auto, "--route", help="Evaluation route for zeta2_at0 grids."),
    grid_max_den: int = typer.Option(100, "--grid-max-den", help="Denominator bound for grid nodes."),
    n_jobs: int = typer.Option(1, "--n-jobs", help="Worker threads."),
    tol: float = TOL_OPTION,
    terms: int = TERMS_OPTION,
    max_den: int = MAX_DEN_OPTION,
    output_format: OutputFormat = typer.Option(OutputFormat.csv, "--format", help="Output format."),
    out: Optional[pathlib.Path] = OUT_OPTION,
) -> None:
    """
    Value grids: zeta_2/zeta_3 surfaces over (s, x) and zeta_2(0) or zeta_2'(0) over (w1, w2).

    The zeta2_deriv_at0 em route expands every node over its own lattice. With
    --grid-max-den 100 a node like (49/50, 47/50) has thousands of Hurwitz terms and takes
    seconds, so a full 25 x 25 grid runs for minutes. Spread it with --n-jobs, or lower
    --grid-max-den for a quick look.
    """
    config = _config(tol, terms, max_den, output_format, n_jobs)
    first_default, second_default, default_steps = GRID_DEFAULTS[kind]
    with _exit_codes(), _session(config) as ctx:
        first_range = _parse_range(first, first_default)
        second_range = _parse_range(second, second_default)
        steps = default_steps if steps is None else steps
        if kind in (GridKind.zeta2_surface, GridKind.zeta3_surface):
            N = 2 if kind == GridKind.zeta2_surface else 3
            periods = [sympy.Rational(1, i) for i in range(1, N + 1)]
            rows = barnes_zeta.special_values.barnes_zeta_surface(
                N, periods, first_range, second_range, steps, ctx
            )
            columns = ("s", "x", "value")
        else:
            n = 0 if kind == GridKind.zeta2_at0 else 1
            rows = barnes_zeta.special_values.barnes_zeta0_grid(
                _parse_x(x, max_den), first_range, second_range, steps, n, ctx, grid_max_den, route.value
            )
            columns = ("w1", "w2", "value")
        records = [dict(zip(columns, row)) for row in rows]
        _emit(records, output_format, out, title=kind.value)


@app.command(name="kummer-check")
def kummer_check(
    N: int = N_OPTION,
    x: str = X_OPTION,
    terms: int = typer.Option(10**6, "--terms", help="Fourier terms."),
    allow_n1: bool = typer.Option(False, "--allow-n1", help="Permit the N=1 series."),
    tol: float = typer.Option(1e-8, "--tol", help="Slack added to the tail bound."),
    max_den: int = MAX_DEN_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    out: Optional[pathlib.Path] = OUT_OPTION,
) -> None:
    """Compares both sides of the Kummer-type formula; exits 0 iff the defect is within the tail bound."""
    config = _config(tol, 40, max_den, output_format)
    with _exit_codes(), _session(config) as ctx:
        if N == 1 and not allow_n1:
            raise ValueError("N=1 converges only conditionally; pass --allow-n1 to run it")
        ctx = ctx.model_copy(update={"fourier_terms": terms})
        report = barnes_zeta.multigamma.kummer_check(N, _parse_x(x, max_den), ctx, tolerance=tol)
        if output_format == OutputFormat.json:
            _write(report.model_dump_json(), out)
        else:
            record = report.model_dump()
            record["passed"] = report.passed
            _emit([record], output_format, out, title="kummer check")
        if not report.passed:
            raise ConvergenceError(
                f"defect {report.defect:.3g} exceeds the tail bound {report.tail_bound:.3g} + {tol:.3g}"
            )


@app.command()
def stieltjes(
    n_max: int = typer.Option(0, "-n", help="Largest index n of gamma_n(x)."),
    x: str = typer.Option("1", "-x", help="Argument in (0, 1]."),
    max_den: int = MAX_DEN_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    out: Optional[pathlib.Path] = OUT_OPTION,
) -> None:
    """Generalized Stieltjes constants gamma_0(x) .. gamma_n(x)."""
    config = _config(1e-10, 40, max_den, output_format)
    with _exit_codes(), _session(config) as ctx:
        if not 0 <= n_max <= 10:
            raise ValueError(f"-n must lie in 0..10, got {n_max}")
        x_value = _parse_x(x, max_den)
        records = [
            {"n": n, "gamma": barnes_zeta.hurwitz.stieltjes(n, x_value, ctx)} for n in range(n_max + 1)
        ]
        _emit(records, output_format, out, title=f"Stieltjes constants at x={x}")


def main(argv: Optional[List[str]] = None) -> int:
    """Console entry point; usage errors exit with 1 instead of click's 2."""
    command = typer.main.get_command(app)
    try:
        result = command.main(args=argv, prog_name="barnes-zeta", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    return result if isinstance(result, int) else 0
