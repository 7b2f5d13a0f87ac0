"""The `hecke-moments` command line."""

import logging
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .chars import residue_symbol
from .config import EvenSource, build_run_config, get_settings
from .errors import DomainError, HeckeMomentsError, VerificationFailure
from .gauss import KernelShape
from .gint import GInt
from .lfun import zeta_K
from .moments import density_report, moment_scan
from .products import a_k, leading_constant_4
from .reports import LinkDef, error_document, moments_document, verification_document, write_moments_csv
from .suites import Suite, SuiteOptions, VerificationRow, run_suite
from .templating import write_ratio_plot

logger = logging.getLogger(__name__)

app = typer.Typer(
    help="Central values and moments of quadratic Hecke L-functions over Z[i].",
    no_args_is_help=True,
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)


def _configure_logging(level: str) -> None:
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    root.addHandler(RichHandler(console=err_console, show_path=False, rich_tracebacks=False))
    root.setLevel(level.upper())


@contextmanager
def _exit_on_error(json_path: Path | None = None, title: str = "hecke-moments") -> Iterator[None]:
    """Turns package errors into exit codes, optionally leaving an error document."""
    try:
        yield
    except HeckeMomentsError as exc:
        code = exc.exit_code
        if json_path is not None and not isinstance(exc, VerificationFailure):
            json_path.write_text(error_document(title, code, exc).to_json(), encoding="utf-8")
        err_console.print(f"[red]error:[/red] {exc}")
        raise typer.Exit(code) from exc


def _parse_gint(text: str) -> GInt:
    try:
        return GInt.parse(text)
    except DomainError as exc:
        raise typer.BadParameter(str(exc)) from exc


def _parse_grid(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        return tuple(int(float(v)) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise typer.BadParameter(f"grid must be comma-separated numbers, got {text!r}") from exc


@app.callback()
def main(
    log_level: str | None = typer.Option(
        None, "--log-level", help="Logging level for stderr output (default: HECKE_LOG_LEVEL)."
    ),
) -> None:
    _configure_logging(log_level or get_settings().log_level)


@app.command()
def symbol(
    a: str = typer.Option(..., "--a", help="Numerator, e.g. 1+i."),
    n: str = typer.Option(..., "--n", help="Odd modulus, e.g. -1-2i."),
) -> None:
    """Print the quadratic residue symbol (a/n)."""
    numerator, modulus = _parse_gint(a), _parse_gint(n)
    with _exit_on_error():
        console.print(residue_symbol(numerator, modulus))


def _verification_table(report_rows: Sequence[VerificationRow], suite: str) -> Table:
    table = Table(title=f"verify {suite}")
    for column in ("identity", "parameters", "direct", "closed", "|diff|", "tolerance", "pass"):
        table.add_column(column, justify="left" if column in ("identity", "parameters") else "right")
    for row in report_rows:
        status = "info" if row.informational else ("[green]ok[/green]" if row.passed else "[red]FAIL[/red]")
        table.add_row(
            row.identity,
            row.parameters,
            f"{row.direct:.12g}",
            f"{row.closed:.12g}",
            f"{row.difference:.3e}",
            f"{row.tolerance:.1e}",
            status,
        )
    return table


@app.command()
def verify(
    suite: Suite = typer.Argument(..., help="Identity suite to run."),
    nmax: int | None = typer.Option(None, help="Largest modulus norm."),
    dmax: int | None = typer.Option(None, help="Largest N(d)."),
    x: float = typer.Option(50.0, "--x", help="Poisson X."),
    kmax: int | None = typer.Option(None, help="Dual-sum norm bound."),
    tolerance: float | None = typer.Option(None, help="Tolerance override."),
    kernel: str = typer.Option("bump", help="Poisson weight: bump or gaussian."),
    json_path: Path | None = typer.Option(None, "--json", help="Write the Collection+JSON report here."),
) -> None:
    """Run a verification suite and print one row per identity."""
    with _exit_on_error(json_path, f"Verify {suite.value}"):
        try:
            options = SuiteOptions(
                nmax=nmax, dmax=dmax, x=x, kmax=kmax, tolerance=tolerance,
                kernel=_kernel_shape(kernel), seed=get_settings().seed,
            )
        except ValueError as exc:
            raise DomainError(f"invalid suite options: {exc}") from exc
        report = run_suite(suite, options)
        console.print(_verification_table(report.rows, suite.value))
        if json_path is not None:
            json_path.write_text(verification_document(report).to_json(), encoding="utf-8")
        report.raise_for_failures()


def _kernel_shape(text: str) -> KernelShape:
    if text not in ("bump", "gaussian"):
        raise DomainError(f"kernel must be bump or gaussian, got {text!r}")
    return "bump" if text == "bump" else "gaussian"


def _print_constants() -> None:
    truncation = get_settings().euler_truncation
    a4 = a_k(4, truncation)
    c4 = leading_constant_4(truncation)
    table = Table(title="constants")
    for column in ("name", "value", "provenance"):
        table.add_column(column)
    table.add_row("a_4", repr(a4.real), f"primes N <= {truncation} ({a4.primes_used}), |log tail| <= {a4.log_tail_bound:.2e}")
    table.add_row("zeta_K(2)", repr(zeta_K(2).real), "mpmath zeta(2) L(2, chi_-4)")
    table.add_row("C_4", repr(c4.real), f"from a_4 at N <= {truncation}")
    console.print(table)


@app.command()
def moments(
    config: Path | None = typer.Option(None, "--config", help="Flat key=value run configuration."),
    grid: str | None = typer.Option(None, help="Comma-separated X grid."),
    xmax: int | None = typer.Option(None, help="Drop grid points above this X."),
    workers: int | None = typer.Option(None, help="Worker processes."),
    tolerance: float | None = typer.Option(None, help="AFE tail tolerance."),
    primary_only: bool | None = typer.Option(None, "--primary-only/--all-units", help="One representative per ideal."),
    even_source: str | None = typer.Option(None, help="afe2 (default) or afe1."),
    allow_stretch: bool | None = typer.Option(None, "--allow-stretch/--no-stretch", help="Allow X beyond the scan ceiling."),
    out: Path | None = typer.Option(None, help="Output directory."),
    plot: bool | None = typer.Option(None, "--plot/--no-plot", help="Write ratio_plot.gp."),
    timings: bool | None = typer.Option(None, "--timings/--no-timings", help="Fill the seconds column of moments.csv."),
    constants: bool = typer.Option(False, "--constants", help="Print a_4, zeta_K(2) and C_4 and exit."),
) -> None:
    """Scan S_1..S_4 over a grid of X and write moments.csv and moments.json."""
    with _exit_on_error():
        if constants:
            _print_constants()
            return
        run = build_run_config(
            get_settings(),
            config,
            subcommand="moments",
            grid=_parse_grid(grid),
            xmax=xmax,
            workers=workers,
            tolerance=tolerance,
            primary_only=primary_only,
            even_source=_even_source(even_source),
            allow_stretch=allow_stretch,
            out=None if out is None else str(out),
            plot=plot,
            timings=timings,
        )
        out_dir = Path(run.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        json_path = out_dir / "moments.json"
        with _exit_on_error(json_path, "Moments"):
            report = moment_scan(
                run.effective_grid(),
                ks=run.ks,
                tol=run.tolerance,
                workers=run.workers,
                primary_only=run.primary_only,
                even_source=run.even_source,
                allow_stretch=run.allow_stretch,
                cross_check_norm=run.cross_check_norm,
            )
            csv_path = write_moments_csv(report, out_dir / "moments.csv", run.timings)
            config_path = out_dir / "moments.cfg"
            config_path.write_text(run.to_key_values(), encoding="utf-8")
            artefacts = [
                LinkDef(csv_path.name, "csv", "text/csv", "Moment table"),
                LinkDef(config_path.name, "config", "text/plain", "Replay with --config"),
            ]
            if run.plot:
                plot_path = write_ratio_plot(csv_path, out_dir / "ratio_plot.gp")
                artefacts.append(LinkDef(plot_path.name, "plot", "text/x-gnuplot", "ratio4 against log X"))
            json_path.write_text(moments_document(report, run, artefacts).to_json(), encoding="utf-8")
        err_console.print(report.note)
        console.print(f"wrote {csv_path}")


def _even_source(text: str | None) -> EvenSource | None:
    if text is None:
        return None
    if text not in ("afe2", "afe1"):
        raise DomainError(f"even source must be afe2 or afe1, got {text!r}")
    return "afe2" if text == "afe2" else "afe1"


@app.command()
def density(
    x: int = typer.Option(..., "--x", help="Norm bound X."),
    primary_only: bool = typer.Option(False, "--primary-only", help="Count one representative per ideal."),
) -> None:
    """Compare the square-free count with 2 pi X / (3 zeta_K(2))."""
    with _exit_on_error():
        report = density_report(x, primary_only)
        console.print(f"count={report.count} predicted={report.predicted!r} relative_error={report.relative_error!r}")


if __name__ == "__main__":
    app()
