"""spillcheck CLI -- direct and spillover effects of interventions on epidemics.

Typer-based command-line interface. Business logic lives in
spillcheck.api; this module handles flag parsing, logging setup, error
display and report output.

    spillcheck simulate scenario.toml data/
    spillcheck fit data/ --variant full
    spillcheck summarize data/fit-full
    spillcheck study plan.toml
"""

from __future__ import annotations

import logging
from typing import NoReturn, Optional

import typer
from rich.logging import RichHandler

from spillcheck.report.formatter import print_lag_effects, print_study, print_summary

app = typer.Typer(
    name="spillcheck",
    help="Direct and spillover effects of interventions on epidemic spread.",
    add_completion=False,
    no_args_is_help=True,
)

_HANDLED = (ValueError, KeyError, FileNotFoundError, RuntimeError)


def _fail(e: Exception) -> NoReturn:
    message = e.args[0] if isinstance(e, KeyError) and e.args else e
    typer.echo(f"Error: {message}", err=True)
    raise typer.Exit(code=1)


def parse_lags(text: str) -> list[int]:
    """"0-7" or "0,2,5" (or a mix) into a sorted list of lags."""
    lags: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                low, high = (int(p) for p in part.split("-", 1))
                if high < low:
                    raise ValueError
                lags.update(range(low, high + 1))
            else:
                lags.add(int(part))
        except ValueError:
            raise ValueError(f"Invalid lag range '{part}'; expected e.g. 0-7 or 0,2,5") from None
    if not lags or min(lags) < 0:
        raise ValueError(f"Invalid lags '{text}'; lags must be nonnegative integers")
    return sorted(lags)


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
) -> None:
    """spillcheck -- direct and spillover effects of interventions on epidemic spread."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=verbose, show_path=verbose)],
        force=True,
    )


@app.command()
def simulate(
    config: str = typer.Argument(..., help="Scenario TOML file"),
    out_dir: str = typer.Argument(..., help="Dataset directory to write"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the scenario seed"),
) -> None:
    """Simulate one scenario panel with its latent truth."""
    from spillcheck.api import simulate as api_simulate

    try:
        dataset = api_simulate(config, out_dir, seed=seed)
    except _HANDLED as e:
        _fail(e)
    typer.echo(
        f"Wrote {dataset.n_regions} regions x {dataset.periods} periods to {out_dir}"
    )


@app.command()
def fit(
    dataset_dir: str = typer.Argument(..., help="Dataset directory"),
    variant: str = typer.Option(
        "full", "--variant", help="Model variant: full, no-nugget, no-ps, non-spatial"
    ),
    config: Optional[str] = typer.Option(None, "--config", "-c", help="Fit TOML file"),
    design: str = typer.Option(
        "simulation", "--design", help="Propensity design: simulation, application or a TOML file"
    ),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Samples directory"),
) -> None:
    """Estimate propensity scores and sample one variant's posterior."""
    from spillcheck.api import fit as api_fit
    from spillcheck.effects import summarize

    try:
        samples, warnings = api_fit(dataset_dir, variant, config=config, design=design, out_dir=out)
        summary = summarize(samples, lag=samples.config.lag)
    except _HANDLED as e:
        _fail(e)
    print_summary(
        summary,
        acceptance=samples.acceptance,
        clamp_count=samples.clamp_count,
        warnings=warnings,
    )


@app.command()
def summarize(
    samples_dir: str = typer.Argument(..., help="Samples directory written by fit"),
    scale: float = typer.Option(50.0, "--scale", help="Units of A per reported effect"),
) -> None:
    """Summarise saved draws: parameter intervals and percent-scale effects."""
    from spillcheck.api import summarize as api_summarize

    try:
        report = api_summarize(samples_dir, scale=scale)
    except _HANDLED as e:
        _fail(e)
    print_summary(
        report.summary,
        acceptance=report.acceptance,
        clamp_count=report.clamp_count,
        warnings=report.warnings,
    )


@app.command()
def study(
    plan: str = typer.Argument(..., help="Study plan TOML file"),
) -> None:
    """Run (or resume) a simulation study and report bias and coverage."""
    from spillcheck.api import study as api_study
    from spillcheck.study import MAX_FAILED_FRACTION

    try:
        result = api_study(plan)
    except _HANDLED as e:
        _fail(e)
    print_study(result)
    if result.failed_fraction > MAX_FAILED_FRACTION:
        typer.echo(
            f"Error: {len(result.failed)} of {len(result.records)} runs failed",
            err=True,
        )
        raise typer.Exit(code=2)


@app.command()
def ingest(
    out_dir: str = typer.Argument(..., help="Dataset directory to write"),
    cases: str = typer.Option(..., "--cases", help="Cumulative cases CSV"),
    mobility: str = typer.Option(..., "--mobility", help="Daily mobility CSV"),
    covariates: str = typer.Option(..., "--covariates", help="County covariates CSV"),
    centroids: str = typer.Option(..., "--centroids", help="County centroids CSV"),
    adjacency: str = typer.Option(..., "--adjacency", help="County adjacency CSV"),
    start_date: str = typer.Option(..., "--start-date", help="First day, YYYY-MM-DD"),
    end_date: str = typer.Option(..., "--end-date", help="Last day, YYYY-MM-DD"),
    week_anchor: str = typer.Option(
        "2020-03-06", "--week-anchor", help="Any first day of a week, YYYY-MM-DD"
    ),
) -> None:
    """Build a weekly county panel from case, mobility and covariate tables."""
    from spillcheck.api import ingest as api_ingest

    try:
        result = api_ingest(
            out_dir,
            cases=cases,
            mobility=mobility,
            covariates=covariates,
            centroids=centroids,
            adjacency=adjacency,
            start_date=start_date,
            end_date=end_date,
            week_anchor=week_anchor,
        )
    except _HANDLED as e:
        _fail(e)
    ds = result.dataset
    typer.echo(
        f"Wrote {ds.n_regions} counties x {ds.periods} weeks to {out_dir} "
        f"({result.imputation.filled} county-days imputed, "
        f"{result.differencing.clamp_count} case corrections clamped)"
    )


@app.command()
def sweep(
    dataset_dir: str = typer.Argument(..., help="County panel directory"),
    lags: str = typer.Option("0-7", "--lags", help="Lags to fit, e.g. 0-7 or 0,2,5"),
    variant: list[str] = typer.Option(
        ["no-nugget"], "--variant", help="Model variant (repeatable)"
    ),
    covariate: Optional[list[str]] = typer.Option(
        None, "--covariate", help="Covariate to keep (repeatable); default all"
    ),
    iterations: Optional[int] = typer.Option(
        None, "--iterations", help="Iterations per fit (burn-in one fifth)"
    ),
    seed: int = typer.Option(0, "--seed", help="Base seed"),
    jobs: int = typer.Option(1, "--jobs", "-j", help="Parallel fits"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Output directory"),
) -> None:
    """Fit each lag on a county panel and tabulate direct and indirect effects."""
    from spillcheck.api import sweep as api_sweep

    try:
        rows = api_sweep(
            dataset_dir,
            lags=parse_lags(lags),
            variants=variant,
            covariates=covariate or None,
            iterations=iterations,
            seed=seed,
            n_jobs=jobs,
            out_dir=out,
        )
    except _HANDLED as e:
        _fail(e)
    print_lag_effects(rows)


if __name__ == "__main__":
    app()
