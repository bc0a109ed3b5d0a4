"""Rich terminal rendering for fit summaries, lag sweeps and study metrics."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from io import StringIO

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from spillcheck.diagnostics import DiagnosticWarning
from spillcheck.models.results import EffectSummary, LagEffectRow, StudyResult
from spillcheck.report.tables import sorted_metrics

_SEVERITY_STYLE = {"info": "dim", "warn": "yellow", "critical": "bold red"}


def _capture(render: Callable[[Console], None], width: int | None) -> str:
    buf = StringIO()
    console = Console(file=buf, width=width or 90, force_terminal=True)
    render(console)
    return buf.getvalue()


def format_summary(
    summary: EffectSummary,
    *,
    acceptance: dict[str, float] | None = None,
    clamp_count: int = 0,
    warnings: Sequence[DiagnosticWarning] = (),
    width: int | None = None,
) -> str:
    """Render a posterior summary to a string of Rich-formatted terminal output."""
    return _capture(
        lambda c: _render_summary(c, summary, acceptance or {}, clamp_count, warnings), width
    )


def print_summary(
    summary: EffectSummary,
    *,
    acceptance: dict[str, float] | None = None,
    clamp_count: int = 0,
    warnings: Sequence[DiagnosticWarning] = (),
) -> None:
    console = Console(width=90)
    _render_summary(console, summary, acceptance or {}, clamp_count, warnings)


def format_lag_effects(rows: Sequence[LagEffectRow], *, width: int | None = None) -> str:
    return _capture(lambda c: _render_lag_effects(c, rows), width)


def print_lag_effects(rows: Sequence[LagEffectRow]) -> None:
    _render_lag_effects(Console(width=90), rows)


def format_study(result: StudyResult, *, width: int | None = None) -> str:
    return _capture(lambda c: _render_study(c, result), width)


def print_study(result: StudyResult) -> None:
    _render_study(Console(width=90), result)


# --- Section Renderers ---


def _render_header(console: Console, title: str) -> None:
    console.print()
    console.print(Panel(Text(title, style="bold cyan"), expand=False, border_style="dim"))
    console.print()


def _render_summary(
    console: Console,
    summary: EffectSummary,
    acceptance: dict[str, float],
    clamp_count: int,
    warnings: Sequence[DiagnosticWarning],
) -> None:
    _render_header(console, "spillcheck fit")
    _render_run(console, summary)
    _render_effects(console, summary)
    _render_parameters(console, summary)
    _render_acceptance(console, acceptance, clamp_count)
    _render_risks(console, warnings)


def _render_run(console: Console, summary: EffectSummary) -> None:
    console.print(Text("Run", style="bold"))
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column(style="dim", min_width=14)
    table.add_column()
    if summary.variant is not None:
        table.add_row("Variant", summary.variant.label)
    if summary.lag is not None:
        table.add_row("Lag", f"{summary.lag} weeks")
    table.add_row("Draws", f"{summary.n_draws:,}")
    table.add_row("Effect scale", f"{summary.scale:g}")
    console.print(table)
    console.print()


def _render_effects(console: Console, summary: EffectSummary) -> None:
    if not summary.effects:
        return
    console.print(Text("Effects", style="bold green"))
    console.print(
        Text(
            f"  Percent change in the infection rate per {summary.scale:g}-unit "
            f"increase, median (95% interval)",
            style="dim",
        )
    )
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column(style="dim", min_width=14)
    table.add_column(justify="right")
    labels = {"delta1": "Direct", "delta2": "Indirect"}
    for name, stats in summary.effects.items():
        table.add_row(labels.get(name, name), stats.display(95, digits=1))
    console.print(table)
    console.print()


def _render_parameters(console: Console, summary: EffectSummary) -> None:
    console.print(Text("Parameters", style="bold"))
    table = Table(box=None, padding=(0, 2))
    table.add_column("Name", style="dim", min_width=18)
    table.add_column("Median", justify="right")
    table.add_column("95% interval", justify="right")
    table.add_column("", min_width=1)
    for stats in summary.parameters.values():
        table.add_row(
            stats.name,
            f"{stats.median:.4f}",
            f"({stats.lower95:.4f}, {stats.upper95:.4f})",
            Text("*", style="bold") if stats.significant(95) else "",
        )
    console.print(table)
    console.print()


def _render_acceptance(console: Console, acceptance: dict[str, float], clamp_count: int) -> None:
    if not acceptance and not clamp_count:
        return
    console.print(Text("Sampler", style="bold"))
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column(style="dim", min_width=14)
    table.add_column(justify="right")
    for name, rate in acceptance.items():
        table.add_row(f"accept {name}", f"{rate:.2f}")
    style = "yellow" if clamp_count else ""
    table.add_row("Clamp events", Text(str(clamp_count), style=style))
    console.print(table)
    console.print()


def _render_risks(console: Console, warnings: Sequence[DiagnosticWarning]) -> None:
    if not warnings:
        return
    console.print(Text("Risks", style="bold red"))
    for w in warnings:
        console.print(Text(f"  - [{w.category}] {w.message}", style=_SEVERITY_STYLE[w.severity]))
    console.print()


def _render_lag_effects(console: Console, rows: Sequence[LagEffectRow]) -> None:
    _render_header(console, "spillcheck sweep")
    table = Table(box=None, padding=(0, 2))
    table.add_column("Lag", justify="right")
    table.add_column("Variant", style="dim", min_width=12)
    table.add_column("Direct (%)", justify="right")
    table.add_column("Indirect (%)", justify="right")
    for row in rows:
        table.add_row(
            str(row.lag),
            row.variant.label,
            row.direct.display(95, digits=1),
            row.indirect.display(95, digits=1),
        )
    console.print(table)
    console.print()


def _render_study(console: Console, result: StudyResult) -> None:
    _render_header(console, "spillcheck study")
    n_runs = len(result.records)
    n_failed = len(result.failed)
    console.print(Text(f"  {n_runs} runs, {n_failed} failed", style="dim"))
    console.print()

    table = Table(box=None, padding=(0, 2))
    table.add_column("Scenario", justify="right")
    table.add_column("Variant", style="dim", min_width=12)
    table.add_column("Effect")
    table.add_column("Level", justify="right")
    table.add_column("Bias x100", justify="right")
    table.add_column("Coverage", justify="right")
    table.add_column("n", justify="right")
    for row in sorted_metrics(result.metrics.rows):
        table.add_row(
            row.scenario,
            row.variant.label,
            row.effect,
            f"{row.level}%",
            f"{row.bias:.2f} ({row.bias_se:.2f})",
            f"{row.coverage:.0f} ({row.coverage_se:.1f})",
            str(row.n),
        )
    console.print(table)
    console.print()

    if n_failed:
        console.print(Text("Risks", style="bold red"))
        for record in result.failed:
            console.print(
                Text(
                    f"  - scenario {record.scenario} replicate {record.replicate} "
                    f"{record.variant.label}: {record.error}"
                )
            )
        console.print()
