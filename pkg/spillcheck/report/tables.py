"""Delimited-text and aligned-markdown tables for study and fit outputs."""

from __future__ import annotations

from collections.abc import Iterable
from pathlib import Path

import pandas as pd

from spillcheck.models.profiles import VARIANT_ORDER
from spillcheck.models.results import LagEffectRow, MetricsRow, ParameterSummary, StudyMetrics

_EFFECT_ORDER = ("direct", "indirect")


def _scenario_order(scenario: str) -> tuple[int, str]:
    return (int(scenario), "") if scenario.isdigit() else (10**6, scenario)


def sorted_metrics(rows: Iterable[MetricsRow]) -> list[MetricsRow]:
    """Scenario, then variant (Full, No nugget, No PS, Non-spatial), then effect and level."""
    return sorted(
        rows,
        key=lambda r: (
            _scenario_order(r.scenario),
            VARIANT_ORDER.index(r.variant),
            _EFFECT_ORDER.index(r.effect) if r.effect in _EFFECT_ORDER else len(_EFFECT_ORDER),
            r.level,
        ),
    )


def metrics_frame(metrics: StudyMetrics) -> pd.DataFrame:
    records = [
        {
            "scenario": row.scenario,
            "variant": row.variant.label,
            "effect": row.effect,
            "level": row.level,
            "bias_x100": row.bias,
            "bias_se_x100": row.bias_se,
            "coverage": row.coverage,
            "coverage_se": row.coverage_se,
            "n": row.n,
        }
        for row in sorted_metrics(metrics.rows)
    ]
    return pd.DataFrame.from_records(
        records,
        columns=[
            "scenario",
            "variant",
            "effect",
            "level",
            "bias_x100",
            "bias_se_x100",
            "coverage",
            "coverage_se",
            "n",
        ],
    )


def lag_effect_frame(rows: Iterable[LagEffectRow]) -> pd.DataFrame:
    records = []
    for row in rows:
        records.append(
            {
                "lag": row.lag,
                "variant": row.variant.label,
                "direct": row.direct.display(95, digits=1),
                "indirect": row.indirect.display(95, digits=1),
            }
        )
    return pd.DataFrame.from_records(records, columns=["lag", "variant", "direct", "indirect"])


def coefficient_frame(rows: Iterable[ParameterSummary]) -> pd.DataFrame:
    records = [
        {
            "parameter": row.name,
            "median": row.median,
            "lower95": row.lower95,
            "upper95": row.upper95,
            "significant": "*" if row.significant(95) else "",
        }
        for row in rows
    ]
    return pd.DataFrame.from_records(
        records, columns=["parameter", "median", "lower95", "upper95", "significant"]
    )


def _cell(value, digits: int) -> str:
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


def markdown_table(frame: pd.DataFrame, digits: int = 2) -> str:
    """Pipe table with every column padded to its widest cell."""
    header = [str(c) for c in frame.columns]
    body = [[_cell(v, digits) for v in row] for row in frame.itertuples(index=False)]
    widths = [max([len(h)] + [len(r[i]) for r in body]) for i, h in enumerate(header)]
    numeric = [pd.api.types.is_numeric_dtype(frame[c]) for c in frame.columns]

    def line(cells: list[str]) -> str:
        padded = [
            c.rjust(w) if num else c.ljust(w) for c, w, num in zip(cells, widths, numeric)
        ]
        return "| " + " | ".join(padded) + " |"

    rule = "|" + "|".join(
        "-" * (w + 1) + ":" if num else "-" * (w + 2) for w, num in zip(widths, numeric)
    ) + "|"
    return "\n".join([line(header), rule, *(line(r) for r in body)]) + "\n"


def write_table(frame: pd.DataFrame, stem: str | Path, digits: int = 2) -> list[Path]:
    """Write `<stem>.csv` and `<stem>.md`; returns both paths."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    csv_path, md_path = stem.with_suffix(".csv"), stem.with_suffix(".md")
    frame.to_csv(csv_path, index=False, float_format="%.6f")
    md_path.write_text(markdown_table(frame, digits), encoding="utf-8")
    return [csv_path, md_path]
