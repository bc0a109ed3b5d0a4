"""spillcheck public Python API.

One function per pipeline stage: simulate, fit, summarize, study,
ingest and sweep. The CLI is a thin wrapper around this module. Every
function that writes an artifact directory also writes its
manifest.json (command, config, seed, package versions).
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from spillcheck import package_versions
from spillcheck.config import load_config, load_design
from spillcheck.dataio import (
    DEFAULT_WEEK_ANCHOR,
    IngestResult,
    application_window_start,
    lag_sweep,
)
from spillcheck.dataio import ingest as ingest_tables
from spillcheck.diagnostics import DiagnosticWarning, check_balance, check_sampler_health
from spillcheck.effects import DEFAULT_EFFECT_SCALE, coefficient_rows
from spillcheck.effects import summarize as summarize_samples
from spillcheck.epidemic import PanelDataset, simulate_scenario
from spillcheck.inference import PosteriorSamples, get_variant
from spillcheck.inference import fit as fit_variant
from spillcheck.models.profiles import FitConfig, ModelVariant, ScenarioConfig, StudyPlan
from spillcheck.models.results import EffectSummary, LagEffectRow, RunManifest, StudyResult
from spillcheck.propensity import balance_statistics, estimate_scores
from spillcheck.report.tables import coefficient_frame, lag_effect_frame, write_table
from spillcheck.study import run_study

logger = logging.getLogger(__name__)


@dataclass
class SummaryReport:
    """A posterior summary with the chain diagnostics shown beside it."""

    summary: EffectSummary
    acceptance: dict[str, float] = field(default_factory=dict)
    clamp_count: int = 0
    warnings: list[DiagnosticWarning] = field(default_factory=list)


def _write_manifest(directory: Path, manifest: RunManifest) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "manifest.json").write_text(
        manifest.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )


def simulate(
    config: ScenarioConfig | str | Path,
    out_dir: str | Path,
    seed: int | None = None,
) -> PanelDataset:
    """Simulate one panel and write it, with its latent truth, to out_dir.

    Args:
        config: Scenario settings, or a TOML file holding them.
        out_dir: Dataset directory to create.
        seed: Overrides the config's seed.

    Returns:
        The simulated PanelDataset.

    Raises:
        FileNotFoundError: If a config path does not exist.
        ValueError: If the config is invalid.
    """
    if not isinstance(config, ScenarioConfig):
        config = load_config(config, ScenarioConfig)
    if seed is not None:
        config = config.model_copy(update={"seed": seed})
    dataset = simulate_scenario(config)
    out = dataset.save(out_dir)
    _write_manifest(
        out,
        RunManifest(
            command="simulate",
            seed=config.seed,
            config=config.model_dump(mode="json"),
            versions=package_versions(),
        ),
    )
    logger.info("Wrote simulated panel to %s", out)
    return dataset


def fit(
    dataset_dir: str | Path,
    variant: str | ModelVariant,
    config: FitConfig | str | Path | None = None,
    design: str | Path = "simulation",
    out_dir: str | Path | None = None,
) -> tuple[PosteriorSamples, list[DiagnosticWarning]]:
    """Estimate propensity scores and sample one model variant's posterior.

    Args:
        dataset_dir: A panel directory written by simulate or ingest.
        variant: Variant name or alias ("full", "no-nugget", "no-ps", "non-spatial").
        config: Sampler settings, a TOML file holding them, or None for the
            defaults with the window start moved late enough for the design's lags.
        design: Propensity design preset name or TOML file.
        out_dir: Samples directory; defaults to `<dataset_dir>/fit-<variant>`.

    Returns:
        The retained draws and the balance and chain health warnings.

    Raises:
        FileNotFoundError: If the dataset or a config file does not exist.
        KeyError: If the variant or design preset is unknown.
        ValueError: If the config, design or fit window is invalid.
        SamplerInitError: If no finite starting state is found.
    """
    model_variant = variant if isinstance(variant, ModelVariant) else get_variant(variant)
    propensity = load_design(design)
    if config is None:
        defaults = FitConfig()
        start = max(defaults.window_start, defaults.lag + propensity.max_lag + 1)
        config = defaults.model_copy(update={"window_start": start})
    elif not isinstance(config, FitConfig):
        config = load_config(config, FitConfig)

    dataset = PanelDataset.load(dataset_dir)
    scores = estimate_scores(dataset, propensity)
    warnings = check_balance(balance_statistics(dataset, scores))
    samples = fit_variant(dataset, scores, model_variant, config)
    warnings.extend(check_sampler_health(samples))

    out = Path(dataset_dir) / f"fit-{model_variant.value}" if out_dir is None else Path(out_dir)
    samples.save(out)
    scores.save(out, dataset)
    logger.info("Wrote %d draws to %s", samples.n_draws, out)
    return samples, warnings


def summarize(samples_dir: str | Path, scale: float = DEFAULT_EFFECT_SCALE) -> SummaryReport:
    """Summarise saved draws; writes summary.json and coefficients.csv/.md beside them.

    Raises:
        FileNotFoundError: If the samples directory is incomplete.
        ValueError: If fewer than two draws were retained.
    """
    src = Path(samples_dir)
    samples = PosteriorSamples.load(src)
    summary = summarize_samples(samples, scale=scale, lag=samples.config.lag)
    (src / "summary.json").write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    write_table(coefficient_frame(coefficient_rows(summary)), src / "coefficients", digits=4)
    return SummaryReport(
        summary=summary,
        acceptance=samples.acceptance,
        clamp_count=samples.clamp_count,
        warnings=check_sampler_health(samples),
    )


def study(plan: StudyPlan | str | Path) -> StudyResult:
    """Run or resume a simulation study; metrics land in plan.output_dir.

    Raises:
        FileNotFoundError: If a plan path does not exist.
        ValueError: If the plan is invalid or names an impossible grid.
        KeyError: If a scenario key is unknown.
    """
    if not isinstance(plan, StudyPlan):
        plan = load_config(plan, StudyPlan)
    out = Path(plan.output_dir)
    _write_manifest(
        out,
        RunManifest(
            command="study",
            seed=plan.base_seed,
            config=plan.model_dump(mode="json"),
            versions=package_versions(),
        ),
    )
    return run_study(plan)


def ingest(
    out_dir: str | Path,
    cases: str | Path,
    mobility: str | Path,
    covariates: str | Path,
    centroids: str | Path,
    adjacency: str | Path,
    start_date: str,
    end_date: str,
    week_anchor: str = DEFAULT_WEEK_ANCHOR,
) -> IngestResult:
    """Build a weekly county panel from the five input tables and write it to out_dir.

    Raises:
        FileNotFoundError: If an input table does not exist.
        ValueError: If a table is malformed or gaps remain after imputation.
    """
    result = ingest_tables(
        cases, mobility, covariates, centroids, adjacency, start_date, end_date, week_anchor
    )
    out = result.dataset.save(out_dir)
    _write_manifest(
        out,
        RunManifest(
            command="ingest",
            config={
                "cases": str(cases),
                "mobility": str(mobility),
                "covariates": str(covariates),
                "centroids": str(centroids),
                "adjacency": str(adjacency),
                "start_date": start_date,
                "end_date": end_date,
                "week_anchor": week_anchor,
            },
            versions=package_versions(),
            extra={
                "imputed_cells": result.imputation.filled,
                "zero_distance_pairs": len(result.imputation.zero_distance_pairs),
                "case_clamps": result.differencing.clamp_count,
                "case_clamped_total": result.differencing.clamped_total,
            },
        ),
    )
    return result


def sweep(
    dataset_dir: str | Path,
    lags: Sequence[int] = tuple(range(8)),
    variants: Sequence[str | ModelVariant] = (ModelVariant.NO_NUGGET,),
    covariates: Sequence[str] | None = None,
    iterations: int | None = None,
    seed: int = 0,
    n_jobs: int = 1,
    out_dir: str | Path | None = None,
) -> list[LagEffectRow]:
    """Fit each (lag, variant) on a county panel and tabulate the effects by lag.

    Writes lag_effects.csv/.md and a manifest to out_dir (default
    `<dataset_dir>/sweep`).

    Raises:
        FileNotFoundError: If the dataset does not exist.
        KeyError: If a variant is unknown.
        ValueError: If a lag leaves no fit window or covariates are missing.
    """
    resolved = [v if isinstance(v, ModelVariant) else get_variant(v) for v in variants]
    dataset = PanelDataset.load(dataset_dir)
    rows, _ = lag_sweep(
        dataset,
        lags=lags,
        variants=resolved,
        covariates=covariates,
        iterations=iterations,
        seed=seed,
        n_jobs=n_jobs,
    )
    out = Path(out_dir) if out_dir is not None else Path(dataset_dir) / "sweep"
    write_table(lag_effect_frame(rows), out / "lag_effects")
    _write_manifest(
        out,
        RunManifest(
            command="sweep",
            seed=seed,
            config={
                "lags": list(lags),
                "variants": [v.value for v in resolved],
                "covariates": list(covariates) if covariates is not None else None,
                "iterations": iterations,
                "window_starts": {
                    str(lag): application_window_start(lag, load_design("application"))
                    for lag in lags
                },
            },
            versions=package_versions(),
        ),
    )
    return rows
