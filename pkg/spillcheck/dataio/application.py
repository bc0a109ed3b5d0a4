"""County panel ingestion and the fitting setup for real-data runs.

Input tables are comma-separated with a header row:

    cases.csv       county, date, cumulative
    mobility.csv    county, date, retail_recreation, grocery_pharmacy,
                    transit, workplace, residential
    covariates.csv  county, population, <covariate columns ...>
    centroids.csv   county, lat, lon
    adjacency.csv   county, neighbor

County ids are read as strings. The county order of covariates.csv fixes
the region order of the resulting panel.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from spillcheck.dataio.mobility import (
    ImputationReport,
    MobilityPanel,
    aggregate_mobility,
    haversine_distances,
    impute_missing,
)
from spillcheck.dataio.rollup import (
    DEFAULT_WEEK_ANCHOR,
    CaseDifferencing,
    difference_cumulative,
    weekly_rollup,
)
from spillcheck.effects import lag_effect_rows, summarize
from spillcheck.epidemic import PanelDataset
from spillcheck.graph import AdjacencyGraph, IsolatedPolicy
from spillcheck.inference import fit
from spillcheck.models.profiles import (
    VARIANT_ORDER,
    FitConfig,
    ModelVariant,
    PropensityDesign,
)
from spillcheck.models.results import EffectSummary, LagEffectRow
from spillcheck.propensity import PropensityScores, estimate_scores

logger = logging.getLogger(__name__)

MIN_WINDOW_START = 8
APPLICATION_ITERATIONS = (100_000, 20_000)
FULL_ITERATIONS = (200_000, 40_000)
DEFAULT_SWEEP_LAGS = tuple(range(8))


def _read_table(path: str | Path, required: Sequence[str], what: str) -> pd.DataFrame:
    filepath = Path(path)
    if not filepath.exists():
        raise FileNotFoundError(f"{what} file not found: {filepath}")
    frame = pd.read_csv(
        filepath, dtype={"county": str, "neighbor": str}, float_precision="round_trip"
    )
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise ValueError(f"{filepath}: missing columns {', '.join(missing)}")
    return frame


def _county_graph(adjacency: pd.DataFrame, counties: list[str]) -> AdjacencyGraph:
    position = {c: j for j, c in enumerate(counties)}
    unknown = sorted(
        (set(adjacency["county"]) | set(adjacency["neighbor"])) - set(position)
    )
    if unknown:
        raise ValueError(f"Adjacency refers to unknown counties: {', '.join(unknown[:10])}")
    edges = [
        (position[a], position[b])
        for a, b in zip(adjacency["county"], adjacency["neighbor"])
        if a != b
    ]
    return AdjacencyGraph.from_edges(len(counties), edges)


@dataclass(frozen=True, eq=False)
class IngestResult:
    dataset: PanelDataset
    imputation: ImputationReport
    differencing: CaseDifferencing


def ingest(
    cases: str | Path,
    mobility: str | Path,
    covariates: str | Path,
    centroids: str | Path,
    adjacency: str | Path,
    start_date: str,
    end_date: str,
    week_anchor: str = DEFAULT_WEEK_ANCHOR,
    isolated: IsolatedPolicy = "self-loop",
) -> IngestResult:
    """Assemble a weekly PanelDataset from the county tables.

    Args:
        cases: Cumulative case counts per county and day.
        mobility: Daily mobility categories per county.
        covariates: Static covariates, one row per county, with a population column.
        centroids: County centroids in degrees, for imputation distances.
        adjacency: County neighbor pairs.
        start_date: First day considered; counting starts at the first week boundary.
        end_date: Last day considered; a trailing partial week is dropped.
        week_anchor: Any first day of a week.
        isolated: Policy for counties without neighbors.

    Returns:
        The panel plus the imputation and case-differencing reports.

    Raises:
        FileNotFoundError: If an input file does not exist.
        ValueError: If a table lacks columns, refers to unknown counties,
            or leaves county-weeks unfilled.
    """
    cov = _read_table(covariates, ["county", "population"], "Covariates")
    if cov["county"].duplicated().any():
        raise ValueError(f"{covariates}: duplicate county rows")
    counties = cov["county"].tolist()

    cents = _read_table(centroids, ["county", "lat", "lon"], "Centroids")
    cents = cents.set_index("county")
    absent = [c for c in counties if c not in cents.index]
    if absent:
        raise ValueError(f"{centroids}: no centroid for counties {', '.join(absent[:10])}")
    cents = cents.loc[counties]

    graph = _county_graph(_read_table(adjacency, ["county", "neighbor"], "Adjacency"), counties)
    logger.info("Ingesting %d counties, %d adjacency pairs", len(counties), graph.n_edges)

    days = pd.date_range(start_date, end_date, freq="D")
    mob_frame = _read_table(mobility, ["county", "date"], "Mobility")
    panel = MobilityPanel.from_frame(mob_frame, cents.reset_index())
    daily_a = aggregate_mobility(panel).reindex(index=counties, columns=days)
    distances = haversine_distances(cents["lat"].to_numpy(), cents["lon"].to_numpy())
    daily_a, imputation = impute_missing(daily_a, graph, distances)
    weekly_a = weekly_rollup(daily_a, "mean", start_date, end_date, week_anchor)

    case_frame = _read_table(cases, ["county", "date", "cumulative"], "Cases")
    case_frame["date"] = pd.to_datetime(case_frame["date"])
    cumulative = case_frame.pivot_table(
        index="county", columns="date", values="cumulative", aggfunc="max"
    )
    baseline = pd.Timestamp(start_date) - pd.Timedelta(days=1)
    span = pd.date_range(min(cumulative.columns.min(), baseline), end_date, freq="D")
    cumulative = cumulative.reindex(index=counties, columns=span).ffill(axis=1).fillna(0.0)
    new_cases, differencing = difference_cumulative(cumulative)
    weekly_y = weekly_rollup(new_cases, "sum", start_date, end_date, week_anchor)

    names = [c for c in cov.columns if c not in ("county", "population")]
    static = cov[names].to_numpy(dtype=float)
    periods = weekly_a.shape[1]
    X = np.repeat(static[:, None, :], periods, axis=1)
    dataset = PanelDataset(
        graph=graph,
        Y=np.rint(weekly_y.to_numpy()).astype(np.int64),
        A=weekly_a.to_numpy(dtype=float),
        X=X,
        N=cov["population"].to_numpy(dtype=float),
        covariate_names=tuple(names),
        period_labels=tuple(weekly_a.columns),
        region_ids=tuple(counties),
        isolated=isolated,
    )
    logger.info(
        "Built panel: %d counties x %d weeks, %d covariates", len(counties), periods, len(names)
    )
    return IngestResult(dataset=dataset, imputation=imputation, differencing=differencing)


@dataclass(frozen=True, eq=False)
class ApplicationRun:
    """Everything one real-data fit needs, shaped like a simulation run."""

    dataset: PanelDataset
    design: PropensityDesign
    fit: FitConfig
    variant: ModelVariant


def select_covariates(dataset: PanelDataset, covariates: Sequence[str]) -> PanelDataset:
    """Restrict X to the named covariates, in the given order."""
    missing = [c for c in covariates if c not in dataset.covariate_names]
    if missing:
        raise ValueError(
            f"Dataset lacks covariates {', '.join(missing)}; "
            f"available: {', '.join(dataset.covariate_names)}"
        )
    idx = [dataset.covariate_names.index(c) for c in covariates]
    return PanelDataset(
        graph=dataset.graph,
        Y=dataset.Y,
        A=dataset.A,
        X=dataset.X[:, :, idx],
        N=dataset.N,
        covariate_names=tuple(covariates),
        period_labels=dataset.period_labels,
        region_ids=dataset.region_ids,
        isolated=dataset.isolated,
    )


def application_window_start(lag: int, design: PropensityDesign) -> int:
    """First fitted week: 8, later when lagged scores would reach before the first valid week."""
    return max(MIN_WINDOW_START, lag + design.max_lag + 1)


def build_application_run(
    dataset: PanelDataset,
    lag: int,
    variant: ModelVariant,
    covariates: Sequence[str] | None = None,
    design: PropensityDesign | None = None,
    iterations: int | None = None,
    seed: int = 0,
) -> ApplicationRun:
    """Fit configuration for one (lag, variant) on a county panel.

    Defaults to 100,000 iterations with 20,000 burn-in, doubled for the
    full model. An explicit `iterations` keeps a one-fifth burn-in.
    """
    if covariates is not None:
        dataset = select_covariates(dataset, covariates)
    design = design or PropensityDesign.application()
    window_start = application_window_start(lag, design)
    if window_start > dataset.Y.shape[1]:
        raise ValueError(
            f"Lag {lag} needs fitting from week {window_start}, "
            f"but the panel has {dataset.Y.shape[1]} weeks"
        )
    if iterations is None:
        total, burn_in = FULL_ITERATIONS if variant is ModelVariant.FULL else APPLICATION_ITERATIONS
    else:
        total, burn_in = iterations, iterations // 5
    config = FitConfig(
        iterations=total,
        burn_in=burn_in,
        lag=lag,
        window_start=window_start,
        seed=seed,
    )
    return ApplicationRun(dataset=dataset, design=design, fit=config, variant=variant)


def sweep_seed(base_seed: int, lag: int, variant: ModelVariant) -> int:
    sequence = np.random.SeedSequence([base_seed, lag, VARIANT_ORDER.index(variant)])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def _fit_one(run: ApplicationRun, scores: PropensityScores | None) -> EffectSummary:
    samples = fit(run.dataset, scores, run.variant, run.fit)
    return summarize(samples, lag=run.fit.lag)


def lag_sweep(
    dataset: PanelDataset,
    lags: Sequence[int] = DEFAULT_SWEEP_LAGS,
    variants: Sequence[ModelVariant] = (ModelVariant.NO_NUGGET,),
    covariates: Sequence[str] | None = None,
    iterations: int | None = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> tuple[list[LagEffectRow], dict[tuple[int, ModelVariant], EffectSummary]]:
    """Fit every (lag, variant) pair and collect percent-scale effects by lag.

    Each fit starts at `application_window_start(lag, design)`: week 8 for most
    lags, but one week later per lag step once lag + max_lag + 1 passes 8. With
    the application design (max_lag 1) lag 7 fits weeks 9 onward, so the top lag
    drops the first week the lower lags use.
    """
    runs = [
        build_application_run(
            dataset,
            lag,
            variant,
            covariates=covariates,
            iterations=iterations,
            seed=sweep_seed(seed, lag, variant),
        )
        for lag in lags
        for variant in variants
    ]
    if not runs:
        raise ValueError("lag_sweep needs at least one lag and one variant")
    scores = estimate_scores(runs[0].dataset, runs[0].design)
    logger.info("Lag sweep: %d fits on %d jobs", len(runs), n_jobs)
    summaries = Parallel(n_jobs=n_jobs)(delayed(_fit_one)(run, scores) for run in runs)
    by_key = {(run.fit.lag, run.variant): s for run, s in zip(runs, summaries)}
    return lag_effect_rows(by_key), by_key
