from spillcheck.dataio.application import (
    ApplicationRun,
    IngestResult,
    application_window_start,
    build_application_run,
    ingest,
    lag_sweep,
    select_covariates,
)
from spillcheck.dataio.mobility import (
    MOBILITY_CATEGORIES,
    ImputationReport,
    MobilityPanel,
    aggregate_mobility,
    donor_weights,
    haversine_distances,
    impute_missing,
)
from spillcheck.dataio.rollup import (
    DEFAULT_WEEK_ANCHOR,
    CaseDifferencing,
    difference_cumulative,
    week_starts,
    weekly_rollup,
)

__all__ = [
    "DEFAULT_WEEK_ANCHOR",
    "MOBILITY_CATEGORIES",
    "ApplicationRun",
    "CaseDifferencing",
    "ImputationReport",
    "IngestResult",
    "MobilityPanel",
    "aggregate_mobility",
    "application_window_start",
    "build_application_run",
    "difference_cumulative",
    "donor_weights",
    "haversine_distances",
    "impute_missing",
    "ingest",
    "lag_sweep",
    "select_covariates",
    "week_starts",
    "weekly_rollup",
]
