"""County mobility: category aggregation and neighbor imputation.

The intervention A is the mean percent change from baseline over the
available categories, with residential mobility negated so that staying
home lowers A like every other category. Gaps are filled from first- and
second-degree neighbors weighted by inverse great-circle distance.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from spillcheck.graph import AdjacencyGraph, second_order_neighbors

logger = logging.getLogger(__name__)

MOBILITY_CATEGORIES = (
    "retail_recreation",
    "grocery_pharmacy",
    "transit",
    "workplace",
    "residential",
)
CATEGORY_SIGNS = {"residential": -1.0}
EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True, eq=False)
class MobilityPanel:
    """Daily category series keyed by (county, date), plus county centroids.

    `categories` has a (county, date) MultiIndex and one column per
    category; missing values are NaN. `centroids` is indexed by county with
    `lat` and `lon` columns in degrees.
    """

    categories: pd.DataFrame
    centroids: pd.DataFrame

    def __post_init__(self) -> None:
        missing = [c for c in MOBILITY_CATEGORIES if c not in self.categories.columns]
        if missing:
            raise ValueError(f"Mobility table is missing categories: {', '.join(missing)}")
        values = self.categories[list(MOBILITY_CATEGORIES)].to_numpy(dtype=float)
        if np.isinf(values).any():
            raise ValueError("Mobility category values must be finite where present")
        for col in ("lat", "lon"):
            if col not in self.centroids.columns:
                raise ValueError(f"Centroid table is missing column '{col}'")

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, centroids: pd.DataFrame) -> MobilityPanel:
        """Build from a long table with county, date and the five category columns."""
        for col in ("county", "date"):
            if col not in frame.columns:
                raise ValueError(f"Mobility table is missing column '{col}'")
        indexed = frame.assign(
            county=frame["county"].astype(str), date=pd.to_datetime(frame["date"])
        ).set_index(["county", "date"])
        if indexed.index.duplicated().any():
            raise ValueError("Mobility table has duplicate (county, date) rows")
        cents = centroids.assign(county=centroids["county"].astype(str)).set_index("county")
        return cls(categories=indexed.sort_index(), centroids=cents)


def aggregate_mobility(panel: MobilityPanel) -> pd.DataFrame:
    """Signed mean over available categories, as a county x date table.

    A (county, date) with no category present stays NaN.
    """
    signs = pd.Series({c: CATEGORY_SIGNS.get(c, 1.0) for c in MOBILITY_CATEGORIES})
    signed = panel.categories[list(MOBILITY_CATEGORIES)].astype(float) * signs
    daily = signed.mean(axis=1, skipna=True)
    return daily.unstack("date").sort_index(axis=1)


def haversine_distances(lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
    """Pairwise great-circle distances in km between points given in degrees."""
    phi = np.radians(np.asarray(lat, dtype=float))
    lam = np.radians(np.asarray(lon, dtype=float))
    dphi = phi[:, None] - phi[None, :]
    dlam = lam[:, None] - lam[None, :]
    a = np.sin(dphi / 2.0) ** 2 + np.cos(phi[:, None]) * np.cos(phi[None, :]) * np.sin(
        dlam / 2.0
    ) ** 2
    return EARTH_RADIUS_KM * 2.0 * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def donor_weights(distances: np.ndarray) -> np.ndarray:
    """Inverse-distance weights normalised to sum to 1."""
    inverse = 1.0 / np.asarray(distances, dtype=float)
    return inverse / inverse.sum()


@dataclass
class ImputationReport:
    filled: int = 0
    unfilled: list[tuple[str, str]] = field(default_factory=list)
    zero_distance_pairs: list[tuple[str, str]] = field(default_factory=list)


def _donor_distances(
    j: int,
    donors: np.ndarray,
    distances: np.ndarray,
    region_ids: list[str],
    report: ImputationReport,
) -> np.ndarray:
    d = distances[j, donors].astype(float)
    zero = d <= 0
    if not zero.any():
        return d
    positive = d[~zero]
    substitute = positive.min() if positive.size else 1.0
    for k in donors[zero]:
        report.zero_distance_pairs.append((region_ids[j], region_ids[k]))
    message = (
        f"County {region_ids[j]} shares a centroid with {int(zero.sum())} donor(s); "
        f"using distance {substitute:.4g} for them"
    )
    warnings.warn(message, RuntimeWarning, stacklevel=3)
    logger.warning(message)
    d[zero] = substitute
    return d


def impute_missing(
    values: pd.DataFrame,
    graph: AdjacencyGraph,
    distances: np.ndarray,
) -> tuple[pd.DataFrame, ImputationReport]:
    """Fill NaN cells from first- and second-degree neighbors.

    Rows of `values` follow the graph's node order; `distances` is the J x J
    donor distance matrix (see haversine_distances). Each missing cell takes
    the inverse-distance weighted mean of the donors observed on that date.
    Only originally observed values act as donors. Cells with no observed
    donor stay NaN and are listed in the report.
    """
    if values.shape[0] != graph.n_nodes:
        raise ValueError(f"values has {values.shape[0]} rows for a {graph.n_nodes}-node graph")
    if distances.shape != (graph.n_nodes, graph.n_nodes):
        raise ValueError(f"distances has shape {distances.shape}, expected {(graph.n_nodes,) * 2}")

    observed = values.to_numpy(dtype=float)
    filled = observed.copy()
    region_ids = [str(r) for r in values.index]
    dates = [str(c.date()) if hasattr(c, "date") else str(c) for c in values.columns]
    report = ImputationReport()

    for j in np.flatnonzero(np.isnan(observed).any(axis=1)):
        donors = np.union1d(graph.neighbors(j), second_order_neighbors(graph, j)).astype(np.int64)
        gaps = np.flatnonzero(np.isnan(observed[j]))
        if donors.size == 0:
            report.unfilled.extend((region_ids[j], dates[t]) for t in gaps)
            continue
        d = _donor_distances(j, donors, distances, region_ids, report)
        for t in gaps:
            present = ~np.isnan(observed[donors, t])
            if not present.any():
                report.unfilled.append((region_ids[j], dates[t]))
                continue
            weights = donor_weights(d[present])
            filled[j, t] = float(weights @ observed[donors[present], t])
            report.filled += 1

    if report.unfilled:
        logger.warning(
            "%d county-days have no observed neighbor to impute from", len(report.unfilled)
        )
    logger.info("Imputed %d missing county-days", report.filled)
    return pd.DataFrame(filled, index=values.index, columns=values.columns), report
