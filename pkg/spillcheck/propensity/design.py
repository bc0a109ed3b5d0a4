"""Regressor matrices for the propensity regressions.

Rows are (region, time) observations stacked time-major: all regions at
the first usable time, then all regions at the next, and so on. Columns
follow the order of the design's terms; a term expands into several
columns when it carries several covariates or polynomial powers.

Time is 1-based in column values and names (t = 1 is the first period).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spillcheck.epidemic.panel import PanelDataset
from spillcheck.graph import neighbor_average
from spillcheck.models.profiles import PropensityDesign, RegressorTerm


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    rows: np.ndarray
    targets: np.ndarray
    columns: tuple[str, ...]
    valid_from: int  # first 1-based period with every lag available
    regions: np.ndarray
    times: np.ndarray  # 0-based period index of each row

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]


class _PanelView:
    """Lazily computed panel series shared by all terms of one design."""

    def __init__(self, dataset: PanelDataset):
        self.dataset = dataset
        self._cache: dict[str, np.ndarray] = {}

    def series(self, name: str) -> np.ndarray:
        if name not in self._cache:
            self._cache[name] = self._compute(name)
        return self._cache[name]

    def _compute(self, name: str) -> np.ndarray:
        ds = self.dataset
        if name == "A":
            return ds.A
        if name == "X":
            return ds.X
        if name == "Y":
            return ds.Y.astype(float)
        if name == "Y_log":
            return np.log(ds.Y + 1.0) - np.log(ds.N)[:, None]
        if name.endswith("_tilde"):
            return neighbor_average(ds.graph, self.series(name[: -len("_tilde")]), ds.isolated)
        if name == "first_case":
            has_case = ds.Y > 0
            first = np.argmax(has_case, axis=1).astype(float)
            first[~has_case.any(axis=1)] = np.inf
            return first
        raise KeyError(name)


def _lagged_name(label: str, lag: int) -> str:
    return f"{label}(t)" if lag == 0 else f"{label}(t-{lag})"


def _term_columns(
    term: RegressorTerm, view: _PanelView, t: int
) -> list[tuple[str, np.ndarray]]:
    ds = view.dataset
    n_regions = ds.n_regions
    kind, lag = term.kind, term.lag

    if kind == "intercept":
        return [("intercept", np.ones(n_regions))]
    if kind in ("A", "A_tilde"):
        return [(_lagged_name(kind, lag), view.series(kind)[:, t - lag])]
    if kind in ("X", "X_tilde"):
        values = view.series(kind)[:, t - lag, :]
        return [
            (_lagged_name(f"{kind}:{name}", lag), values[:, k])
            for k, name in enumerate(ds.covariate_names)
        ]
    if kind in ("Y", "Y_tilde"):
        base = "Y_log" if term.transform == "log_per_capita" else "Y"
        series = base if kind == "Y" else f"{base}_tilde"
        label = kind if term.transform == "identity" else f"log {kind}/N"
        return [(_lagged_name(label, lag), view.series(series)[:, t - lag])]
    if kind == "time":
        return [
            (f"t^{power}" if power > 1 else "t", np.full(n_regions, float(t + 1) ** power))
            for power in range(1, term.degree + 1)
        ]
    if kind == "weeks_since_first_case":
        # Regions without any case yet (first_case = inf) stay at zero.
        since = np.maximum(t - view.series("first_case"), 0.0)
        label = "weeks_since_first_case"
        return [
            (f"{label}^{power}" if power > 1 else label, since**power)
            for power in range(1, term.degree + 1)
        ]
    if kind == "time_x_A":
        return [(f"t*{_lagged_name('A', lag)}", (t + 1) * ds.A[:, t - lag])]
    if kind == "baseline_A":
        return [("A(1)", ds.A[:, 0])]
    raise ValueError(f"Unknown regressor kind '{kind}'")


def build_design_matrix(
    dataset: PanelDataset,
    design: PropensityDesign,
    target: str = "A",
) -> DesignMatrix:
    """Stack the design's regressors and the target (A or A_tilde) over usable periods."""
    if target not in ("A", "A_tilde"):
        raise ValueError(f"target must be 'A' or 'A_tilde', got '{target}'")
    max_lag = design.max_lag
    if max_lag >= dataset.periods:
        raise ValueError(
            f"Design needs lag {max_lag} but the panel has only {dataset.periods} periods"
        )

    view = _PanelView(dataset)
    target_series = view.series(target)
    blocks, targets, names = [], [], None
    for t in range(max_lag, dataset.periods):
        columns = [col for term in design.terms for col in _term_columns(term, view, t)]
        if names is None:
            names = tuple(name for name, _ in columns)
        blocks.append(np.column_stack([values for _, values in columns]))
        targets.append(target_series[:, t])

    n_times = dataset.periods - max_lag
    return DesignMatrix(
        rows=np.vstack(blocks),
        targets=np.concatenate(targets),
        columns=names,
        valid_from=max_lag + 1,
        regions=np.tile(np.arange(dataset.n_regions), n_times),
        times=np.repeat(np.arange(max_lag, dataset.periods), dataset.n_regions),
    )
