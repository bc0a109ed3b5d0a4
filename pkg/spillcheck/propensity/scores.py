"""Generalized propensity scores e (direct) and e~ (indirect).

A score is the fitted conditional mean of the intervention given the
design's history regressors. Periods before the design's valid-from
index have no score and hold NaN.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd

from spillcheck.epidemic.panel import PanelDataset
from spillcheck.graph import AdjacencyGraph, IsolatedPolicy, neighbor_average
from spillcheck.models.profiles import PropensityDesign
from spillcheck.propensity.design import build_design_matrix
from spillcheck.propensity.regression import LeastSquaresFit, fit_least_squares

logger = logging.getLogger(__name__)

_FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True, eq=False)
class PropensityScores:
    e: np.ndarray
    e_tilde: np.ndarray
    valid_from: int  # 1-based
    columns: tuple[str, ...] = ()
    coefficients: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.e.shape != self.e_tilde.shape:
            raise ValueError(f"e {self.e.shape} and e_tilde {self.e_tilde.shape} differ in shape")
        if not 1 <= self.valid_from <= self.e.shape[1]:
            raise ValueError(f"valid_from {self.valid_from} outside 1..{self.e.shape[1]}")
        valid = slice(self.valid_from - 1, None)
        finite = np.isfinite(self.e[:, valid]) & np.isfinite(self.e_tilde[:, valid])
        if not finite.all():
            raise ValueError("Scores must be finite from valid_from onwards")

    def save(self, directory: str | Path, dataset: PanelDataset) -> None:
        """Write e.csv and e_tilde.csv next to the panel files."""
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        for name, values in (("e", self.e), ("e_tilde", self.e_tilde)):
            pd.DataFrame(
                values,
                index=pd.Index(dataset.region_ids, name="region"),
                columns=list(dataset.period_labels),
            ).to_csv(out / f"{name}.csv", float_format=_FLOAT_FORMAT)

    @classmethod
    def load(cls, directory: str | Path) -> PropensityScores:
        src = Path(directory)
        frames = {}
        for name in ("e", "e_tilde"):
            path = src / f"{name}.csv"
            if not path.exists():
                raise FileNotFoundError(f"Score file not found: {path}")
            frame = pd.read_csv(
                path, index_col=0, dtype={"region": str}, float_precision="round_trip"
            )
            frames[name] = frame.to_numpy(float)
        finite_periods = np.flatnonzero(np.all(np.isfinite(frames["e"]), axis=0))
        if finite_periods.size == 0:
            raise ValueError(f"{src / 'e.csv'} holds no complete period of scores")
        return cls(
            e=frames["e"], e_tilde=frames["e_tilde"], valid_from=int(finite_periods[0]) + 1
        )


def indirect_scores(
    graph: AdjacencyGraph, e: np.ndarray, isolated: IsolatedPolicy = "error"
) -> np.ndarray:
    """e~ as the neighbor average of the direct scores."""
    return neighbor_average(graph, e, isolated)


def _scatter(dataset: PanelDataset, fit: LeastSquaresFit, regions, times) -> np.ndarray:
    scores = np.full((dataset.n_regions, dataset.periods), np.nan)
    scores[regions, times] = fit.fitted
    return scores


def estimate_scores(
    dataset: PanelDataset,
    design: PropensityDesign,
    indirect: Literal["average", "regression"] | None = None,
) -> PropensityScores:
    """Fit the direct-score regression and derive the indirect scores.

    `indirect` overrides the design's own choice: "average" neighbor-averages
    e, "regression" regresses A~ on the tilde version of every term.
    """
    mode = indirect or design.indirect
    matrix = build_design_matrix(dataset, design, target="A")
    fit = fit_least_squares(matrix.rows, matrix.targets)
    e = _scatter(dataset, fit, matrix.regions, matrix.times)

    if mode == "average":
        e_tilde = indirect_scores(dataset.graph, e, dataset.isolated)
    elif mode == "regression":
        tilde_design = PropensityDesign(terms=[term.tilde() for term in design.terms])
        tilde_matrix = build_design_matrix(dataset, tilde_design, target="A_tilde")
        tilde_fit = fit_least_squares(tilde_matrix.rows, tilde_matrix.targets)
        e_tilde = _scatter(dataset, tilde_fit, tilde_matrix.regions, tilde_matrix.times)
    else:
        raise ValueError(f"indirect must be 'average' or 'regression', got '{mode}'")

    r2 = 1.0 - np.var(fit.residuals) / np.var(matrix.targets) if np.var(matrix.targets) else 1.0
    logger.info(
        "Propensity fit: %d rows, %d columns, R^2 %.3f (indirect: %s)",
        matrix.n_rows,
        len(matrix.columns),
        r2,
        mode,
    )
    return PropensityScores(
        e=e,
        e_tilde=e_tilde,
        valid_from=matrix.valid_from,
        columns=matrix.columns,
        coefficients=fit.coefficients,
    )


@dataclass(frozen=True)
class BalanceStatistics:
    """|corr(A, X)| before and after partialling out the score."""

    marginal: float
    partial: float

    @property
    def balanced(self) -> bool:
        return abs(self.partial) < abs(self.marginal)


def _residualize(values: np.ndarray, basis: np.ndarray) -> np.ndarray:
    coef, *_ = np.linalg.lstsq(basis, values, rcond=None)
    return values - basis @ coef


def balance_statistics(
    dataset: PanelDataset, scores: PropensityScores, covariate: int = 0
) -> BalanceStatistics:
    """Marginal and partial (given [1, e]) correlation of A and one covariate."""
    valid = slice(scores.valid_from - 1, None)
    a = dataset.A[:, valid].ravel()
    x = dataset.X[:, valid, covariate].ravel()
    e = scores.e[:, valid].ravel()
    basis = np.column_stack([np.ones_like(e), e])
    marginal = float(np.corrcoef(a, x)[0, 1])
    partial = float(np.corrcoef(_residualize(a, basis), _residualize(x, basis))[0, 1])
    return BalanceStatistics(marginal=marginal, partial=partial)
