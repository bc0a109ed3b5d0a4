from spillcheck.propensity.design import DesignMatrix, build_design_matrix
from spillcheck.propensity.regression import LeastSquaresFit, fit_least_squares
from spillcheck.propensity.scores import (
    BalanceStatistics,
    PropensityScores,
    balance_statistics,
    estimate_scores,
    indirect_scores,
)

__all__ = [
    "BalanceStatistics",
    "DesignMatrix",
    "LeastSquaresFit",
    "PropensityScores",
    "balance_statistics",
    "build_design_matrix",
    "estimate_scores",
    "fit_least_squares",
    "indirect_scores",
]
