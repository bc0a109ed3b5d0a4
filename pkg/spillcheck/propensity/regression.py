"""Least squares with internal standardisation and a pseudoinverse fallback."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

# Relative threshold on |R_ii| (QR) and singular values (fallback).
RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LeastSquaresFit:
    coefficients: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    rank: int
    pseudoinverse: bool = False


def _standardize(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Center and scale columns; constant columns stay as they are.

    Non-constant columns are centered only when a nonzero constant column
    exists to absorb the shift, so the column span never changes.
    """
    scale = rows.std(axis=0)
    constant = scale == 0
    offset = constant & (rows[0] != 0)
    center = rows.mean(axis=0) if offset.any() else np.zeros(rows.shape[1])
    center[constant] = 0.0
    scale[constant] = 1.0
    return (rows - center) / scale, center, scale, offset


def fit_least_squares(rows: np.ndarray, targets: np.ndarray) -> LeastSquaresFit:
    """Minimise ||targets - rows b||^2; coefficients are on the original column scale.

    Uses a pivoted QR factorisation; when the design is rank deficient falls
    back to the minimum-norm SVD solution and emits a RuntimeWarning.
    """
    rows = np.asarray(rows, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if rows.ndim != 2 or rows.shape[0] != targets.shape[0]:
        raise ValueError(f"rows {rows.shape} and targets {targets.shape} do not align")
    if rows.shape[0] == 0:
        raise ValueError("Cannot fit a regression with no observations")

    z, center, scale, offset = _standardize(rows)
    q, r, pivot = scipy.linalg.qr(z, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > RANK_TOL * diag[0])) if diag.size and diag[0] > 0 else 0

    pseudo = rank < rows.shape[1]
    if not pseudo:
        coef_z = np.empty(rows.shape[1])
        coef_z[pivot] = scipy.linalg.solve_triangular(r, q.T @ targets)
    else:
        message = (
            f"Design matrix is rank deficient (rank {rank} of {rows.shape[1]} columns); "
            "using the minimum-norm pseudoinverse solution"
        )
        warnings.warn(message, RuntimeWarning, stacklevel=2)
        logger.warning(message)
        coef_z, *_ = scipy.linalg.lstsq(z, targets, cond=RANK_TOL)

    coefficients = coef_z / scale
    if offset.any():
        # The centering shift lands on the first nonzero constant column.
        anchor = int(np.flatnonzero(offset)[0])
        coefficients[anchor] -= np.sum(coefficients * center) / rows[0, anchor]
    fitted = z @ coef_z
    return LeastSquaresFit(
        coefficients=coefficients,
        fitted=fitted,
        residuals=targets - fitted,
        rank=rank,
        pseudoinverse=pseudo,
    )
