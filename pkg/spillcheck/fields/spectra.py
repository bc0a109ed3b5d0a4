"""Generalized eigen-spectra of CAR precision factors.

For a graph with adjacency C and degree matrix M, one symmetric-definite
eigenproblem C u = lam M u (normalised so that U' M U = I) serves every rho:

    log det(M - rho C) = sum(log m) + sum(log(1 - rho lam))
    (M - rho C)^-1     = U diag(1 / (1 - rho lam)) U'

The normalised adjacency has lam in [-1, 1], so 1 - rho lam > 0 for rho < 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from spillcheck.graph import AdjacencyGraph, IsolatedPolicy, check_rho

logger = logging.getLogger(__name__)


class FactorizationError(np.linalg.LinAlgError):
    """A precision factor could not be decomposed or is not positive definite."""

    def __init__(self, message: str, condition: float | None = None):
        self.condition = condition
        if condition is not None:
            message = f"{message} (condition number {condition:.3e})"
        super().__init__(message)


@dataclass(frozen=True)
class FactorSpectrum:
    """Spectrum of the pencil (C, M) for one graph."""

    degrees: np.ndarray
    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def dimension(self) -> int:
        return self.degrees.size

    def shrinkage(self, rho: float) -> np.ndarray:
        """1 - rho * lam, the eigenvalues of M^-1/2 (M - rho C) M^-1/2."""
        check_rho(rho)
        shrunk = 1.0 - rho * self.eigenvalues
        if np.any(shrunk <= 0):
            raise FactorizationError(
                f"M - {rho} C is not positive definite",
                condition=_condition(shrunk),
            )
        return shrunk

    def logdet(self, rho: float) -> float:
        """log det(M - rho C)."""
        return float(np.sum(np.log(self.degrees)) + np.sum(np.log(self.shrinkage(rho))))

    def covariance(self, rho: float) -> np.ndarray:
        """(M - rho C)^-1 as a dense matrix."""
        return (self.vectors / self.shrinkage(rho)) @ self.vectors.T

    def root(self, rho: float) -> np.ndarray:
        """R with R R' = (M - rho C)^-1."""
        return self.vectors / np.sqrt(self.shrinkage(rho))


def _condition(values: np.ndarray) -> float:
    magnitudes = np.abs(values)
    smallest = magnitudes.min()
    return float("inf") if smallest == 0 else float(magnitudes.max() / smallest)


@lru_cache(maxsize=32)
def factor_spectrum(graph: AdjacencyGraph, isolated: IsolatedPolicy = "error") -> FactorSpectrum:
    """Decompose (C, M) for `graph`; cached because graphs are immutable and hashable."""
    m = graph.effective_degrees(isolated)
    c = graph.matrix.toarray()
    try:
        eigenvalues, vectors = scipy.linalg.eigh(c, np.diag(m))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise FactorizationError(
            f"Generalized eigendecomposition failed for a {graph.n_nodes}-node graph: {exc}",
            condition=_condition(m),
        ) from exc
    logger.debug(
        "Factor spectrum for %d nodes: eigenvalues in [%.4f, %.4f]",
        graph.n_nodes,
        eigenvalues.min(),
        eigenvalues.max(),
    )
    eigenvalues.setflags(write=False)
    vectors.setflags(write=False)
    m.setflags(write=False)
    return FactorSpectrum(degrees=m, eigenvalues=eigenvalues, vectors=vectors)
