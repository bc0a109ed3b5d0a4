"""CAR precision matrices M - rho*C in coordinate-list form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from spillcheck.graph.adjacency import AdjacencyGraph, IsolatedPolicy

# M - C is singular; samplers keep rho at or below this bound.
RHO_UPPER = 1.0 - 1e-6


@dataclass(frozen=True)
class SparsePrecision:
    """Symmetric sparse precision with entries ordered by (row, col)."""

    dimension: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    symmetric: bool = True

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.values, (self.rows, self.cols)), shape=(self.dimension, self.dimension)
        )

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    @property
    def diagonal(self) -> np.ndarray:
        diag = np.zeros(self.dimension)
        on_diag = self.rows == self.cols
        diag[self.rows[on_diag]] = self.values[on_diag]
        return diag

    @property
    def nnz(self) -> int:
        return int(self.values.size)


def check_rho(rho: float) -> None:
    if not 0.0 <= rho < 1.0:
        raise ValueError(
            f"rho must lie in [0, 1), got {rho} (rho = 1 is the intrinsic CAR, not supported)"
        )


def car_precision(
    graph: AdjacencyGraph,
    rho: float,
    isolated: IsolatedPolicy = "error",
) -> SparsePrecision:
    """Precision of CAR(1, rho): diagonal m_j, off-diagonal -rho * c_jk."""
    check_rho(rho)
    m = graph.effective_degrees(isolated)

    pairs = np.asarray(graph.edges, dtype=np.int64).reshape(-1, 2)
    rows = np.concatenate([np.arange(graph.n_nodes), pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([np.arange(graph.n_nodes), pairs[:, 1], pairs[:, 0]])
    values = np.concatenate([m, np.full(2 * len(pairs), -rho)])

    order = np.lexsort((cols, rows))
    return SparsePrecision(
        dimension=graph.n_nodes,
        rows=rows[order],
        cols=cols[order],
        values=values[order],
    )
