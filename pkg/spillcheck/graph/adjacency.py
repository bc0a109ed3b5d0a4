"""Adjacency structures and neighbor-average operators.

An AdjacencyGraph is the symmetric 0/1 neighbor structure c_jk that every
spatial coupling in spillcheck is built on: the SIR contact weights, the
CAR precision, the tilde (neighbor-averaged) covariates and the
propensity spillover scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Literal

import numpy as np
import scipy.sparse as sp

IsolatedPolicy = Literal["error", "self-loop"]

_ISOLATED_POLICIES: tuple[str, ...] = ("error", "self-loop")


@dataclass(frozen=True)
class AdjacencyGraph:
    """Symmetric, loop-free 0/1 neighbor structure.

    Edges are stored once as (j, k) with j < k, sorted, whichever way they are
    given, so two graphs with the same neighbor sets compare equal and
    serialize identically.
    """

    n_nodes: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ValueError(f"n_nodes must be positive, got {self.n_nodes}")
        for j, k in self.edges:
            if j == k:
                raise ValueError(f"self-loop ({j}, {k}) is not allowed")
            if not (0 <= j < self.n_nodes and 0 <= k < self.n_nodes):
                raise ValueError(f"edge ({j}, {k}) out of range for {self.n_nodes} nodes")
        canonical = {(min(int(j), int(k)), max(int(j), int(k))) for j, k in self.edges}
        object.__setattr__(self, "edges", tuple(sorted(canonical)))

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Iterable[tuple[int, int]]) -> AdjacencyGraph:
        """Build a graph from unordered pairs; duplicates and orientation are normalized."""
        return cls(n_nodes=n_nodes, edges=tuple(edges))

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """The symmetric adjacency matrix C as CSR."""
        if not self.edges:
            return sp.csr_matrix((self.n_nodes, self.n_nodes))
        pairs = np.asarray(self.edges, dtype=np.int64)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        data = np.ones(rows.size)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n_nodes, self.n_nodes))

    @cached_property
    def degrees(self) -> np.ndarray:
        """m_j, the number of neighbors of each node."""
        return np.asarray(self.matrix.sum(axis=1)).ravel().astype(np.int64)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def isolated_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.degrees == 0)

    def neighbors(self, j: int) -> np.ndarray:
        row = self.matrix.getrow(j)
        return np.sort(row.indices)

    def effective_degrees(self, isolated: IsolatedPolicy = "error") -> np.ndarray:
        """Degrees with the isolated-node policy applied (m_j := 1 under self-loop)."""
        _check_policy(isolated)
        m = self.degrees.astype(float)
        if np.any(m == 0):
            if isolated == "error":
                raise ValueError(
                    f"Graph has isolated nodes {self.isolated_nodes.tolist()}; "
                    "use isolated='self-loop' to treat them as independent"
                )
            m[m == 0] = 1.0
        return m


def _check_policy(isolated: str) -> None:
    if isolated not in _ISOLATED_POLICIES:
        raise ValueError(
            f"Unknown isolated-node policy '{isolated}'. Supported: {_ISOLATED_POLICIES}"
        )


def rook_grid(rows: int, cols: int) -> AdjacencyGraph:
    """Lattice graph where cell (r, c) neighbors (r±1, c) and (r, c±1).

    Node index is r * cols + c (row-major).
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"Grid dimensions must be positive, got {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            node = r * cols + c
            if c + 1 < cols:
                edges.append((node, node + 1))
            if r + 1 < rows:
                edges.append((node, node + cols))
    return AdjacencyGraph.from_edges(rows * cols, edges)


def temporal_path_graph(periods: int) -> AdjacencyGraph:
    """Path graph over time steps: t is adjacent to t-1 and t+1.

    A single period yields one isolated node; callers building a temporal
    CAR factor apply the self-loop policy to it.
    """
    if periods < 1:
        raise ValueError(f"periods must be positive, got {periods}")
    return AdjacencyGraph.from_edges(periods, [(t, t + 1) for t in range(periods - 1)])


def neighbor_average(
    graph: AdjacencyGraph,
    field: np.ndarray,
    isolated: IsolatedPolicy = "error",
) -> np.ndarray:
    """Mean of `field` over each node's neighbors: x~_j = sum_k c_jk x_k / m_j.

    `field` has nodes on its first axis and any trailing shape (time, covariate).
    Under the self-loop policy an isolated node averages over itself.
    """
    values = np.asarray(field, dtype=float)
    if values.shape[0] != graph.n_nodes:
        raise ValueError(
            f"field first dimension {values.shape[0]} does not match {graph.n_nodes} nodes"
        )
    m = graph.effective_degrees(isolated)
    flat = values.reshape(graph.n_nodes, -1)
    summed = graph.matrix @ flat
    lonely = graph.degrees == 0
    if np.any(lonely):
        summed[lonely] = flat[lonely]
    return (summed / m[:, None]).reshape(values.shape)


def second_order_neighbors(graph: AdjacencyGraph, j: int) -> np.ndarray:
    """Neighbors of neighbors of j, excluding j and its first-degree neighbors."""
    first = set(graph.neighbors(j).tolist())
    second: set[int] = set()
    for k in first:
        second.update(graph.neighbors(k).tolist())
    second -= first
    second.discard(j)
    return np.array(sorted(second), dtype=np.int64)


def greedy_coloring(graph: AdjacencyGraph) -> np.ndarray:
    """Proper vertex coloring, visiting nodes in index order.

    Deterministic for a given graph; a rook grid gets the two-color checkerboard.
    """
    colors = np.full(graph.n_nodes, -1, dtype=np.int64)
    for j in range(graph.n_nodes):
        taken = {colors[k] for k in graph.neighbors(j) if colors[k] >= 0}
        color = 0
        while color in taken:
            color += 1
        colors[j] = color
    return colors


def write_adjacency(graph: AdjacencyGraph, path: str | Path) -> None:
    """Write the edge-list format: `nodes <J>` header then one `j k` line per edge."""
    lines = [f"nodes {graph.n_nodes}"]
    lines.extend(f"{j} {k}" for j, k in graph.edges)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_adjacency(path: str | Path) -> AdjacencyGraph:
    """Read a graph written by write_adjacency."""
    filepath = Path(path)
    if not filepath.exists():
        raise FileNotFoundError(f"Adjacency file not found: {filepath}")

    lines = [ln.strip() for ln in filepath.read_text(encoding="utf-8").splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("nodes "):
        raise ValueError(f"{filepath}: expected header line 'nodes <J>'")

    n_nodes = int(lines[0].split()[1])
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{filepath}:{lineno}: expected 'j k', got '{line}'")
        edges.append((int(parts[0]), int(parts[1])))
    return AdjacencyGraph.from_edges(n_nodes, edges)
