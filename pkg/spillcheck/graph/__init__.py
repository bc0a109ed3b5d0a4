from spillcheck.graph.adjacency import (
    AdjacencyGraph,
    IsolatedPolicy,
    greedy_coloring,
    neighbor_average,
    read_adjacency,
    rook_grid,
    second_order_neighbors,
    temporal_path_graph,
    write_adjacency,
)
from spillcheck.graph.precision import RHO_UPPER, SparsePrecision, car_precision, check_rho

__all__ = [
    "AdjacencyGraph",
    "IsolatedPolicy",
    "RHO_UPPER",
    "SparsePrecision",
    "car_precision",
    "check_rho",
    "greedy_coloring",
    "neighbor_average",
    "read_adjacency",
    "rook_grid",
    "second_order_neighbors",
    "temporal_path_graph",
    "write_adjacency",
]
