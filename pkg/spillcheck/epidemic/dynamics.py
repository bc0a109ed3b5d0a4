"""Deterministic spatial SIR difference equations.

Region j mixes with its own infected with weight 1 - phi and with the
average infected count of its neighbors with weight phi:

    lambda_j = beta_j (S_j / N_j) ((1 - phi) I_j + phi I~_j)
    S' = S - lambda,  I' = I + lambda - gamma I,  R' = R + gamma I
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spillcheck.graph import AdjacencyGraph, IsolatedPolicy, neighbor_average

# Relative tolerance of S + I + R = N.
CONSERVATION_TOL = 1e-9


@dataclass(frozen=True)
class EpidemicState:
    """Per-region compartments at one time step (real-valued)."""

    S: np.ndarray
    I: np.ndarray  # noqa: E741
    R: np.ndarray
    N: np.ndarray

    def __post_init__(self) -> None:
        shapes = {np.shape(self.S), np.shape(self.I), np.shape(self.R), np.shape(self.N)}
        if len(shapes) != 1:
            raise ValueError(f"Compartment shapes differ: {sorted(shapes)}")
        if np.any(np.asarray(self.N) <= 0):
            raise ValueError("Populations N must be positive")
        for name in ("S", "I", "R"):
            if np.any(np.asarray(getattr(self, name)) < 0):
                raise ValueError(f"Compartment {name} has negative entries")

    @classmethod
    def initial(cls, infected: np.ndarray, population: np.ndarray) -> EpidemicState:
        """Everyone not infected is susceptible; nobody has recovered."""
        population = np.asarray(population, dtype=float)
        infected = np.minimum(np.asarray(infected, dtype=float), population)
        return cls(S=population - infected, I=infected, R=np.zeros_like(population), N=population)

    def conservation_error(self) -> float:
        """max_j |S + I + R - N| / N."""
        return float(np.max(np.abs(self.S + self.I + self.R - self.N) / self.N))


def _check_phi_beta(phi: float, beta: np.ndarray) -> np.ndarray:
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"phi must lie in [0, 1], got {phi}")
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < 0):
        raise ValueError("Infection rates beta must be nonnegative")
    return beta


def infection_rate(
    state: EpidemicState,
    graph: AdjacencyGraph,
    phi: float,
    beta: np.ndarray,
    cap: bool = True,
    isolated: IsolatedPolicy = "error",
) -> np.ndarray:
    """New infections per region; capped at S unless `cap` is False."""
    beta = _check_phi_beta(phi, beta)
    mixed = (1.0 - phi) * state.I + phi * neighbor_average(graph, state.I, isolated)
    rate = beta * (state.S / state.N) * mixed
    return np.minimum(rate, state.S) if cap else rate


def step(state: EpidemicState, rate: np.ndarray, gamma: float) -> EpidemicState:
    """Advance one time step."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    rate = np.asarray(rate, dtype=float)
    if np.any(rate > state.S):
        raise RuntimeError("Infection rate exceeds the susceptible pool; rates must be capped")
    recovered = gamma * state.I
    return EpidemicState(
        S=state.S - rate,
        I=state.I + rate - recovered,
        R=state.R + recovered,
        N=state.N,
    )


def decompose_rate(
    state: EpidemicState,
    graph: AdjacencyGraph,
    phi: float,
    beta: np.ndarray,
    isolated: IsolatedPolicy = "error",
) -> tuple[np.ndarray, np.ndarray]:
    """Split the uncapped rate as beta * exp(theta) + v.

    theta = log(S I / N) is -inf where I = 0; v = beta phi (S/N)(I~ - I)
    collects the neighbor differences.
    """
    beta = _check_phi_beta(phi, beta)
    with np.errstate(divide="ignore"):
        theta = np.log(state.S * state.I / state.N)
    neighbors = neighbor_average(graph, state.I, isolated)
    v = beta * phi * (state.S / state.N) * (neighbors - state.I)
    return theta, v
