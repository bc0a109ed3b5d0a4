"""Simulated panels on a rook grid.

One scenario draws, in this order from a single generator:

    U ~ CAR(1, rho_s)                   initial infected I(1) = scale * exp(U)
    X ~ STCAR(1, rho_s, rho_t), q times confounders
    E ~ STCAR(1, rho_s, rho_t)          A = rho_x X_1 + sqrt(1 - rho_x^2) E
    log beta = a0 + X a1 + X~ a2 + A d1 + A~ d2
    Y ~ Poisson(p exp(g) lambda(t - l))

The intervention is confounded by the first covariate only.
"""

from __future__ import annotations

import logging

import numpy as np

from spillcheck.epidemic.dynamics import (
    CONSERVATION_TOL,
    EpidemicState,
    decompose_rate,
    infection_rate,
    step,
)
from spillcheck.epidemic.observation import observe
from spillcheck.epidemic.panel import PanelDataset, SimulationTruth
from spillcheck.fields import StcarStructure, sample_car
from spillcheck.graph import AdjacencyGraph, neighbor_average, rook_grid
from spillcheck.models.profiles import BetaModel, CarParams, ScenarioConfig, StcarParams

logger = logging.getLogger(__name__)


def log_infection_rate(
    graph: AdjacencyGraph, beta: BetaModel, A: np.ndarray, X: np.ndarray
) -> np.ndarray:
    """log beta_j(t) for J x T intervention A and J x T x q covariates X."""
    if X.shape[2] != beta.n_covariates:
        raise ValueError(
            f"BetaModel has {beta.n_covariates} covariate coefficients, data has {X.shape[2]}"
        )
    X_tilde = neighbor_average(graph, X)
    A_tilde = neighbor_average(graph, A)
    return (
        beta.alpha0
        + X @ np.asarray(beta.alpha1, dtype=float)
        + X_tilde @ np.asarray(beta.alpha2, dtype=float)
        + beta.delta1 * A
        + beta.delta2 * A_tilde
    )


def simulate_scenario(config: ScenarioConfig) -> PanelDataset:
    """Generate one panel with its latent truth attached; deterministic in config.seed."""
    graph = rook_grid(config.rows, config.cols)
    n_regions, periods = graph.n_nodes, config.periods
    rng = np.random.default_rng(config.seed)

    initial_field = sample_car(graph, CarParams(sigma=1.0, rho=config.rho_s), rng)
    field = StcarStructure(graph, periods)
    stcar = StcarParams(sigma=1.0, rho_s=config.rho_s, rho_t=config.rho_t)
    X = np.moveaxis(field.sample(stcar, rng, size=config.beta.n_covariates), 0, 2)
    E = field.sample(stcar, rng)
    A = config.rho_x * X[:, :, 0] + np.sqrt(1.0 - config.rho_x**2) * E

    log_beta = log_infection_rate(graph, config.beta, A, X)
    beta = np.exp(log_beta)
    population = np.full(n_regions, config.population)
    state = EpidemicState.initial(config.initial_scale * np.exp(initial_field), population)

    paths = {name: np.empty((n_regions, periods)) for name in ("S", "I", "R", "rate", "theta", "v")}
    worst_error = 0.0
    for t in range(periods):
        paths["S"][:, t], paths["I"][:, t], paths["R"][:, t] = state.S, state.I, state.R
        rate = infection_rate(state, graph, config.phi, beta[:, t])
        theta, v = decompose_rate(state, graph, config.phi, beta[:, t])
        paths["rate"][:, t], paths["theta"][:, t], paths["v"][:, t] = rate, theta, v
        worst_error = max(worst_error, state.conservation_error())
        if t + 1 < periods:
            state = step(state, rate, config.gamma)
    if worst_error > CONSERVATION_TOL:
        logger.warning("Compartment conservation drifted to %.2e of N", worst_error)

    Y = observe(paths["rate"], config.reporting_rate, config.tau, config.lag, rng)
    logger.debug(
        "Simulated %s: %d regions, %d periods, %d cases", config.name, n_regions, periods, Y.sum()
    )
    truth = SimulationTruth(
        **paths, log_beta=log_beta, beta=config.beta, initial_field=initial_field
    )
    return PanelDataset(graph=graph, Y=Y, A=A, X=X, N=population, truth=truth)


def replicate_seed(base_seed: int, scenario_index: int, replicate: int) -> int:
    """Seed of one replicate, a function of (base seed, scenario, replicate) only."""
    sequence = np.random.SeedSequence([base_seed, scenario_index, replicate])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def simulate_replicate(
    config: ScenarioConfig, replicate: int, scenario_index: int = 0
) -> PanelDataset:
    """simulate_scenario with the replicate's seed derived from config.seed."""
    seed = replicate_seed(config.seed, scenario_index, replicate)
    return simulate_scenario(config.model_copy(update={"seed": seed}))
