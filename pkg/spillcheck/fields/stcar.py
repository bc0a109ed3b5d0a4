"""CAR and separable space-time CAR (STCAR) Gaussian fields.

A J x T field theta is vectorised time-major (theta(1), ..., theta(T)),
i.e. column-stacked, so its precision is (1/sigma^2) P_t (x) P_s with
P_s = M_s - rho_s C_s on space and P_t = M_t - rho_t C_t on the temporal
path graph. Kronecker structure is never materialised: quadratic forms
use sum(Theta * (P_s Theta P_t)) and log-determinants come from the two
factor spectra.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from spillcheck.fields.spectra import FactorSpectrum, factor_spectrum
from spillcheck.graph import AdjacencyGraph, IsolatedPolicy, temporal_path_graph
from spillcheck.models.profiles import CarParams, StcarParams

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class StcarStructure:
    """Sparse factors and cached spectra of the STCAR on (space, periods).

    The temporal factor always applies the self-loop policy, so a single
    period gives the 1x1 factor [1].
    """

    space: AdjacencyGraph
    periods: int
    isolated: IsolatedPolicy = "error"

    @cached_property
    def time(self) -> AdjacencyGraph:
        return temporal_path_graph(self.periods)

    @cached_property
    def space_spectrum(self) -> FactorSpectrum:
        return factor_spectrum(self.space, self.isolated)

    @cached_property
    def time_spectrum(self) -> FactorSpectrum:
        return factor_spectrum(self.time, "self-loop")

    @cached_property
    def space_degrees(self) -> np.ndarray:
        return self.space.effective_degrees(self.isolated)

    @cached_property
    def time_degrees(self) -> np.ndarray:
        return self.time.effective_degrees("self-loop")

    @property
    def shape(self) -> tuple[int, int]:
        return self.space.n_nodes, self.periods

    def check_shape(self, theta: np.ndarray) -> np.ndarray:
        values = np.asarray(theta, dtype=float)
        if values.shape != self.shape:
            raise ValueError(f"theta has shape {values.shape}, expected {self.shape}")
        return values

    def logdet(self, rho_s: float, rho_t: float) -> float:
        """log det(P_t (x) P_s) = J log det P_t + T log det P_s."""
        n_space, n_time = self.shape
        return n_space * self.time_spectrum.logdet(rho_t) + n_time * self.space_spectrum.logdet(
            rho_s
        )

    def precision_product(self, theta: np.ndarray, rho_s: float, rho_t: float) -> np.ndarray:
        """P_s Theta P_t, the unscaled precision applied to the vectorised field."""
        left = self.space_degrees[:, None] * theta - rho_s * (self.space.matrix @ theta)
        return left * self.time_degrees[None, :] - rho_t * (self.time.matrix @ left.T).T

    def quadratic_parts(self, theta: np.ndarray) -> tuple[float, float, float, float]:
        """(a, b, c, d) splitting the STCAR quadratic form.

        vec(Theta)' (P_t (x) P_s) vec(Theta) = a - rho_s b - rho_t c + rho_s rho_t d.
        """
        theta = self.check_shape(theta)
        c_s_theta = self.space.matrix @ theta
        m_s_theta = self.space_degrees[:, None] * theta
        m_t = self.time_degrees[None, :]
        c_t: sp.csr_matrix = self.time.matrix

        def right_c(values: np.ndarray) -> np.ndarray:
            return (c_t @ values.T).T

        a = float(np.sum(theta * (m_s_theta * m_t)))
        b = float(np.sum(theta * (c_s_theta * m_t)))
        c = float(np.sum(theta * right_c(m_s_theta)))
        d = float(np.sum(theta * right_c(c_s_theta)))
        return a, b, c, d

    def quadratic(self, theta: np.ndarray, rho_s: float, rho_t: float) -> float:
        theta = self.check_shape(theta)
        return float(np.sum(theta * self.precision_product(theta, rho_s, rho_t)))

    def log_density(self, theta: np.ndarray, params: StcarParams) -> float:
        n_cells = self.space.n_nodes * self.periods
        quad = self.quadratic(theta, params.rho_s, params.rho_t)
        sigma2 = params.sigma**2
        return (
            -0.5 * n_cells * _LOG_2PI
            - 0.5 * n_cells * np.log(sigma2)
            + 0.5 * self.logdet(params.rho_s, params.rho_t)
            - 0.5 * quad / sigma2
        )

    def sample(
        self, params: StcarParams, rng: np.random.Generator, size: int | None = None
    ) -> np.ndarray:
        """sigma * R_s Z R_t' with R R' the factor covariances; shape (J, T) or (size, J, T)."""
        n_space, n_time = self.shape
        space_root = self.space_spectrum.root(params.rho_s)
        time_root = self.time_spectrum.root(params.rho_t)
        count = 1 if size is None else size
        z = rng.standard_normal((count, n_space, n_time))
        draws = params.sigma * np.einsum("jk,nkt,st->njs", space_root, z, time_root)
        return draws[0] if size is None else draws


def sample_car(
    graph: AdjacencyGraph,
    params: CarParams,
    rng: np.random.Generator,
    size: int | None = None,
    isolated: IsolatedPolicy = "error",
) -> np.ndarray:
    """Draw from Normal(0, sigma^2 (M - rho C)^-1); shape (J,) or (size, J)."""
    root = factor_spectrum(graph, isolated).root(params.rho)
    count = 1 if size is None else size
    z = rng.standard_normal((count, graph.n_nodes))
    draws = params.sigma * (z @ root.T)
    return draws[0] if size is None else draws


def sample_stcar(
    space: AdjacencyGraph,
    periods: int,
    params: StcarParams,
    rng: np.random.Generator,
    size: int | None = None,
    isolated: IsolatedPolicy = "error",
) -> np.ndarray:
    """Draw a J x T STCAR field (or `size` of them)."""
    return StcarStructure(space, periods, isolated).sample(params, rng, size=size)


def stcar_log_density(
    theta: np.ndarray,
    space: AdjacencyGraph,
    periods: int,
    params: StcarParams,
    isolated: IsolatedPolicy = "error",
) -> float:
    """Exact multivariate-normal log density of a J x T field."""
    return StcarStructure(space, periods, isolated).log_density(theta, params)


def car_log_density(
    x: np.ndarray,
    graph: AdjacencyGraph,
    params: CarParams,
    isolated: IsolatedPolicy = "error",
) -> float:
    """CAR log density, the single-period case of the STCAR with a unit temporal factor."""
    values = np.asarray(x, dtype=float)
    if values.shape != (graph.n_nodes,):
        raise ValueError(f"x has shape {values.shape}, expected ({graph.n_nodes},)")
    stcar = StcarParams(sigma=params.sigma, rho_s=params.rho, rho_t=0.0)
    return stcar_log_density(values[:, None], graph, 1, stcar, isolated)
