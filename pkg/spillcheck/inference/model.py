"""The fitted Poisson model and its posterior kernel.

For observation times t in the fit window {t0, ..., T} (1-based):

    Y_j(t) ~ Poisson(exp(g_j(t) + eta_j(t - l) + theta_j(t - l)) + exp(v~_j(t)))
    eta    = a0 + X a1 + X~ a2 + A d1 + A~ d2, with X augmented by e, e^2, e*e~
             on the local side and e~, e~^2 on the neighbor side
    theta  ~ STCAR(sigma, rho_s, rho_t) over the window
    g      ~ Normal(0, tau^2),  v~ ~ Normal(mu_v, sigma_v^2)

Latent arrays are J x T_w with column w holding observation time t0 + w;
theta's column w is the field at the lagged time t0 + w - l.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy import stats
from scipy.special import gammaln

from spillcheck.epidemic.panel import PanelDataset
from spillcheck.fields import StcarStructure
from spillcheck.graph import neighbor_average
from spillcheck.inference.variants import VariantTraits, variant_traits
from spillcheck.models.profiles import ModelVariant, StcarParams
from spillcheck.propensity.scores import PropensityScores

# Normal(0, 10^2) on regression coefficients and mu_v.
PRIOR_SD = 10.0
# InvGamma(shape, scale) on sigma^2, tau^2 and sigma_v^2.
PRIOR_IG_SHAPE = 0.1
PRIOR_IG_SCALE = 0.1
# Bound on the exponent of the main rate term.
DEFAULT_CLAMP = 700.0

SCORE_TERMS: tuple[str, ...] = (
    "alpha1:e",
    "alpha1:e^2",
    "alpha1:e*e_tilde",
    "alpha2:e_tilde",
    "alpha2:e_tilde^2",
)


def _standardized(values: np.ndarray) -> np.ndarray:
    sd = values.std()
    return (values - values.mean()) / (sd if sd > 0 else 1.0)


@dataclass(frozen=True, eq=False)
class ModelDesign:
    """Everything the posterior needs besides the parameters."""

    variant: ModelVariant
    lag: int
    window_start: int  # 1-based first observation time
    Y: np.ndarray  # J x T_w
    regressors: np.ndarray  # J x T_w x p, evaluated at t - l
    columns: tuple[str, ...]
    structure: StcarStructure
    period_labels: tuple[str, ...] = ()

    @classmethod
    def build(
        cls,
        dataset: PanelDataset,
        scores: PropensityScores | None,
        variant: ModelVariant,
        lag: int,
        window_start: int,
    ) -> ModelDesign:
        """Assemble the regressors of `variant` over the window {window_start..T}."""
        traits = variant_traits(variant)
        periods = dataset.periods
        if lag < 0:
            raise ValueError(f"lag must be nonnegative, got {lag}")
        if not lag < window_start <= periods:
            raise ValueError(
                f"window_start must satisfy lag < window_start <= T "
                f"(lag={lag}, window_start={window_start}, T={periods})"
            )
        source = np.arange(window_start - 1, periods) - lag  # 0-based t - l
        if traits.uses_scores:
            if scores is None:
                raise ValueError(f"Variant '{variant.value}' needs propensity scores")
            if source[0] < scores.valid_from - 1:
                raise ValueError(
                    f"Scores start at t={scores.valid_from}; window_start must be at least "
                    f"lag + {scores.valid_from} = {lag + scores.valid_from}"
                )

        graph, isolated = dataset.graph, dataset.isolated
        X = dataset.X[:, source, :]
        X_tilde = neighbor_average(graph, dataset.X, isolated)[:, source, :]
        A = dataset.A[:, source]
        A_tilde = neighbor_average(graph, dataset.A, isolated)[:, source]

        local = [("alpha0", np.ones_like(A))]
        local += [(f"alpha1:{n}", X[:, :, k]) for k, n in enumerate(dataset.covariate_names)]
        neighbor = [
            (f"alpha2:{n}", X_tilde[:, :, k]) for k, n in enumerate(dataset.covariate_names)
        ]
        if traits.uses_scores:
            e = _standardized(scores.e[:, source])
            e_tilde = _standardized(scores.e_tilde[:, source])
            local += [("alpha1:e", e), ("alpha1:e^2", e**2), ("alpha1:e*e_tilde", e * e_tilde)]
            neighbor += [("alpha2:e_tilde", e_tilde), ("alpha2:e_tilde^2", e_tilde**2)]
        columns = local + neighbor + [("delta1", A), ("delta2", A_tilde)]

        n_window = source.size
        return cls(
            variant=variant,
            lag=lag,
            window_start=window_start,
            Y=dataset.Y[:, window_start - 1 :].astype(np.int64),
            regressors=np.stack([values for _, values in columns], axis=2),
            columns=tuple(name for name, _ in columns),
            structure=StcarStructure(graph, n_window, isolated),
            period_labels=tuple(dataset.period_labels[window_start - 1 :]),
        )

    @property
    def traits(self) -> VariantTraits:
        return variant_traits(self.variant)

    @property
    def shape(self) -> tuple[int, int]:
        return self.Y.shape

    @property
    def n_coefficients(self) -> int:
        return len(self.columns)

    @cached_property
    def log_factorial(self) -> np.ndarray:
        return gammaln(self.Y + 1.0)

    @cached_property
    def flat_regressors(self) -> np.ndarray:
        return self.regressors.reshape(-1, self.n_coefficients)

    def linear_predictor(self, coefficients: np.ndarray) -> np.ndarray:
        return self.regressors @ coefficients

    def scalar_names(self) -> tuple[str, ...]:
        """Column order of retained scalar draws."""
        names = [*self.columns, "sigma2", "tau2"]
        if self.traits.has_nugget:
            names += ["sigma_v2", "mu_v"]
        return (*names, "rho_s", "rho_t")


@dataclass
class ModelParams:
    """One point in parameter space; latents are J x T_w."""

    coefficients: np.ndarray
    sigma2: float
    tau2: float
    rho_s: float
    rho_t: float
    theta: np.ndarray
    g: np.ndarray
    sigma_v2: float = 1.0
    mu_v: float = 0.0
    v_tilde: np.ndarray | None = None
    columns: tuple[str, ...] = field(default=(), repr=False)

    def copy(self) -> ModelParams:
        return replace(
            self,
            coefficients=self.coefficients.copy(),
            theta=self.theta.copy(),
            g=self.g.copy(),
            v_tilde=None if self.v_tilde is None else self.v_tilde.copy(),
        )

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.columns.index(name)])

    def group(self, prefix: str) -> np.ndarray:
        return np.array(
            [c for c, n in zip(self.coefficients, self.columns) if n.startswith(prefix)]
        )

    @property
    def alpha0(self) -> float:
        return self.coefficient("alpha0")

    @property
    def alpha1(self) -> np.ndarray:
        return self.group("alpha1:")

    @property
    def alpha2(self) -> np.ndarray:
        return self.group("alpha2:")

    @property
    def delta1(self) -> float:
        return self.coefficient("delta1")

    @property
    def delta2(self) -> float:
        return self.coefficient("delta2")

    def scalars(self, design: ModelDesign) -> np.ndarray:
        values = [*self.coefficients, self.sigma2, self.tau2]
        if design.traits.has_nugget:
            values += [self.sigma_v2, self.mu_v]
        return np.array([*values, self.rho_s, self.rho_t], dtype=float)


def log_rate(
    main: np.ndarray, v_tilde: np.ndarray | None, clamp: float = DEFAULT_CLAMP
) -> tuple[np.ndarray, int]:
    """log(exp(main) + exp(v~)) with the main exponent clipped to +-clamp.

    Returns the log rate and the number of clipped cells.
    """
    clipped = np.clip(main, -clamp, clamp)
    n_clamped = int(np.count_nonzero(clipped != main))
    if v_tilde is None:
        return clipped, n_clamped
    return np.logaddexp(clipped, v_tilde), n_clamped


def poisson_log_mass(y: np.ndarray, log_mu: np.ndarray, log_factorial: np.ndarray) -> np.ndarray:
    return y * log_mu - np.exp(log_mu) - log_factorial


def main_exponent(params: ModelParams, design: ModelDesign) -> np.ndarray:
    return params.g + design.linear_predictor(params.coefficients) + params.theta


def log_likelihood(
    params: ModelParams, design: ModelDesign, clamp: float = DEFAULT_CLAMP
) -> float:
    """Sum of Poisson log masses over the fit window."""
    v_tilde = params.v_tilde if design.traits.has_nugget else None
    log_mu, _ = log_rate(main_exponent(params, design), v_tilde, clamp)
    return float(np.sum(poisson_log_mass(design.Y, log_mu, design.log_factorial)))


def _invgamma_logpdf(x: float) -> float:
    return float(stats.invgamma.logpdf(x, a=PRIOR_IG_SHAPE, scale=PRIOR_IG_SCALE))


def log_prior_components(params: ModelParams, design: ModelDesign) -> dict[str, float]:
    """Per-term log prior, including the latent-field densities.

    Any term outside its support is -inf and the latent terms that depend on
    it are not evaluated.
    """
    traits = design.traits
    components: dict[str, float] = {
        "regression": float(np.sum(stats.norm.logpdf(params.coefficients, 0.0, PRIOR_SD))),
    }
    variances = {"sigma2": params.sigma2, "tau2": params.tau2}
    if traits.has_nugget:
        variances["sigma_v2"] = params.sigma_v2
    for name, value in variances.items():
        components[name] = _invgamma_logpdf(value) if value > 0 else -np.inf
    if traits.has_nugget:
        components["mu_v"] = float(stats.norm.logpdf(params.mu_v, 0.0, PRIOR_SD))

    components["rho_t"] = 0.0 if 0.0 < params.rho_t < 1.0 else -np.inf
    if traits.spatial:
        components["rho_s"] = 0.0 if 0.0 < params.rho_s < 1.0 else -np.inf
    else:
        # rho_s is pinned to zero rather than sampled.
        components["rho_s"] = 0.0 if params.rho_s == 0.0 else -np.inf

    if not np.all(np.isfinite(list(components.values()))):
        return components

    stcar = StcarParams(sigma=np.sqrt(params.sigma2), rho_s=params.rho_s, rho_t=params.rho_t)
    components["theta"] = design.structure.log_density(params.theta, stcar)
    components["g"] = float(np.sum(stats.norm.logpdf(params.g, 0.0, np.sqrt(params.tau2))))
    if traits.has_nugget:
        components["v_tilde"] = float(
            np.sum(stats.norm.logpdf(params.v_tilde, params.mu_v, np.sqrt(params.sigma_v2)))
        )
    return components


def log_prior(params: ModelParams, design: ModelDesign) -> float:
    return float(sum(log_prior_components(params, design).values()))


def log_posterior(
    params: ModelParams, design: ModelDesign, clamp: float = DEFAULT_CLAMP
) -> float:
    prior = log_prior(params, design)
    if not np.isfinite(prior):
        return -np.inf
    return log_likelihood(params, design, clamp) + prior
