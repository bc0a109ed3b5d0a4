"""Metropolis-within-Gibbs sampler for the fitted model.

One iteration updates, in order:

    regression block      joint random walk, covariance adapted from the chain
    theta                 single-site random walks, one color class at a time
    g, v~                 per-cell random walks
    variances and mu_v    exact conjugate draws
    rho_s, rho_t          random walks on the logit scale

Proposal scales adapt every `adapt_interval` iterations during burn-in and
are frozen afterwards, so retained draws come from a fixed kernel.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg
from scipy.optimize import minimize
from scipy.special import expit, logit

from spillcheck import package_versions
from spillcheck.epidemic.panel import PanelDataset
from spillcheck.graph import RHO_UPPER, greedy_coloring
from spillcheck.inference.model import (
    PRIOR_IG_SCALE,
    PRIOR_IG_SHAPE,
    PRIOR_SD,
    ModelDesign,
    ModelParams,
    log_posterior,
    log_rate,
)
from spillcheck.inference.samples import PosteriorSamples
from spillcheck.models.profiles import FitConfig, ModelVariant
from spillcheck.propensity.scores import PropensityScores

logger = logging.getLogger(__name__)

TARGET_BLOCK_ACCEPTANCE = 0.234
TARGET_SITE_ACCEPTANCE = 0.44
MAX_INIT_ATTEMPTS = 10
# Iterations of regression history needed before its empirical covariance is used.
_MIN_HISTORY = 100
# Burn-in adaptation gain never drops below this.
MIN_ADAPT_GAIN = 0.1


class SamplerInitError(RuntimeError):
    """The posterior was not finite at any of the initialisation attempts."""


def _safe_cholesky(cov: np.ndarray) -> np.ndarray:
    """Cholesky factor, adding diagonal jitter until the matrix factorises."""
    scale = float(np.mean(np.diag(cov))) or 1.0
    for jitter in (0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2):
        try:
            return np.linalg.cholesky(cov + jitter * scale * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError:
            continue
    return np.diag(np.sqrt(np.abs(np.diag(cov))) + 1e-6)


def poisson_glm_start(design: ModelDesign, clamp: float) -> tuple[np.ndarray, np.ndarray]:
    """Poisson log-linear fit of Y on the regressors alone, and its inverse Fisher information."""
    D = design.flat_regressors
    y = design.Y.ravel().astype(float)

    def objective(beta: np.ndarray) -> tuple[float, np.ndarray]:
        eta = np.clip(D @ beta, -clamp, clamp)
        mu = np.exp(eta)
        penalty = 0.5 * beta @ beta / PRIOR_SD**2
        return float(np.sum(mu - y * eta) + penalty), D.T @ (mu - y) + beta / PRIOR_SD**2

    start = np.zeros(D.shape[1])
    start[design.columns.index("alpha0")] = np.log(y.mean() + 1e-3)
    result = minimize(objective, start, jac=True, method="L-BFGS-B")
    beta = result.x
    mu = np.exp(np.clip(D @ beta, -clamp, clamp))
    information = D.T @ (D * mu[:, None]) + np.eye(D.shape[1]) / PRIOR_SD**2
    return beta, scipy.linalg.pinvh(information)


class MetropolisWithinGibbs:
    """A single chain. All randomness comes from `rng`, so a chain is seed-deterministic."""

    def __init__(self, design: ModelDesign, config: FitConfig, rng: np.random.Generator):
        self.design = design
        self.config = config
        self.rng = rng
        self.traits = design.traits
        self.structure = design.structure
        self.y = design.Y.astype(float)
        self.n_cells = self.y.size
        self.clamp = config.clamp

        n_time = design.shape[1]
        space_colors = greedy_coloring(self.structure.space)
        n_space_colors = int(space_colors.max()) + 1
        # Cells of one color never share a precision entry: same time parity and
        # non-adjacent in space, or at least two periods apart.
        cell_colors = space_colors[:, None] + n_space_colors * (np.arange(n_time)[None, :] % 2)
        self._color_cells = [
            np.flatnonzero(cell_colors.ravel() == c) for c in np.unique(cell_colors)
        ]
        self._site_base = np.outer(self.structure.space_degrees, self.structure.time_degrees)

    # ------------------------------------------------------------------
    # initialisation

    def initial_params(self, attempt: int = 0) -> ModelParams:
        design = self.design
        coefficients, self._glm_cov = poisson_glm_start(design, self.clamp)
        if attempt > 0:
            coefficients = coefficients + self.rng.normal(0.0, 0.1 * attempt, coefficients.size)
        shape = design.shape
        v_level = float(np.log(0.1 * self.y.mean() + 1e-3))
        return ModelParams(
            coefficients=coefficients,
            sigma2=0.1,
            tau2=0.1,
            rho_s=0.5 if self.traits.spatial else 0.0,
            rho_t=0.5,
            theta=np.zeros(shape),
            g=np.zeros(shape),
            sigma_v2=0.1,
            mu_v=v_level,
            v_tilde=np.full(shape, v_level) if self.traits.has_nugget else None,
            columns=design.columns,
        )

    def _start(self, initial: ModelParams | None) -> None:
        if initial is not None:
            _, self._glm_cov = poisson_glm_start(self.design, self.clamp)
            candidates = [initial.copy()]
        else:
            candidates = []
        for attempt in range(MAX_INIT_ATTEMPTS):
            params = candidates.pop() if candidates else self.initial_params(attempt)
            value = log_posterior(params, self.design, self.clamp)
            if np.isfinite(value):
                self.params = params
                break
            logger.warning(
                "Non-finite log posterior at initialisation attempt %d, re-initialising",
                attempt + 1,
            )
        else:
            raise SamplerInitError(
                f"Log posterior not finite after {MAX_INIT_ATTEMPTS} initialisation attempts"
            )

        p = self.params
        self.eta = self.design.linear_predictor(p.coefficients)
        self.main = p.g + self.eta + p.theta
        self.cell_ll = self._cell_loglik(self.main, p.v_tilde)

        n_coef = p.coefficients.size
        self._reg_log_scale = np.log(self.config.regression_scale)
        self._reg_base_cov = self._glm_cov * 2.38**2 / n_coef
        self._reg_chol = _safe_cholesky(np.exp(2 * self._reg_log_scale) * self._reg_base_cov)
        self._reg_mean = np.zeros(n_coef)
        self._reg_m2 = np.zeros((n_coef, n_coef))
        self._reg_count = 0

        shape = self.design.shape
        latent_names = ("theta", "g") + (("v_tilde",) if self.traits.has_nugget else ())
        self._log_offset = {
            name: np.full(shape, np.log(self.config.latent_scale)) for name in latent_names
        }
        self._log_scale: dict[str, np.ndarray] = {}
        self._refresh_latent_scales()
        self._rho_log_scale = dict.fromkeys(("rho_s", "rho_t"), np.log(self.config.rho_scale))
        self._window_accepts = {name: np.zeros(shape) for name in self._log_scale}
        self._window_accepts.update({"regression": 0.0, "rho_s": 0.0, "rho_t": 0.0})
        blocks = ("regression", "theta", "g", "v_tilde", "rho_s", "rho_t")
        self._kept_accepts = dict.fromkeys(blocks, 0.0)
        self._adapt_round = 0

    # ------------------------------------------------------------------
    # helpers

    def _cell_loglik(self, main: np.ndarray, v_tilde: np.ndarray | None) -> np.ndarray:
        log_mu, _ = log_rate(main, v_tilde if self.traits.has_nugget else None, self.clamp)
        return self.y * log_mu - np.exp(log_mu)

    def _site_loglik(self, cells: np.ndarray, main: np.ndarray, v_tilde: np.ndarray | None):
        y = self.y.reshape(-1)[cells]
        log_mu, _ = log_rate(main, v_tilde if self.traits.has_nugget else None, self.clamp)
        return y * log_mu - np.exp(log_mu)

    def _conditional_precision(self, name: str) -> np.ndarray:
        """Prior precision plus expected Fisher information of one latent cell."""
        p = self.params
        v_tilde = p.v_tilde if self.traits.has_nugget else None
        log_mu, _ = log_rate(self.main, v_tilde, self.clamp)
        # The component's share s of the rate gives information mu * s**2.
        component = p.v_tilde if name == "v_tilde" else np.clip(self.main, -self.clamp, self.clamp)
        information = np.exp(2 * component - log_mu)
        if name == "theta":
            return self._site_base / p.sigma2 + information
        if name == "g":
            return 1.0 / p.tau2 + information
        return 1.0 / p.sigma_v2 + information

    def _refresh_latent_scales(self) -> None:
        for name, offset in self._log_offset.items():
            self._log_scale[name] = offset - 0.5 * np.log(self._conditional_precision(name))

    def _accept(self, log_alpha):
        return np.log(self.rng.random(np.shape(log_alpha))) <= log_alpha

    def _record(self, name: str, accepted, burning: bool) -> None:
        if burning:
            self._window_accepts[name] = self._window_accepts[name] + accepted
        else:
            self._kept_accepts[name] += float(np.mean(accepted))

    # ------------------------------------------------------------------
    # updates

    def _next_regression(self, burning: bool) -> None:
        p = self.params
        proposal = p.coefficients + self._reg_chol @ self.rng.standard_normal(p.coefficients.size)
        eta_new = self.design.linear_predictor(proposal)
        main_new = self.main - self.eta + eta_new
        ll_new = self._cell_loglik(main_new, p.v_tilde)
        log_alpha = (
            ll_new.sum()
            - self.cell_ll.sum()
            - 0.5 * (proposal @ proposal - p.coefficients @ p.coefficients) / PRIOR_SD**2
        )
        accepted = bool(self._accept(log_alpha))
        if accepted:
            p.coefficients, self.eta, self.main, self.cell_ll = proposal, eta_new, main_new, ll_new
        self._record("regression", float(accepted), burning)
        if burning:
            self._track_regression(p.coefficients)

    def _track_regression(self, coefficients: np.ndarray) -> None:
        # Welford update of the running mean and scatter matrix.
        self._reg_count += 1
        delta = coefficients - self._reg_mean
        self._reg_mean += delta / self._reg_count
        self._reg_m2 += np.outer(delta, coefficients - self._reg_mean)

    def _next_theta(self, burning: bool) -> None:
        p = self.params
        theta = p.theta.reshape(-1)
        main = self.main.reshape(-1)
        cell_ll = self.cell_ll.reshape(-1)
        scale = np.exp(self._log_scale["theta"]).reshape(-1)
        base = self._site_base.reshape(-1)
        v_tilde = None if p.v_tilde is None else p.v_tilde.reshape(-1)
        accepted_all = np.zeros(self.n_cells)
        for cells in self._color_cells:
            product = self.structure.precision_product(p.theta, p.rho_s, p.rho_t).reshape(-1)
            old = theta[cells]
            mean = old - product[cells] / base[cells]
            precision = base[cells] / p.sigma2
            new = old + scale[cells] * self.rng.standard_normal(cells.size)
            main_new = main[cells] + (new - old)
            ll_new = self._site_loglik(
                cells, main_new, None if v_tilde is None else v_tilde[cells]
            )
            log_alpha = (
                ll_new
                - cell_ll[cells]
                - 0.5 * precision * ((new - mean) ** 2 - (old - mean) ** 2)
            )
            accepted = self._accept(log_alpha)
            hit = cells[accepted]
            theta[hit] = new[accepted]
            main[hit] = main_new[accepted]
            cell_ll[hit] = ll_new[accepted]
            accepted_all[cells] = accepted
        self._record("theta", accepted_all.reshape(self.design.shape), burning)

    def _next_g(self, burning: bool) -> None:
        p = self.params
        step = np.exp(self._log_scale["g"]) * self.rng.standard_normal(self.design.shape)
        new = p.g + step
        main_new = self.main + step
        ll_new = self._cell_loglik(main_new, p.v_tilde)
        log_alpha = ll_new - self.cell_ll - 0.5 * (new**2 - p.g**2) / p.tau2
        accepted = self._accept(log_alpha)
        p.g = np.where(accepted, new, p.g)
        self.main = np.where(accepted, main_new, self.main)
        self.cell_ll = np.where(accepted, ll_new, self.cell_ll)
        self._record("g", accepted.astype(float), burning)

    def _next_v_tilde(self, burning: bool) -> None:
        p = self.params
        new = p.v_tilde + np.exp(self._log_scale["v_tilde"]) * self.rng.standard_normal(
            self.design.shape
        )
        ll_new = self._cell_loglik(self.main, new)
        log_alpha = (
            ll_new
            - self.cell_ll
            - 0.5 * ((new - p.mu_v) ** 2 - (p.v_tilde - p.mu_v) ** 2) / p.sigma_v2
        )
        accepted = self._accept(log_alpha)
        p.v_tilde = np.where(accepted, new, p.v_tilde)
        self.cell_ll = np.where(accepted, ll_new, self.cell_ll)
        self._record("v_tilde", accepted.astype(float), burning)

    def _next_variances(self, parts: tuple[float, float, float, float]) -> None:
        p = self.params
        a, b, c, d = parts
        quad = a - p.rho_s * b - p.rho_t * c + p.rho_s * p.rho_t * d
        shape = PRIOR_IG_SHAPE + self.n_cells / 2
        p.sigma2 = 1.0 / self.rng.gamma(shape, 1.0 / (PRIOR_IG_SCALE + quad / 2))
        p.tau2 = 1.0 / self.rng.gamma(shape, 1.0 / (PRIOR_IG_SCALE + np.sum(p.g**2) / 2))
        if self.traits.has_nugget:
            spread = np.sum((p.v_tilde - p.mu_v) ** 2)
            p.sigma_v2 = 1.0 / self.rng.gamma(shape, 1.0 / (PRIOR_IG_SCALE + spread / 2))
            precision = 1.0 / PRIOR_SD**2 + self.n_cells / p.sigma_v2
            mean = np.sum(p.v_tilde) / p.sigma_v2 / precision
            p.mu_v = mean + self.rng.standard_normal() / np.sqrt(precision)

    def _rho_log_target(self, rho_s: float, rho_t: float, parts) -> float:
        a, b, c, d = parts
        quad = a - rho_s * b - rho_t * c + rho_s * rho_t * d
        return 0.5 * self.structure.logdet(rho_s, rho_t) - 0.5 * quad / self.params.sigma2

    def _next_rho(self, parts, burning: bool) -> None:
        p = self.params
        names = ("rho_s", "rho_t") if self.traits.spatial else ("rho_t",)
        for name in names:
            current = getattr(p, name)
            step = np.exp(self._rho_log_scale[name]) * self.rng.standard_normal()
            proposed = float(expit(logit(current) + step))
            accepted = False
            if 0.0 < proposed <= RHO_UPPER:
                trial = {"rho_s": p.rho_s, "rho_t": p.rho_t, name: proposed}
                log_alpha = (
                    self._rho_log_target(trial["rho_s"], trial["rho_t"], parts)
                    - self._rho_log_target(p.rho_s, p.rho_t, parts)
                    + np.log(proposed * (1 - proposed))
                    - np.log(current * (1 - current))
                )
                accepted = bool(self._accept(log_alpha))
                if accepted:
                    setattr(p, name, proposed)
            self._record(name, float(accepted), burning)

    # ------------------------------------------------------------------
    # adaptation

    def _adapt(self) -> None:
        self._adapt_round += 1
        gain = max(1.0 / np.sqrt(self._adapt_round), MIN_ADAPT_GAIN)
        interval = self.config.adapt_interval

        rate = self._window_accepts["regression"] / interval
        self._reg_log_scale += gain * (rate - TARGET_BLOCK_ACCEPTANCE)
        n_coef = self.params.coefficients.size
        if self._reg_count >= max(_MIN_HISTORY, 2 * n_coef):
            empirical = self._reg_m2 / (self._reg_count - 1)
            self._reg_base_cov = (empirical + 1e-10 * np.eye(n_coef)) * 2.38**2 / n_coef
        self._reg_chol = _safe_cholesky(np.exp(2 * self._reg_log_scale) * self._reg_base_cov)

        for name in self._log_offset:
            site_rate = self._window_accepts[name] / interval
            self._log_offset[name] = self._log_offset[name] + gain * (
                site_rate - TARGET_SITE_ACCEPTANCE
            )
        self._refresh_latent_scales()
        for name in ("rho_s", "rho_t"):
            rho_rate = self._window_accepts[name] / interval
            self._rho_log_scale[name] += gain * (rho_rate - TARGET_SITE_ACCEPTANCE)

        logger.debug(
            "Adaptation round %d: regression acceptance %.2f, theta %.2f",
            self._adapt_round,
            rate,
            float(np.mean(self._window_accepts["theta"])) / interval,
        )
        for name, value in self._window_accepts.items():
            self._window_accepts[name] = np.zeros_like(value) if np.ndim(value) else 0.0

    # ------------------------------------------------------------------

    def run(self, initial: ModelParams | None = None) -> PosteriorSamples:
        config, design = self.config, self.design
        self._start(initial)
        names = design.scalar_names()
        draws = np.empty((config.n_draws, len(names)))
        latent_names = ["theta", "g"] + (["v_tilde"] if self.traits.has_nugget else [])
        latent_sums = {name: np.zeros(design.shape) for name in latent_names}
        latent_draws: dict[str, list[np.ndarray]] = {name: [] for name in latent_names}
        clamp_count = 0
        kept = 0

        for iteration in range(config.iterations):
            burning = iteration < config.burn_in
            self._next_regression(burning)
            self._next_theta(burning)
            self._next_g(burning)
            if self.traits.has_nugget:
                self._next_v_tilde(burning)
            parts = self.structure.quadratic_parts(self.params.theta)
            self._next_variances(parts)
            self._next_rho(parts, burning)

            if np.any(np.abs(self.main) > self.clamp):
                clamp_count += 1
            if burning:
                if (iteration + 1) % config.adapt_interval == 0:
                    self._adapt()
                continue

            position = iteration - config.burn_in
            if position % config.thin == 0:
                draws[kept] = self.params.scalars(design)
                kept += 1
                for name in latent_names:
                    latent_sums[name] += getattr(self.params, name)
            if config.keep_latent and position % config.latent_thin == 0:
                for name in latent_names:
                    latent_draws[name].append(getattr(self.params, name).copy())

        n_kept_iterations = config.iterations - config.burn_in
        acceptance = {
            name: value / n_kept_iterations
            for name, value in self._kept_accepts.items()
            if name != "v_tilde" or self.traits.has_nugget
        }
        if not self.traits.spatial:
            acceptance.pop("rho_s")
        if clamp_count:
            logger.warning(
                "Rate exponent clamped at +-%.0f in %d of %d iterations",
                self.clamp,
                clamp_count,
                config.iterations,
            )
        return PosteriorSamples(
            names=names,
            draws=draws[:kept],
            variant=design.variant,
            config=config,
            acceptance=acceptance,
            clamp_count=clamp_count,
            latent_means={name: total / kept for name, total in latent_sums.items()},
            latent_draws={
                name: np.stack(values) for name, values in latent_draws.items() if values
            },
            period_labels=design.period_labels,
            versions=package_versions(),
        )


def fit_design(
    design: ModelDesign, config: FitConfig, initial: ModelParams | None = None
) -> PosteriorSamples:
    """Run one chain on a prepared design, seeded by config.seed."""
    logger.info(
        "Fitting %s: %d regions x %d periods, %d iterations (%d burn-in)",
        design.variant.value,
        design.shape[0],
        design.shape[1],
        config.iterations,
        config.burn_in,
    )
    chain = MetropolisWithinGibbs(design, config, np.random.default_rng(config.seed))
    samples = chain.run(initial)
    logger.info(
        "Finished %s: %d draws, acceptance %s",
        design.variant.value,
        samples.n_draws,
        ", ".join(f"{k}={v:.2f}" for k, v in samples.acceptance.items()),
    )
    return samples


def fit(
    dataset: PanelDataset,
    scores: PropensityScores | None,
    variant: ModelVariant,
    config: FitConfig,
) -> PosteriorSamples:
    """Build the variant's design over the configured window and sample its posterior."""
    design = ModelDesign.build(dataset, scores, variant, config.lag, config.window_start)
    return fit_design(design, config)
