"""Input profiles for the spillcheck pipeline.

These models are everything a run is configured by: the random-field
parameters, the data-generating scenario, the propensity design, the
MCMC settings and the replication plan. All of them can be loaded from
TOML through spillcheck.config.
"""

from __future__ import annotations

from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Config(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CarParams(_Config):
    """CAR(sigma, rho) on a spatial graph."""

    sigma: float = Field(1.0, gt=0)
    rho: float = Field(0.9, ge=0, lt=1)


class StcarParams(_Config):
    """Separable STCAR(sigma, rho_s, rho_t)."""

    sigma: float = Field(1.0, gt=0)
    rho_s: float = Field(0.9, ge=0, lt=1)
    rho_t: float = Field(0.5, ge=0, lt=1)


class BetaModel(_Config):
    """Log-linear infection rate: log beta = a0 + X a1 + X~ a2 + A d1 + A~ d2."""

    alpha0: float = -3.0
    alpha1: list[float] = Field(default_factory=lambda: [0.5])
    alpha2: list[float] = Field(default_factory=lambda: [0.3])
    delta1: float = 0.5
    delta2: float = 0.2

    @model_validator(mode="after")
    def _same_covariate_dimension(self) -> BetaModel:
        if len(self.alpha1) != len(self.alpha2):
            raise ValueError(
                f"alpha1 and alpha2 must have the same length, got "
                f"{len(self.alpha1)} and {len(self.alpha2)}"
            )
        return self

    @property
    def n_covariates(self) -> int:
        return len(self.alpha1)


class ScenarioConfig(_Config):
    """Data-generating settings of one simulation scenario.

    Defaults are the base scenario on the full 15x15 grid.
    """

    name: str = "base"
    rows: int = Field(15, ge=1)
    cols: int = Field(15, ge=1)
    periods: int = Field(30, ge=2)
    population: float = Field(100_000.0, gt=0)
    gamma: float = Field(0.1, gt=0, le=1)
    phi: float = Field(0.4, ge=0, le=1)
    rho_s: float = Field(0.9, ge=0, lt=1)
    rho_t: float = Field(0.5, ge=0, lt=1)
    rho_x: float = Field(0.5, ge=0, le=1)
    beta: BetaModel = Field(default_factory=BetaModel)
    reporting_rate: float = Field(0.5, gt=0, le=1)
    lag: int = Field(2, ge=0)
    tau: float = Field(0.0, ge=0)
    initial_scale: float = Field(100.0, gt=0)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _lag_inside_horizon(self) -> ScenarioConfig:
        if self.lag >= self.periods:
            raise ValueError(f"lag {self.lag} must be smaller than periods {self.periods}")
        return self

    @property
    def n_regions(self) -> int:
        return self.rows * self.cols


class ModelVariant(str, Enum):
    """Approximations of the final model compared in the simulation study."""

    FULL = "full"
    NO_NUGGET = "no-nugget"
    NO_PS = "no-ps"
    NON_SPATIAL = "non-spatial"

    @property
    def label(self) -> str:
        return _VARIANT_LABELS[self]


_VARIANT_LABELS = {
    ModelVariant.FULL: "Full",
    ModelVariant.NO_NUGGET: "No nugget",
    ModelVariant.NO_PS: "No PS",
    ModelVariant.NON_SPATIAL: "Non-spatial",
}

VARIANT_ORDER: tuple[ModelVariant, ...] = (
    ModelVariant.FULL,
    ModelVariant.NO_NUGGET,
    ModelVariant.NO_PS,
    ModelVariant.NON_SPATIAL,
)


class FitConfig(_Config):
    """MCMC settings. `window_start` is the first fitted time point, 1-based."""

    iterations: int = Field(10_000, ge=1)
    burn_in: int = Field(2_000, ge=0)
    thin: int = Field(1, ge=1)
    latent_thin: int = Field(50, ge=1)
    keep_latent: bool = True
    lag: int = Field(2, ge=0)
    window_start: int = Field(5, ge=1)
    regression_scale: float = Field(1.0, gt=0)
    latent_scale: float = Field(1.0, gt=0)
    rho_scale: float = Field(0.5, gt=0)
    adapt_interval: int = Field(50, ge=10)
    clamp: float = Field(700.0, gt=0)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _burn_in_and_window(self) -> FitConfig:
        if self.burn_in >= self.iterations:
            raise ValueError(
                f"burn_in ({self.burn_in}) must be smaller than iterations ({self.iterations})"
            )
        if self.window_start <= self.lag:
            raise ValueError(
                f"window_start ({self.window_start}) must exceed the lag ({self.lag})"
            )
        return self

    @property
    def n_draws(self) -> int:
        return -(-(self.iterations - self.burn_in) // self.thin)


TermKind = Literal[
    "intercept",
    "A",
    "X",
    "Y",
    "A_tilde",
    "X_tilde",
    "Y_tilde",
    "time",
    "weeks_since_first_case",
    "time_x_A",
    "baseline_A",
]

_TILDE_KIND: dict[str, str] = {"A": "A_tilde", "X": "X_tilde", "Y": "Y_tilde"}


class RegressorTerm(_Config):
    """One regressor family of the propensity regression.

    `lag` applies to A/X/Y (and their tilde versions) and to the A factor of
    time_x_A; `degree` expands time and weeks_since_first_case into
    polynomial columns; `transform` applies to Y terms.
    """

    kind: TermKind
    lag: int = Field(0, ge=0)
    degree: int = Field(1, ge=1)
    transform: Literal["identity", "log_per_capita"] = "identity"

    def tilde(self) -> RegressorTerm:
        kind = _TILDE_KIND.get(self.kind, self.kind)
        return self.model_copy(update={"kind": kind})


class PropensityDesign(_Config):
    """Regressors of the generalized propensity score regression."""

    terms: list[RegressorTerm]
    indirect: Literal["average", "regression"] = "average"

    @model_validator(mode="after")
    def _has_intercept(self) -> PropensityDesign:
        if not any(term.kind == "intercept" for term in self.terms):
            raise ValueError("A propensity design must include an intercept term")
        return self

    @property
    def max_lag(self) -> int:
        return max(term.lag for term in self.terms)

    @classmethod
    def simulation(cls) -> PropensityDesign:
        """A(t-1), A(t-2), X(t), X(t-1), Y(t-1) plus intercept."""
        return cls(
            terms=[
                RegressorTerm(kind="intercept"),
                RegressorTerm(kind="A", lag=1),
                RegressorTerm(kind="A", lag=2),
                RegressorTerm(kind="X", lag=0),
                RegressorTerm(kind="X", lag=1),
                RegressorTerm(kind="Y", lag=1),
            ]
        )

    @classmethod
    def application(cls) -> PropensityDesign:
        """County-panel design: history, trends, time interaction, baseline and incidence."""
        return cls(
            terms=[
                RegressorTerm(kind="intercept"),
                RegressorTerm(kind="A", lag=1),
                RegressorTerm(kind="X", lag=0),
                RegressorTerm(kind="X", lag=1),
                RegressorTerm(kind="weeks_since_first_case", degree=2),
                RegressorTerm(kind="time", degree=2),
                RegressorTerm(kind="time_x_A", lag=1),
                RegressorTerm(kind="baseline_A"),
                RegressorTerm(kind="Y", lag=1, transform="log_per_capita"),
            ]
        )


class StudyPlan(_Config):
    """Which scenarios, replicates and variants to run, at what scale."""

    scenarios: list[str] = Field(default_factory=lambda: ["1", "2", "3", "4", "5", "6"])
    replicates: int = Field(100, ge=1)
    variants: list[ModelVariant] = Field(default_factory=lambda: list(VARIANT_ORDER))
    base_seed: int = Field(2021, ge=0)
    n_jobs: int = 1
    output_dir: str = "study-output"
    rows: int | None = Field(None, ge=1)
    cols: int | None = Field(None, ge=1)
    periods: int | None = Field(None, ge=2)
    fit: FitConfig = Field(default_factory=FitConfig)

    @classmethod
    def desk_scale(cls, **overrides) -> StudyPlan:
        """Scenario 1 on a 10x10 grid, 20 replicates, Full vs No PS, 4,000 iterations."""
        base = cls(
            scenarios=["1"],
            replicates=20,
            variants=[ModelVariant.FULL, ModelVariant.NO_PS],
            rows=10,
            cols=10,
            periods=30,
            fit=FitConfig(iterations=4_000, burn_in=1_000),
        )
        return base.model_copy(update=overrides)
