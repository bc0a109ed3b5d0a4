"""Output models for the spillcheck pipeline.

These models are the results behind the CLI report and the emitted
tables: posterior summaries, study metrics and per-run records.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from spillcheck.models.profiles import ModelVariant


class ParameterSummary(BaseModel):
    """Posterior summary of one scalar, on whatever scale it was computed."""

    name: str
    mean: float
    median: float
    lower90: float
    upper90: float
    lower95: float
    upper95: float

    def interval(self, level: int) -> tuple[float, float]:
        if level == 90:
            return self.lower90, self.upper90
        if level == 95:
            return self.lower95, self.upper95
        raise ValueError(f"level must be 90 or 95, got {level}")

    def significant(self, level: int = 95) -> bool:
        """True when the central interval excludes zero."""
        lower, upper = self.interval(level)
        return lower > 0 or upper < 0

    def display(self, level: int = 95, digits: int = 3) -> str:
        lower, upper = self.interval(level)
        star = " *" if self.significant(level) else ""
        return f"{self.median:.{digits}f} ({lower:.{digits}f}, {upper:.{digits}f}){star}"


class EffectSummary(BaseModel):
    """Summaries of every sampled scalar plus the transformed causal effects.

    `effects` holds delta1/delta2 on the percent scale 100*(exp(scale*delta)-1),
    transformed draw by draw.
    """

    variant: ModelVariant | None = None
    lag: int | None = None
    n_draws: int
    scale: float = 50.0
    parameters: dict[str, ParameterSummary]
    effects: dict[str, ParameterSummary] = Field(default_factory=dict)

    @property
    def direct(self) -> ParameterSummary:
        return self.parameters["delta1"]

    @property
    def indirect(self) -> ParameterSummary:
        return self.parameters["delta2"]


class LagEffectRow(BaseModel):
    """Percent-scale direct and indirect effects of one (lag, variant) fit."""

    lag: int
    variant: ModelVariant
    direct: ParameterSummary
    indirect: ParameterSummary


class MetricsRow(BaseModel):
    """Bias and interval coverage of one effect, for one scenario and variant."""

    scenario: str
    variant: ModelVariant
    effect: str  # "direct" or "indirect"
    level: int
    bias: float  # x100
    bias_se: float  # x100
    coverage: float = Field(ge=0, le=100)
    coverage_se: float
    n: int


class StudyMetrics(BaseModel):
    rows: list[MetricsRow] = Field(default_factory=list)

    def find(
        self, scenario: str, variant: ModelVariant, effect: str, level: int = 90
    ) -> MetricsRow:
        for row in self.rows:
            if (row.scenario, row.variant, row.effect, row.level) == (
                scenario,
                variant,
                effect,
                level,
            ):
                return row
        raise KeyError(f"No metrics row for scenario={scenario} variant={variant.value} {effect}")


class RunRecord(BaseModel):
    """Outcome of one (scenario, replicate, variant) fit, persisted as its manifest."""

    key: str
    scenario: str
    replicate: int
    variant: ModelVariant
    data_seed: int
    fit_seed: int
    status: str = "ok"  # "ok" or "failed"
    error: str | None = None
    summary: EffectSummary | None = None
    acceptance: dict[str, float] = Field(default_factory=dict)
    clamp_count: int = 0
    warnings: list[str] = Field(default_factory=list)


class StudyResult(BaseModel):
    metrics: StudyMetrics
    records: list[RunRecord] = Field(default_factory=list)

    @property
    def failed(self) -> list[RunRecord]:
        return [r for r in self.records if r.status != "ok"]

    @property
    def failed_fraction(self) -> float:
        if not self.records:
            return 0.0
        return len(self.failed) / len(self.records)


class RunManifest(BaseModel):
    """What produced an artifact directory: command, config, seed and versions."""

    command: str
    seed: int | None = None
    config: dict = Field(default_factory=dict)
    versions: dict[str, str] = Field(default_factory=dict)
    acceptance: dict[str, float] = Field(default_factory=dict)
    clamp_count: int = 0
    extra: dict = Field(default_factory=dict)
