from spillcheck.models.profiles import (
    VARIANT_ORDER,
    BetaModel,
    CarParams,
    FitConfig,
    ModelVariant,
    PropensityDesign,
    RegressorTerm,
    ScenarioConfig,
    StcarParams,
    StudyPlan,
)
from spillcheck.models.results import (
    EffectSummary,
    LagEffectRow,
    MetricsRow,
    ParameterSummary,
    RunManifest,
    RunRecord,
    StudyMetrics,
    StudyResult,
)

__all__ = [
    "VARIANT_ORDER",
    "BetaModel",
    "CarParams",
    "FitConfig",
    "ModelVariant",
    "PropensityDesign",
    "RegressorTerm",
    "ScenarioConfig",
    "StcarParams",
    "StudyPlan",
    "EffectSummary",
    "LagEffectRow",
    "MetricsRow",
    "ParameterSummary",
    "RunManifest",
    "RunRecord",
    "StudyMetrics",
    "StudyResult",
]
