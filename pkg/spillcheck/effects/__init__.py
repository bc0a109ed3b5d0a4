from spillcheck.effects.metrics import coverage_and_bias
from spillcheck.effects.summary import (
    DEFAULT_EFFECT_SCALE,
    coefficient_rows,
    effect_transform,
    lag_effect_rows,
    summarize,
    summarize_draws,
)

__all__ = [
    "DEFAULT_EFFECT_SCALE",
    "coefficient_rows",
    "coverage_and_bias",
    "effect_transform",
    "lag_effect_rows",
    "summarize",
    "summarize_draws",
]
