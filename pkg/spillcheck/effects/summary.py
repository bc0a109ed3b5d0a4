"""Posterior summaries and the percent-change effect scale.

Quantiles use linear interpolation between order statistics (numpy's
default "linear" method). Effects are transformed draw by draw and the
transformed draws are summarised, never the other way round.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from spillcheck.inference.samples import PosteriorSamples
from spillcheck.models.profiles import VARIANT_ORDER, ModelVariant
from spillcheck.models.results import EffectSummary, LagEffectRow, ParameterSummary

# Interventions are scored in units of this many percentage points of mobility.
DEFAULT_EFFECT_SCALE = 50.0

_QUANTILES = (0.025, 0.05, 0.5, 0.95, 0.975)


def effect_transform(delta, scale: float = DEFAULT_EFFECT_SCALE):
    """Expected percent change in cases, 100 (exp(scale * delta) - 1)."""
    result = 100.0 * np.expm1(scale * np.asarray(delta, dtype=float))
    return float(result) if np.ndim(result) == 0 else result


def summarize_draws(name: str, values: np.ndarray) -> ParameterSummary:
    """Mean, median and central 90%/95% intervals of one chain."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError(f"Need at least 2 draws to summarise '{name}', got {values.size}")
    q025, q05, q50, q95, q975 = np.quantile(values, _QUANTILES, method="linear")
    return ParameterSummary(
        name=name,
        mean=float(values.mean()),
        median=float(q50),
        lower90=float(q05),
        upper90=float(q95),
        lower95=float(q025),
        upper95=float(q975),
    )


def summarize(
    samples: PosteriorSamples,
    scale: float = DEFAULT_EFFECT_SCALE,
    lag: int | None = None,
) -> EffectSummary:
    """Summaries of every retained scalar plus delta1/delta2 on the percent scale."""
    if samples.n_draws < 2:
        raise ValueError(f"Need at least 2 retained draws, got {samples.n_draws}")
    parameters = {name: summarize_draws(name, samples.column(name)) for name in samples.names}
    effects = {
        name: summarize_draws(name, effect_transform(samples.column(name), scale))
        for name in ("delta1", "delta2")
        if name in samples.names
    }
    return EffectSummary(
        variant=samples.variant,
        lag=samples.config.lag if lag is None else lag,
        n_draws=samples.n_draws,
        scale=scale,
        parameters=parameters,
        effects=effects,
    )


def lag_effect_rows(
    summaries: Mapping[tuple[int, ModelVariant], EffectSummary],
) -> list[LagEffectRow]:
    """Percent-scale effects per (lag, variant), ordered by lag then variant."""
    keys = sorted(summaries, key=lambda k: (k[0], VARIANT_ORDER.index(k[1])))
    return [
        LagEffectRow(
            lag=lag,
            variant=variant,
            direct=summaries[(lag, variant)].effects["delta1"],
            indirect=summaries[(lag, variant)].effects["delta2"],
        )
        for lag, variant in keys
    ]


def coefficient_rows(summary: EffectSummary) -> list[ParameterSummary]:
    """Regression coefficients then hyperparameters, in sampling order."""
    return list(summary.parameters.values())
