"""Bias and interval coverage over simulation replicates."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from spillcheck.models.profiles import ModelVariant
from spillcheck.models.results import MetricsRow, ParameterSummary


def coverage_and_bias(
    summaries: Sequence[ParameterSummary],
    truth: float,
    level: int = 90,
    scenario: str = "",
    variant: ModelVariant = ModelVariant.FULL,
    effect: str = "direct",
) -> MetricsRow:
    """Score replicate posterior medians and intervals against the true value.

    Bias and its standard error are multiplied by 100; coverage is a
    percentage with a binomial standard error. With a single replicate the
    standard errors are undefined and reported as NaN.
    """
    if not summaries:
        raise ValueError("coverage_and_bias needs at least one replicate summary")
    estimates = np.array([s.median for s in summaries])
    intervals = np.array([s.interval(level) for s in summaries])
    covered = (intervals[:, 0] <= truth) & (truth <= intervals[:, 1])

    n = len(summaries)
    errors = estimates - truth
    coverage = float(np.mean(covered))
    if n > 1:
        bias_se = float(np.std(errors, ddof=1) / np.sqrt(n) * 100)
        coverage_se = float(np.sqrt(coverage * (1 - coverage) / n) * 100)
    else:
        bias_se = coverage_se = float("nan")
    return MetricsRow(
        scenario=scenario,
        variant=variant,
        effect=effect,
        level=level,
        bias=float(np.mean(errors) * 100),
        bias_se=bias_se,
        coverage=coverage * 100,
        coverage_se=coverage_se,
        n=n,
    )
