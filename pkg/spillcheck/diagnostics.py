"""Health checks for fitted chains and estimated propensity scores.

These catch problems that do not stop a run but make its output
suspect: poorly tuned proposals, a rate exponent that hit the clamp,
and scores that fail to balance the confounder.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from spillcheck.inference.samples import PosteriorSamples
from spillcheck.propensity.scores import BalanceStatistics

ACCEPTANCE_RANGE = (0.1, 0.6)
MIN_DRAWS = 100


@dataclass
class DiagnosticWarning:
    """A post-fit or post-score check result."""

    severity: Literal["info", "warn", "critical"]
    category: str
    message: str


def check_sampler_health(samples: PosteriorSamples) -> list[DiagnosticWarning]:
    """Run all chain checks and return warnings, possibly none.

    Args:
        samples: Retained draws with their acceptance rates and clamp count.

    Returns:
        List of warnings, may be empty.
    """
    warnings: list[DiagnosticWarning] = []
    warnings.extend(_check_acceptance(samples.acceptance))
    warnings.extend(_check_clamp(samples))
    warnings.extend(_check_draw_count(samples))
    return warnings


def _check_acceptance(acceptance: dict[str, float]) -> list[DiagnosticWarning]:
    low, high = ACCEPTANCE_RANGE
    warnings = []
    for name, rate in acceptance.items():
        if rate == 0:
            warnings.append(DiagnosticWarning(
                severity="critical",
                category="acceptance",
                message=f"No {name} proposal was accepted after burn-in; the chain is stuck.",
            ))
        elif rate < low or rate > high:
            warnings.append(DiagnosticWarning(
                severity="warn",
                category="acceptance",
                message=(
                    f"Acceptance rate for {name} is {rate:.2f}, outside "
                    f"[{low}, {high}]. Consider a longer burn-in or a different proposal scale."
                ),
            ))
    return warnings


def _check_clamp(samples: PosteriorSamples) -> list[DiagnosticWarning]:
    if samples.clamp_count == 0:
        return []
    return [DiagnosticWarning(
        severity="warn",
        category="clamp",
        message=(
            f"The log-rate exponent was clamped in {samples.clamp_count} iterations; "
            f"posterior values near those states are unreliable."
        ),
    )]


def _check_draw_count(samples: PosteriorSamples) -> list[DiagnosticWarning]:
    """Too few retained draws make the 95% interval endpoints noisy."""
    if samples.n_draws >= MIN_DRAWS:
        return []
    return [DiagnosticWarning(
        severity="info",
        category="draws",
        message=f"Only {samples.n_draws} draws retained; interval endpoints will be noisy.",
    )]


def check_balance(stats: BalanceStatistics) -> list[DiagnosticWarning]:
    """Flag scores that do not reduce the treatment-confounder correlation."""
    if stats.balanced:
        return []
    return [DiagnosticWarning(
        severity="critical",
        category="balance",
        message=(
            f"Partial correlation of treatment and confounder given the score "
            f"({stats.partial:.3f}) is not below the marginal ({stats.marginal:.3f}); "
            f"the propensity model is likely misspecified."
        ),
    )]
