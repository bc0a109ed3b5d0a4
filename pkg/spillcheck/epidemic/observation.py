"""Lagged, under-reported Poisson case counts."""

from __future__ import annotations

import numpy as np


def observe(
    rate_history: np.ndarray,
    reporting_rate: float,
    tau: float,
    lag: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Y_j(t) ~ Poisson(p exp(g_j(t)) lambda_j(t - l)) with g ~ Normal(0, tau^2).

    Time is the second axis and 0-based, so the first `lag` periods have no
    source rate and are zero.
    """
    if not 0.0 < reporting_rate <= 1.0:
        raise ValueError(f"reporting rate must lie in (0, 1], got {reporting_rate}")
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    if lag < 0:
        raise ValueError(f"lag must be nonnegative, got {lag}")

    rates = np.asarray(rate_history, dtype=float)
    n_regions, periods = rates.shape
    mean = np.zeros_like(rates)
    if lag < periods:
        mean[:, lag:] = reporting_rate * rates[:, : periods - lag]
    if tau > 0:
        mean *= np.exp(rng.normal(0.0, tau, size=mean.shape))
    counts = rng.poisson(mean).astype(np.int64)
    counts[:, : min(lag, periods)] = 0
    return counts
