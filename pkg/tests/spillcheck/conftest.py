"""Shared builders for spillcheck tests."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from spillcheck.epidemic import PanelDataset, simulate_scenario
from spillcheck.inference import PosteriorSamples
from spillcheck.models.profiles import FitConfig, ModelVariant, ScenarioConfig
from spillcheck.models.results import ParameterSummary

COUNTY_IDS = ("01001", "01003", "01005", "01007", "01009")
FIXTURE_START = "2020-03-06"
FIXTURE_END = "2020-05-28"  # 12 complete Friday-to-Thursday weeks


def make_small_scenario(**overrides) -> ScenarioConfig:
    """Base-scenario dynamics on a 4x4 grid over 12 periods."""
    settings = {"name": "tiny", "rows": 4, "cols": 4, "periods": 12, "seed": 7}
    settings.update(overrides)
    return ScenarioConfig(**settings)


def make_small_dataset(seed: int = 7, **overrides) -> PanelDataset:
    return simulate_scenario(make_small_scenario(seed=seed, **overrides))


def make_fast_fit_config(**overrides) -> FitConfig:
    """A chain short enough for unit tests: 300 iterations, 100 burn-in."""
    settings = {
        "iterations": 300,
        "burn_in": 100,
        "latent_thin": 50,
        "adapt_interval": 50,
        "lag": 2,
        "window_start": 5,
        "seed": 3,
    }
    settings.update(overrides)
    return FitConfig(**settings)


def make_parameter_summary(
    name: str = "delta1", median: float = 0.0, half_width: float = 1.0
) -> ParameterSummary:
    """Symmetric intervals around `median`; the 90% one is 0.8 times as wide."""
    return ParameterSummary(
        name=name,
        mean=median,
        median=median,
        lower90=median - 0.8 * half_width,
        upper90=median + 0.8 * half_width,
        lower95=median - half_width,
        upper95=median + half_width,
    )


def make_samples(
    variant: ModelVariant = ModelVariant.FULL,
    n_draws: int = 200,
    seed: int = 0,
    acceptance: dict[str, float] | None = None,
    clamp_count: int = 0,
) -> PosteriorSamples:
    """Synthetic draws around known values; delta1 is clearly positive, delta2 straddles 0."""
    names = ("alpha0", "delta1", "delta2", "sigma2", "tau2", "rho_s", "rho_t")
    centers = np.array([-3.0, 0.01, 0.0, 0.5, 0.2, 0.6, 0.4])
    spreads = np.array([0.1, 0.001, 0.01, 0.05, 0.02, 0.05, 0.05])
    rng = np.random.default_rng(seed)
    draws = centers + spreads * rng.standard_normal((n_draws, len(names)))
    return PosteriorSamples(
        names=names,
        draws=draws,
        variant=variant,
        config=FitConfig(iterations=n_draws + 100, burn_in=100, seed=seed),
        acceptance=acceptance
        if acceptance is not None
        else {"regression": 0.25, "theta": 0.42, "g": 0.45, "rho_s": 0.3, "rho_t": 0.35},
        clamp_count=clamp_count,
    )


def make_county_tables(directory: Path) -> dict[str, Path]:
    """Five counties on a path, with one mobility gap and one cumulative-count dip.

    Counties are chained 01001 - 01003 - 01005 - 01007 - 01009. County 01003
    has no mobility record on 2020-03-10, and on day 40 its cumulative count
    falls 4 below the previous day before recovering.
    """
    directory.mkdir(parents=True, exist_ok=True)
    days = pd.date_range("2020-03-05", FIXTURE_END, freq="D")
    rng = np.random.default_rng(11)

    case_rows, mobility_rows = [], []
    for k, county in enumerate(COUNTY_IDS, start=1):
        for d, day in enumerate(days):
            cumulative = k * d + (d * d) // 20
            if county == "01003" and d == 40:
                cumulative = k * (d - 1) + ((d - 1) ** 2) // 20 - 4
            case_rows.append(
                {"county": county, "date": day.date().isoformat(), "cumulative": cumulative}
            )

            if county == "01003" and day == pd.Timestamp("2020-03-10"):
                continue
            level = -10.0 - 2.0 * k - 0.3 * d + rng.normal(0.0, 2.0)
            mobility_rows.append(
                {
                    "county": county,
                    "date": day.date().isoformat(),
                    "retail_recreation": level,
                    "grocery_pharmacy": level,
                    "transit": level,
                    "workplace": level,
                    "residential": -level,
                }
            )

    paths = {
        "cases": directory / "cases.csv",
        "mobility": directory / "mobility.csv",
        "covariates": directory / "covariates.csv",
        "centroids": directory / "centroids.csv",
        "adjacency": directory / "adjacency.csv",
    }
    pd.DataFrame(case_rows).to_csv(paths["cases"], index=False)
    pd.DataFrame(mobility_rows).to_csv(paths["mobility"], index=False)
    pd.DataFrame(
        {
            "county": list(COUNTY_IDS),
            "population": [10_000, 25_000, 40_000, 15_000, 30_000],
            "pm25": [7.1, 8.4, 9.0, 6.2, 7.7],
            "density": [0.3, 1.2, 2.5, 0.6, 0.9],
        }
    ).to_csv(paths["covariates"], index=False)
    pd.DataFrame(
        {
            "county": list(COUNTY_IDS),
            "lat": [32.0, 32.2, 32.4, 32.6, 32.8],
            "lon": [-86.0, -86.1, -86.2, -86.3, -86.4],
        }
    ).to_csv(paths["centroids"], index=False)
    pd.DataFrame(
        {"county": list(COUNTY_IDS[:-1]), "neighbor": list(COUNTY_IDS[1:])}
    ).to_csv(paths["adjacency"], index=False)
    return paths
