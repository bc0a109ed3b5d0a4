"""Scaled-down replication checks of the simulation study.

Each test runs tens of MCMC fits and takes minutes; all are marked slow
and skipped by the default `-m 'not slow'` selection. Run them with
`pytest -m slow`.
"""

from dataclasses import replace

import numpy as np
import pytest

from spillcheck.effects import coverage_and_bias, summarize
from spillcheck.inference import ModelDesign, fit_design
from spillcheck.models.profiles import (
    FitConfig,
    ModelVariant,
    PropensityDesign,
    StcarParams,
    StudyPlan,
)
from spillcheck.propensity import estimate_scores
from spillcheck.study import run_study
from tests.spillcheck.conftest import make_small_dataset

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def desk_study(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk")
    return run_study(StudyPlan.desk_scale(output_dir=str(out), n_jobs=-1)), out


class TestDeskScaleStudy:
    """Scenario 1 on a 10x10 grid, 20 replicates, Full against No PS."""

    def test_full_variant_is_unbiased_and_calibrated(self, desk_study):
        result, _ = desk_study
        assert result.failed_fraction <= 0.05
        full = result.metrics.find("1", ModelVariant.FULL, "direct", 90)
        assert abs(full.bias) <= 5.0  # x100
        assert full.coverage >= 70.0

    def test_ignoring_scores_adds_bias(self, desk_study):
        result, _ = desk_study
        full = result.metrics.find("1", ModelVariant.FULL, "direct", 90)
        no_ps = result.metrics.find("1", ModelVariant.NO_PS, "direct", 90)
        assert abs(no_ps.bias) > abs(full.bias)

    def test_rerun_reproduces_every_byte(self, desk_study, tmp_path):
        _, first_dir = desk_study
        run_study(StudyPlan.desk_scale(output_dir=str(tmp_path), n_jobs=-1))
        for name in ("metrics.csv", "metrics.md"):
            assert (tmp_path / name).read_bytes() == (first_dir / name).read_bytes()


def test_strong_temporal_dependence_inflates_unadjusted_bias(tmp_path):
    plan = StudyPlan.desk_scale(
        scenarios=["3"], replicates=10, output_dir=str(tmp_path), n_jobs=-1
    )
    result = run_study(plan)
    full = result.metrics.find("3", ModelVariant.FULL, "direct", 90)
    no_ps = result.metrics.find("3", ModelVariant.NO_PS, "direct", 90)
    assert abs(no_ps.bias) >= 3 * abs(full.bias)


def test_intervals_cover_truth_on_model_generated_counts():
    """Counts drawn from the no-nugget model itself, with g = 0 and known theta."""
    config = FitConfig(iterations=3_000, burn_in=1_000, lag=2, window_start=5)
    truth = {"alpha0": 1.5, "delta1": 0.5, "delta2": 0.2}
    summaries = []
    for replicate in range(20):
        ds = make_small_dataset(seed=100 + replicate, rows=5, cols=5, periods=15)
        scores = estimate_scores(ds, PropensityDesign.simulation())
        design = ModelDesign.build(ds, scores, ModelVariant.NO_NUGGET, 2, 5)
        rng = np.random.default_rng(replicate)
        coefficients = np.array([truth.get(name, 0.0) for name in design.columns])
        theta = design.structure.sample(StcarParams(sigma=0.3, rho_s=0.9, rho_t=0.5), rng)
        counts = rng.poisson(np.exp(design.linear_predictor(coefficients) + theta))
        seeded = config.model_copy(update={"seed": replicate})
        samples = fit_design(replace(design, Y=counts), seeded)
        summaries.append(summarize(samples).parameters["delta1"])
    row = coverage_and_bias(summaries, truth["delta1"], level=95)
    assert row.coverage >= 90.0
