"""Tests for the spillcheck public Python API.

Each pipeline stage is run on a tiny panel with short chains; the checks
are on what lands on disk and on the returned objects, not on estimates.
"""

import json
from unittest.mock import patch

import pandas as pd
import pytest

from spillcheck import api
from spillcheck.epidemic import PanelDataset
from spillcheck.inference import PosteriorSamples
from spillcheck.models.profiles import FitConfig, ModelVariant, StudyPlan
from tests.spillcheck.conftest import (
    FIXTURE_END,
    FIXTURE_START,
    make_county_tables,
    make_fast_fit_config,
    make_samples,
    make_small_scenario,
)


def _manifest(directory) -> dict:
    return json.loads((directory / "manifest.json").read_text(encoding="utf-8"))


@pytest.fixture
def dataset_dir(tmp_path):
    out = tmp_path / "data"
    api.simulate(make_small_scenario(rows=3, cols=3, periods=10, seed=1), out)
    return out


class TestSimulate:
    def test_writes_panel_truth_and_manifest(self, dataset_dir):
        for name in ("Y.csv", "A.csv", "N.csv", "graph.txt", "panel.json", "truth.json"):
            assert (dataset_dir / name).exists()
        manifest = _manifest(dataset_dir)
        assert manifest["command"] == "simulate"
        assert manifest["seed"] == 1
        assert "spillcheck" in manifest["versions"]

    def test_round_trips_through_load(self, dataset_dir):
        ds = PanelDataset.load(dataset_dir)
        assert ds.Y.shape == (9, 10)
        assert ds.truth is not None

    def test_seed_override(self, tmp_path):
        first = api.simulate(make_small_scenario(), tmp_path / "a", seed=5)
        second = api.simulate(make_small_scenario(seed=5), tmp_path / "b")
        assert _manifest(tmp_path / "a")["seed"] == 5
        assert (first.Y == second.Y).all()

    def test_config_file(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text("rows = 2\ncols = 3\nperiods = 6\nseed = 4\n", encoding="utf-8")
        dataset = api.simulate(path, tmp_path / "data")
        assert (dataset.n_regions, dataset.periods) == (6, 6)


class TestFit:
    def test_writes_samples_and_scores(self, dataset_dir):
        samples, warnings = api.fit(dataset_dir, "no-nugget", config=make_fast_fit_config())
        out = dataset_dir / "fit-no-nugget"
        assert samples.variant is ModelVariant.NO_NUGGET
        assert samples.n_draws == 200
        for name in ("draws.csv", "manifest.json", "e.csv", "e_tilde.csv"):
            assert (out / name).exists()
        assert PosteriorSamples.load(out).names == samples.names
        assert all(w.category in {"acceptance", "clamp", "balance"} for w in warnings)

    def test_default_config_starts_after_design_lags(self, dataset_dir, tmp_path):
        captured = {}

        def fake_fit(dataset, scores, variant, config):
            captured["config"] = config
            return make_samples(variant)

        with patch("spillcheck.api.fit_variant", side_effect=fake_fit):
            api.fit(dataset_dir, "full", out_dir=tmp_path / "fit")
        config = captured["config"]
        assert config.iterations == FitConfig().iterations
        assert config.window_start == 5
        assert (tmp_path / "fit" / "draws.csv").exists()

    def test_unknown_variant(self, dataset_dir):
        with pytest.raises(KeyError, match="Unknown model variant 'banana'"):
            api.fit(dataset_dir, "banana", config=make_fast_fit_config())

    def test_missing_dataset(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="Dataset directory not found"):
            api.fit(tmp_path / "nowhere", "full", config=make_fast_fit_config())


class TestSummarize:
    def test_summary_files(self, tmp_path):
        make_samples().save(tmp_path / "fit")
        report = api.summarize(tmp_path / "fit")
        assert report.summary.n_draws == 200
        assert report.warnings == []
        assert (tmp_path / "fit" / "summary.json").exists()
        coefficients = pd.read_csv(tmp_path / "fit" / "coefficients.csv")
        assert coefficients["parameter"].tolist()[:3] == ["alpha0", "delta1", "delta2"]

    def test_scale(self, tmp_path):
        make_samples().save(tmp_path / "fit")
        small = api.summarize(tmp_path / "fit", scale=1.0).summary
        large = api.summarize(tmp_path / "fit", scale=50.0).summary
        assert small.scale == 1.0
        assert small.effects["delta1"].median < large.effects["delta1"].median

    def test_missing_samples(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="Samples file not found"):
            api.summarize(tmp_path)


class TestStudy:
    def test_metrics_and_manifest(self, tmp_path):
        plan = StudyPlan(
            scenarios=["1"],
            replicates=1,
            variants=[ModelVariant.FULL],
            rows=3,
            cols=3,
            periods=10,
            fit=make_fast_fit_config(iterations=150, burn_in=50),
            output_dir=str(tmp_path / "study"),
        )
        result = api.study(plan)
        assert result.failed == []
        assert (tmp_path / "study" / "metrics.csv").exists()
        assert _manifest(tmp_path / "study")["command"] == "study"


class TestIngestAndSweep:
    @pytest.fixture
    def county_dir(self, tmp_path):
        paths = make_county_tables(tmp_path / "raw")
        out = tmp_path / "counties"
        api.ingest(out, **paths, start_date=FIXTURE_START, end_date=FIXTURE_END)
        return out

    def test_ingest_writes_loadable_panel(self, county_dir):
        ds = PanelDataset.load(county_dir)
        assert ds.Y.shape == (5, 12)
        assert ds.region_ids[0] == "01001"
        assert ds.covariate_names == ("pm25", "density")
        extra = _manifest(county_dir)["extra"]
        assert extra["imputed_cells"] == 1
        assert extra["case_clamps"] == 1

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_sweep_writes_lag_table(self, county_dir):
        rows = api.sweep(county_dir, lags=[0], variants=["no-nugget"], iterations=150)
        assert [(r.lag, r.variant) for r in rows] == [(0, ModelVariant.NO_NUGGET)]
        table = pd.read_csv(county_dir / "sweep" / "lag_effects.csv")
        assert table["lag"].tolist() == [0]
        assert _manifest(county_dir / "sweep")["config"]["window_starts"] == {"0": 8}
