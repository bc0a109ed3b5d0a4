"""CLI smoke tests using Typer's CliRunner.

These test the CLI wiring: flags are parsed, errors are reported with
exit code 1, and output carries the expected sections. Estimation itself
is covered by the inference and effects tests.
"""

import pytest
from typer.testing import CliRunner

from spillcheck.cli import app, parse_lags
from tests.spillcheck.conftest import FIXTURE_END, FIXTURE_START, make_county_tables

runner = CliRunner()

FAST_FIT = "iterations = 150\nburn_in = 50\nlatent_thin = 50\nadapt_interval = 50\n"


def _write(path, text: str):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def dataset_dir(tmp_path):
    scenario = _write(tmp_path / "scenario.toml", "rows = 3\ncols = 3\nperiods = 10\nseed = 1\n")
    out = tmp_path / "data"
    result = runner.invoke(app, ["simulate", scenario, str(out)])
    assert result.exit_code == 0, result.output
    return out


class TestParseLags:
    @pytest.mark.parametrize(
        "text, expected",
        [("0-3", [0, 1, 2, 3]), ("0,2,5", [0, 2, 5]), ("5,1-2", [1, 2, 5]), ("4", [4])],
    )
    def test_valid(self, text, expected):
        assert parse_lags(text) == expected

    @pytest.mark.parametrize("text", ["3-1", "a", "", "-1", "0-x"])
    def test_invalid(self, text):
        with pytest.raises(ValueError, match="Invalid lag"):
            parse_lags(text)


class TestCLIParsing:
    def test_no_arguments_shows_help(self):
        result = runner.invoke(app, [])
        assert "simulate" in result.output

    def test_fit_needs_dataset(self):
        result = runner.invoke(app, ["fit"])
        assert result.exit_code != 0

    def test_missing_config_file(self, tmp_path):
        result = runner.invoke(app, ["simulate", str(tmp_path / "absent.toml"), str(tmp_path)])
        assert result.exit_code == 1
        assert "Error" in result.output
        assert "Config file not found" in result.output

    def test_unknown_variant(self, dataset_dir):
        result = runner.invoke(app, ["fit", str(dataset_dir), "--variant", "banana"])
        assert result.exit_code == 1
        assert "banana" in result.output

    def test_bad_lags(self, tmp_path):
        result = runner.invoke(app, ["sweep", str(tmp_path), "--lags", "7-2"])
        assert result.exit_code == 1
        assert "Invalid lag range" in result.output


class TestCLIOutput:
    def test_simulate_reports_shape(self, tmp_path):
        scenario = _write(tmp_path / "s.toml", "rows = 2\ncols = 4\nperiods = 6\n")
        result = runner.invoke(app, ["simulate", scenario, str(tmp_path / "d"), "--seed", "3"])
        assert result.exit_code == 0, result.output
        assert "Wrote 8 regions x 6 periods" in result.output

    def test_fit_then_summarize(self, dataset_dir, tmp_path):
        config = _write(tmp_path / "fit.toml", FAST_FIT)
        fit_dir = tmp_path / "fit"
        result = runner.invoke(
            app, ["fit", str(dataset_dir), "--config", config, "--out", str(fit_dir)]
        )
        assert result.exit_code == 0, result.output
        for section in ("Run", "Effects", "Parameters", "Sampler"):
            assert section in result.output
        assert (fit_dir / "draws.csv").exists()

        result = runner.invoke(app, ["summarize", str(fit_dir), "--scale", "10"])
        assert result.exit_code == 0, result.output
        assert "per 10-unit" in result.output
        assert (fit_dir / "summary.json").exists()

    def test_summarize_missing_samples(self, tmp_path):
        result = runner.invoke(app, ["summarize", str(tmp_path)])
        assert result.exit_code == 1
        assert "Samples file not found" in result.output


class TestCLIStudy:
    def _plan(self, tmp_path, window_start: int) -> str:
        text = (
            'scenarios = ["1"]\nreplicates = 1\nvariants = ["full"]\n'
            "rows = 3\ncols = 3\nperiods = 10\n"
            f'output_dir = "{(tmp_path / "out").as_posix()}"\n\n'
            f"[fit]\n{FAST_FIT}window_start = {window_start}\n"
        )
        return _write(tmp_path / "plan.toml", text)

    def test_study_reports_metrics(self, tmp_path):
        result = runner.invoke(app, ["study", self._plan(tmp_path, 5)])
        assert result.exit_code == 0, result.output
        assert "1 runs, 0 failed" in result.output
        assert (tmp_path / "out" / "metrics.csv").exists()

    def test_failed_runs_exit_2(self, tmp_path):
        result = runner.invoke(app, ["study", self._plan(tmp_path, 11)])
        assert result.exit_code == 2
        assert "1 of 1 runs failed" in result.output


class TestCLICounties:
    @pytest.fixture
    def county_dir(self, tmp_path):
        paths = make_county_tables(tmp_path / "raw")
        out = tmp_path / "counties"
        args = ["ingest", str(out)]
        for name, path in paths.items():
            args += [f"--{name}", str(path)]
        args += ["--start-date", FIXTURE_START, "--end-date", FIXTURE_END]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        assert "Wrote 5 counties x 12 weeks" in result.output
        assert "1 county-days imputed, 1 case corrections clamped" in result.output
        return out

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_sweep(self, county_dir):
        result = runner.invoke(
            app, ["sweep", str(county_dir), "--lags", "0", "--iterations", "150"]
        )
        assert result.exit_code == 0, result.output
        assert "spillcheck sweep" in result.output
        assert "No nugget" in result.output
        assert (county_dir / "sweep" / "lag_effects.md").exists()
