"""Tests for the Rich report formatter.

Checks that each rendering carries the sections and values of the data
it was given, and leaves out sections with nothing to show.
"""

from spillcheck.diagnostics import DiagnosticWarning
from spillcheck.effects import coverage_and_bias, lag_effect_rows, summarize
from spillcheck.models.profiles import ModelVariant
from spillcheck.models.results import RunRecord, StudyMetrics, StudyResult
from spillcheck.report.formatter import format_lag_effects, format_study, format_summary
from tests.spillcheck.conftest import make_parameter_summary, make_samples


def _study_result(failed: bool = False) -> StudyResult:
    row = coverage_and_bias(
        [make_parameter_summary(median=0.1), make_parameter_summary(median=0.3)],
        0.2,
        scenario="4",
        variant=ModelVariant.NO_PS,
    )
    record = RunRecord(
        key="k" * 64,
        scenario="4",
        replicate=7,
        variant=ModelVariant.NO_PS,
        data_seed=1,
        fit_seed=2,
        status="failed" if failed else "ok",
        error="SamplerInitError: Log posterior not finite" if failed else None,
    )
    return StudyResult(metrics=StudyMetrics(rows=[row]), records=[record])


class TestFormatSummary:
    def test_contains_all_sections(self):
        samples = make_samples()
        output = format_summary(
            summarize(samples),
            acceptance=samples.acceptance,
            clamp_count=3,
            warnings=[DiagnosticWarning("warn", "clamp", "Exponent was clamped")],
        )
        for section in ("spillcheck fit", "Run", "Effects", "Parameters", "Sampler", "Risks"):
            assert section in output

    def test_run_details(self):
        output = format_summary(summarize(make_samples(ModelVariant.NO_PS)))
        assert "No PS" in output
        assert "2 weeks" in output
        assert "200" in output

    def test_effects_on_percent_scale(self):
        summary = summarize(make_samples())
        output = format_summary(summary)
        assert "Direct" in output
        assert "Indirect" in output
        assert summary.effects["delta1"].display(95, digits=1) in output

    def test_every_parameter_listed(self):
        samples = make_samples()
        output = format_summary(summarize(samples))
        for name in samples.names:
            assert name in output

    def test_sampler_and_risks_omitted_when_empty(self):
        output = format_summary(summarize(make_samples()))
        assert "Sampler" not in output
        assert "Risks" not in output

    def test_acceptance_rates_shown(self):
        output = format_summary(summarize(make_samples()), acceptance={"theta": 0.42})
        assert "accept theta" in output
        assert "0.42" in output
        assert "Clamp events" in output

    def test_warning_category_and_message(self):
        warning = DiagnosticWarning("critical", "balance", "Scores do not balance")
        output = format_summary(summarize(make_samples()), warnings=[warning])
        assert "[balance]" in output
        assert "Scores do not balance" in output


class TestFormatLagEffects:
    def test_one_line_per_row(self):
        rows = lag_effect_rows(
            {
                (0, ModelVariant.NO_NUGGET): summarize(
                    make_samples(ModelVariant.NO_NUGGET), lag=0
                ),
                (3, ModelVariant.NO_NUGGET): summarize(
                    make_samples(ModelVariant.NO_NUGGET, seed=1), lag=3
                ),
            }
        )
        output = format_lag_effects(rows)
        assert "spillcheck sweep" in output
        assert "Direct (%)" in output
        assert output.count("No nugget") == 2
        assert rows[1].indirect.display(95, digits=1) in output


class TestFormatStudy:
    def test_metrics_table(self):
        output = format_study(_study_result())
        assert "spillcheck study" in output
        assert "1 runs, 0 failed" in output
        assert "No PS" in output
        assert "Risks" not in output

    def test_failed_runs_listed(self):
        output = format_study(_study_result(failed=True))
        assert "1 runs, 1 failed" in output
        assert "Risks" in output
        assert "replicate 7" in output
        assert "SamplerInitError" in output
