"""Replication harness for the simulation study.

Every (scenario, replicate, variant) is an independent task: simulate the
replicate, estimate propensity scores, fit the variant, summarise. A task
is keyed by the SHA-256 of its scenario, fit settings, variant and seeds;
its record is written to `runs/<key>.json` as soon as it finishes, and a
rerun skips every task whose record already exists.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from spillcheck.diagnostics import check_sampler_health
from spillcheck.effects import coverage_and_bias, summarize
from spillcheck.epidemic import replicate_seed, simulate_scenario
from spillcheck.inference import fit
from spillcheck.models.profiles import (
    VARIANT_ORDER,
    FitConfig,
    ModelVariant,
    PropensityDesign,
    ScenarioConfig,
    StudyPlan,
)
from spillcheck.models.results import RunRecord, StudyMetrics, StudyResult
from spillcheck.propensity import estimate_scores
from spillcheck.report.tables import metrics_frame, write_table
from spillcheck.study.catalog import get_scenario, resolve_scenario_key

logger = logging.getLogger(__name__)

# Share of failed runs above which a study counts as failed.
MAX_FAILED_FRACTION = 0.05
LEVELS = (90, 95)


@dataclass(frozen=True)
class RunTask:
    scenario_key: str
    replicate: int
    variant: ModelVariant
    scenario: ScenarioConfig
    fit: FitConfig

    @property
    def key(self) -> str:
        payload = {
            "scenario_key": self.scenario_key,
            "replicate": self.replicate,
            "variant": self.variant.value,
            "scenario": self.scenario.model_dump(mode="json"),
            "fit": self.fit.model_dump(mode="json"),
        }
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def fit_seed(base_seed: int, scenario: int, replicate: int, variant: ModelVariant) -> int:
    sequence = np.random.SeedSequence(
        [base_seed, scenario, replicate, VARIANT_ORDER.index(variant)]
    )
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def plan_tasks(plan: StudyPlan) -> list[RunTask]:
    """Expand a plan into tasks, seeds fixed by (base seed, scenario, replicate[, variant])."""
    overrides = {
        name: getattr(plan, name)
        for name in ("rows", "cols", "periods")
        if getattr(plan, name) is not None
    }
    tasks = []
    for raw_key in plan.scenarios:
        key = resolve_scenario_key(raw_key)
        base = ScenarioConfig.model_validate({**get_scenario(key).model_dump(), **overrides})
        for replicate in range(plan.replicates):
            data_seed = replicate_seed(plan.base_seed, int(key), replicate)
            scenario = base.model_copy(update={"seed": data_seed})
            for variant in plan.variants:
                seed = fit_seed(plan.base_seed, int(key), replicate, variant)
                tasks.append(
                    RunTask(
                        scenario_key=key,
                        replicate=replicate,
                        variant=variant,
                        scenario=scenario,
                        fit=plan.fit.model_copy(update={"seed": seed}),
                    )
                )
    return tasks


def execute_task(task: RunTask) -> RunRecord:
    """Run one task end to end; failures are captured in the record, never raised."""
    record = RunRecord(
        key=task.key,
        scenario=task.scenario_key,
        replicate=task.replicate,
        variant=task.variant,
        data_seed=task.scenario.seed,
        fit_seed=task.fit.seed,
    )
    try:
        dataset = simulate_scenario(task.scenario)
        scores = estimate_scores(dataset, PropensityDesign.simulation())
        samples = fit(dataset, scores, task.variant, task.fit)
        summary = summarize(samples, lag=task.fit.lag)
    except Exception as exc:  # noqa: BLE001
        logger.exception(
            "Run failed: scenario %s replicate %d variant %s",
            task.scenario_key,
            task.replicate,
            task.variant.value,
        )
        error = f"{type(exc).__name__}: {exc}"
        return record.model_copy(update={"status": "failed", "error": error})

    warnings = [w.message for w in check_sampler_health(samples)]
    return record.model_copy(
        update={
            "summary": summary,
            "acceptance": samples.acceptance,
            "clamp_count": samples.clamp_count,
            "warnings": warnings,
        }
    )


def _run_and_store(task: RunTask, runs_dir: Path) -> RunRecord:
    record = execute_task(task)
    (runs_dir / f"{task.key}.json").write_text(record.model_dump_json(indent=2), encoding="utf-8")
    return record


def aggregate(records: list[RunRecord], tasks: list[RunTask]) -> StudyMetrics:
    """Bias and coverage per (scenario, variant, effect, level) over successful runs."""
    truth = {t.scenario_key: t.scenario.beta for t in tasks}
    groups: dict[tuple[str, ModelVariant], list[RunRecord]] = {}
    for record in records:
        if record.status == "ok" and record.summary is not None:
            groups.setdefault((record.scenario, record.variant), []).append(record)

    rows = []
    for (scenario, variant), members in groups.items():
        members.sort(key=lambda r: r.replicate)
        beta = truth[scenario]
        for effect, name, value in (
            ("direct", "delta1", beta.delta1),
            ("indirect", "delta2", beta.delta2),
        ):
            summaries = [r.summary.parameters[name] for r in members]
            for level in LEVELS:
                rows.append(
                    coverage_and_bias(
                        summaries,
                        value,
                        level=level,
                        scenario=scenario,
                        variant=variant,
                        effect=effect,
                    )
                )
    return StudyMetrics(rows=rows)


def emit_report(metrics: StudyMetrics, output_dir: str | Path) -> list[Path]:
    """Write metrics.csv and metrics.md, rows in scenario then variant order."""
    if not metrics.rows:
        raise ValueError("No metrics to report: every run failed or none were planned")
    return write_table(metrics_frame(metrics), Path(output_dir) / "metrics")


def run_study(plan: StudyPlan) -> StudyResult:
    """Run (or resume) a study and write its metrics tables to plan.output_dir."""
    out = Path(plan.output_dir)
    runs_dir = out / "runs"
    runs_dir.mkdir(parents=True, exist_ok=True)

    tasks = plan_tasks(plan)
    done: dict[str, RunRecord] = {}
    pending = []
    for task in tasks:
        path = runs_dir / f"{task.key}.json"
        if path.exists():
            record = RunRecord.model_validate_json(path.read_text(encoding="utf-8"))
            # Failed runs are retried.
            if record.status == "ok":
                done[task.key] = record
                continue
        pending.append(task)
    logger.info(
        "Study: %d runs planned, %d already complete, %d to run on %d jobs",
        len(tasks),
        len(done),
        len(pending),
        plan.n_jobs,
    )

    results = Parallel(n_jobs=plan.n_jobs)(
        delayed(_run_and_store)(task, runs_dir) for task in pending
    )
    for task, record in zip(pending, results):
        done[task.key] = record
        logger.info(
            "Run scenario %s replicate %d %s: %s",
            task.scenario_key,
            task.replicate,
            task.variant.value,
            record.status,
        )

    records = [done[task.key] for task in tasks]
    metrics = aggregate(records, tasks)
    result = StudyResult(metrics=metrics, records=records)
    if metrics.rows:
        emit_report(metrics, out)
    if result.failed_fraction > MAX_FAILED_FRACTION:
        logger.error(
            "%d of %d runs failed (more than %.0f%%)",
            len(result.failed),
            len(records),
            MAX_FAILED_FRACTION * 100,
        )
    return result
