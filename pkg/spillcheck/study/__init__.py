from spillcheck.study.catalog import get_scenario, list_scenarios, resolve_scenario_key
from spillcheck.study.harness import (
    MAX_FAILED_FRACTION,
    RunTask,
    aggregate,
    emit_report,
    execute_task,
    fit_seed,
    plan_tasks,
    run_study,
)

__all__ = [
    "MAX_FAILED_FRACTION",
    "RunTask",
    "aggregate",
    "emit_report",
    "execute_task",
    "fit_seed",
    "get_scenario",
    "list_scenarios",
    "plan_tasks",
    "resolve_scenario_key",
    "run_study",
]
