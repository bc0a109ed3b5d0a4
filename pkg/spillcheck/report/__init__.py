from spillcheck.report.formatter import (
    format_lag_effects,
    format_study,
    format_summary,
    print_lag_effects,
    print_study,
    print_summary,
)
from spillcheck.report.tables import (
    coefficient_frame,
    lag_effect_frame,
    markdown_table,
    metrics_frame,
    sorted_metrics,
    write_table,
)

__all__ = [
    "coefficient_frame",
    "format_lag_effects",
    "format_study",
    "format_summary",
    "lag_effect_frame",
    "markdown_table",
    "metrics_frame",
    "print_lag_effects",
    "print_study",
    "print_summary",
    "sorted_metrics",
    "write_table",
]
