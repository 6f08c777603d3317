"""Episode logs, safety metrics, suite running, and report files.

Suite and report symbols load lazily: the episode runner depends on the
log types, and the suite depends on the runner, so eager re-exports
here would close an import cycle.
"""

import importlib

from .log import (
    TERMINATIONS,
    EpisodeLog,
    StepRecord,
    read_episode_jsonl,
    write_episode_jsonl,
)
from .metrics import (
    MetricSet,
    compute_cr,
    compute_dr,
    compute_or,
    compute_rc,
    episode_metrics,
)

_LAZY = {
    "SuiteResult": ".suite",
    "aggregate_rows": ".suite",
    "build_ego_controller": ".suite",
    "episode_rng": ".suite",
    "episode_row": ".suite",
    "run_scenario": ".suite",
    "run_suite": ".suite",
    "CSV_COLUMNS": ".report",
    "REPORT_SCHEMA_VERSION": ".report",
    "csv_to_rows": ".report",
    "merge_reports": ".report",
    "read_report_rows": ".report",
    "report_payload": ".report",
    "rows_to_csv": ".report",
    "write_report": ".report",
}

__all__ = [
    "EpisodeLog",
    "MetricSet",
    "StepRecord",
    "TERMINATIONS",
    "compute_cr",
    "compute_dr",
    "compute_or",
    "compute_rc",
    "episode_metrics",
    "read_episode_jsonl",
    "write_episode_jsonl",
    *sorted(_LAZY),
]


def __getattr__(name):
    if name in _LAZY:
        module = importlib.import_module(_LAZY[name], __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
