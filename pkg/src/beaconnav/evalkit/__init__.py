from .events import EVENT_KINDS, System, TrialEvent, parse_event_line, read_event_log, write_event_log
from .metrics import StageMetrics, SusResponse, compute_stage_metrics, sus_score
from .report import Report, StatLine, compare_systems, group_stage_metrics, parse_sus_csv
from .stats import shapiro_wilk, wilcoxon_signed_rank

__all__ = [
    "EVENT_KINDS",
    "System",
    "TrialEvent",
    "parse_event_line",
    "read_event_log",
    "write_event_log",
    "StageMetrics",
    "SusResponse",
    "compute_stage_metrics",
    "sus_score",
    "Report",
    "StatLine",
    "compare_systems",
    "group_stage_metrics",
    "parse_sus_csv",
    "shapiro_wilk",
    "wilcoxon_signed_rank",
]
