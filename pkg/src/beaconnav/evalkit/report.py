"""Two-system comparison report: per-stage means, normality check, paired
signed-rank p-values, and the usability questionnaire summary, rendered as
deterministic CSV and an aligned text table."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..errors import DegenerateSampleError, InvalidResponseError, PairingError, SampleTooSmallError
from .events import System, TrialEvent
from .metrics import StageMetrics, SusResponse, compute_stage_metrics, sus_score
from .stats import shapiro_wilk, wilcoxon_signed_rank

SIGNIFICANCE_LEVEL = 0.05
MIN_TEST_N = 3  # below this, p-values are reported as not applicable

METRIC_NAMES = ("action_count", "navigation_count", "action_time_s")


@dataclass(frozen=True)
class StatLine:
    label: str  # "stage 1".."stage 4" or "overall"
    n: int
    mean_2d: float
    mean_mr: float
    shapiro_w: Optional[float] = None
    shapiro_p: Optional[float] = None
    wilcoxon_w: Optional[float] = None
    wilcoxon_p: Optional[float] = None

    @property
    def significant(self) -> Optional[bool]:
        if self.wilcoxon_p is None:
            return None
        return self.wilcoxon_p < SIGNIFICANCE_LEVEL


@dataclass
class Report:
    metric_tables: dict[str, list[StatLine]] = field(default_factory=dict)
    sus_overall: Optional[StatLine] = None
    sus_questions: list[StatLine] = field(default_factory=list)
    alternative: str = "two-sided"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["section", "label", "n", "mean_2d", "mean_mr",
             "shapiro_w", "shapiro_p", "wilcoxon_w", "wilcoxon_p", "significant"]
        )
        for metric in METRIC_NAMES:
            for line in self.metric_tables.get(metric, []):
                w.writerow(_csv_row(metric, line))
        if self.sus_overall is not None:
            w.writerow(_csv_row("sus", self.sus_overall))
        for line in self.sus_questions:
            w.writerow(_csv_row("sus", line))
        return buf.getvalue()

    def to_text(self) -> str:
        out: list[str] = []
        titles = {
            "action_count": "Actions before successful navigation",
            "navigation_count": "Navigations per stage",
            "action_time_s": "Action time (s)",
        }
        for metric in METRIC_NAMES:
            lines = self.metric_tables.get(metric)
            if not lines:
                continue
            out.append(titles[metric])
            out.append(_text_table(lines))
            out.append("")
        if self.sus_overall is not None or self.sus_questions:
            out.append("System usability scale")
            rows = ([self.sus_overall] if self.sus_overall else []) + self.sus_questions
            out.append(_text_table(rows))
            out.append("")
        return "\n".join(out)


def _fmt(v: Optional[float], digits: int = 4) -> str:
    return "n/a" if v is None else f"{v:.{digits}f}"


def _csv_row(section: str, line: StatLine) -> list[str]:
    sig = "n/a" if line.significant is None else ("yes" if line.significant else "no")
    return [
        section, line.label, str(line.n),
        f"{line.mean_2d:.2f}", f"{line.mean_mr:.2f}",
        _fmt(line.shapiro_w), _fmt(line.shapiro_p),
        _fmt(line.wilcoxon_w, 1), _fmt(line.wilcoxon_p), sig,
    ]


def _text_table(lines: Sequence[StatLine]) -> str:
    header = ["", "n", "2D", "MR", "SW W", "SW p", "Wilcoxon W", "p", ""]
    rows = [header]
    for ln in lines:
        mark = "" if not ln.significant else "*"
        rows.append(
            [ln.label, str(ln.n), f"{ln.mean_2d:.2f}", f"{ln.mean_mr:.2f}",
             _fmt(ln.shapiro_w), _fmt(ln.shapiro_p), _fmt(ln.wilcoxon_w, 1),
             _fmt(ln.wilcoxon_p), mark]
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.rjust(wd) if i else cell.ljust(wd) for i, (cell, wd) in enumerate(zip(row, widths)))
        for row in rows
    )


def _stat_line(label: str, a: list[float], b: list[float], alternative: str) -> StatLine:
    """Means plus paired tests; tests are n/a for tiny or degenerate data."""
    n = len(a)
    mean_a = sum(a) / n
    mean_b = sum(b) / n
    sh_w = sh_p = wx_w = wx_p = None
    if n >= MIN_TEST_N:
        diffs = [x - y for x, y in zip(a, b)]
        try:
            sh_w, sh_p = shapiro_wilk(diffs)
        except (DegenerateSampleError, SampleTooSmallError):
            pass
        try:
            wx_w, wx_p = wilcoxon_signed_rank(a, b, alternative=alternative)
        except (DegenerateSampleError, SampleTooSmallError):
            pass
    return StatLine(label, n, mean_a, mean_b, sh_w, sh_p, wx_w, wx_p)


def group_stage_metrics(
    events: Sequence[TrialEvent],
) -> dict[tuple[str, System, int], StageMetrics]:
    """Split a combined log and reduce each participant/system/stage run."""
    buckets: dict[tuple[str, System, int], list[TrialEvent]] = {}
    for ev in events:
        buckets.setdefault((ev.participant, ev.system, ev.stage), []).append(ev)
    return {key: compute_stage_metrics(evs) for key, evs in buckets.items()}


def _check_pairing(metrics: dict[tuple[str, System, int], StageMetrics]) -> list[str]:
    participants = sorted({p for p, _, _ in metrics})
    for p in participants:
        stages_2d = {st for q, sys, st in metrics if q == p and sys is System.BASELINE_2D}
        stages_mr = {st for q, sys, st in metrics if q == p and sys is System.MR}
        if stages_2d != stages_mr:
            raise PairingError(
                f"participant {p} has stages {sorted(stages_2d)} for 2d but {sorted(stages_mr)} for mr"
            )
        if not stages_2d:
            raise PairingError(f"participant {p} is missing one system entirely")
    return participants


def compare_systems(
    events: Sequence[TrialEvent],
    sus: Optional[Sequence[tuple[str, System, SusResponse]]] = None,
    alternative: str = "two-sided",
) -> Report:
    """Build the full comparison report from a combined event log and,
    optionally, questionnaire responses."""
    metrics = group_stage_metrics(events)
    participants = _check_pairing(metrics)
    stages = sorted({st for _, _, st in metrics})

    report = Report(alternative=alternative)
    extractors = {
        "action_count": lambda m: float(m.actions_before_nav),
        "navigation_count": lambda m: float(m.navigation_count),
        "action_time_s": lambda m: m.action_time,
    }
    for metric, get in extractors.items():
        lines: list[StatLine] = []
        per_participant: dict[System, dict[str, list[float]]] = {
            System.BASELINE_2D: {p: [] for p in participants},
            System.MR: {p: [] for p in participants},
        }
        for st in stages:
            a = [get(metrics[(p, System.BASELINE_2D, st)]) for p in participants
                 if (p, System.BASELINE_2D, st) in metrics]
            b = [get(metrics[(p, System.MR, st)]) for p in participants
                 if (p, System.MR, st) in metrics]
            for p in participants:
                if (p, System.BASELINE_2D, st) in metrics:
                    per_participant[System.BASELINE_2D][p].append(get(metrics[(p, System.BASELINE_2D, st)]))
                    per_participant[System.MR][p].append(get(metrics[(p, System.MR, st)]))
            lines.append(_stat_line(f"stage {st}", a, b, alternative))
        # Overall: each participant contributes the mean across stages, so
        # the test stays paired; the displayed mean equals the grand mean
        # over participant-stage samples when coverage is balanced.
        a = [sum(v) / len(v) for p in participants for v in [per_participant[System.BASELINE_2D][p]] if v]
        b = [sum(v) / len(v) for p in participants for v in [per_participant[System.MR][p]] if v]
        lines.append(_stat_line("overall", a, b, alternative))
        report.metric_tables[metric] = lines

    if sus:
        by_key: dict[tuple[str, System], SusResponse] = {}
        for participant, system, resp in sus:
            if (participant, system) in by_key:
                raise InvalidResponseError(f"duplicate questionnaire for {participant}/{system.value}")
            by_key[(participant, system)] = resp
        sus_participants = sorted({p for p, _ in by_key})
        for p in sus_participants:
            if (p, System.BASELINE_2D) not in by_key or (p, System.MR) not in by_key:
                raise PairingError(f"participant {p} is missing a questionnaire for one system")
        a = [sus_score(by_key[(p, System.BASELINE_2D)]) for p in sus_participants]
        b = [sus_score(by_key[(p, System.MR)]) for p in sus_participants]
        report.sus_overall = _stat_line("overall score", a, b, alternative)
        for q in range(10):
            qa = [float(by_key[(p, System.BASELINE_2D)].ratings[q]) for p in sus_participants]
            qb = [float(by_key[(p, System.MR)].ratings[q]) for p in sus_participants]
            report.sus_questions.append(_stat_line(f"question {q + 1}", qa, qb, alternative))
    return report


def parse_sus_csv(path: str | Path) -> list[tuple[str, System, SusResponse]]:
    """Questionnaire CSV: header then participant,system,q1..q10 rows."""
    rows: list[tuple[str, System, SusResponse]] = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or len(header) != 12 or header[0].strip().lower() != "participant":
            raise InvalidResponseError("questionnaire CSV must start with 'participant,system,q1,...,q10'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 12:
                raise InvalidResponseError(f"questionnaire CSV line {lineno}: expected 12 columns")
            try:
                system = System(row[1].strip())
                ratings = tuple(int(c) for c in row[2:])
            except ValueError as e:
                raise InvalidResponseError(f"questionnaire CSV line {lineno}: {e}") from e
            rows.append((row[0].strip(), system, SusResponse(ratings)))
    return rows
