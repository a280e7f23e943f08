"""
Report formatting: key: value documents written to stdout
"""
from typing import Any, Iterable, List, Tuple

from entailment.lpe import render_evidence
from entailment.resolution import format_score, render_trace
from entailment.schemas import EvalReport, EvalRow, KBStats, Method, Verdict


def format_value(value: Any) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_score(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


class ReportWriter:
    """Render verdicts and evaluation reports as key: value lines"""

    @staticmethod
    def render(entries: Iterable[Tuple[str, Any]]) -> List[str]:
        return [f"{key}: {format_value(value)}" for key, value in entries]

    @staticmethod
    def similarity(w1: str, w2: str, measure: str, score: float) -> str:
        return "\n".join(ReportWriter.render([("w1", w1), ("w2", w2), ("measure", measure), ("similarity", score)]))

    @staticmethod
    def verdict(verdict: Verdict, trace: bool = False) -> str:
        entries: List[Tuple[str, Any]] = [("method", verdict.method), ("entailed", verdict.entailed)]
        if verdict.method is Method.MRM:
            steps = len(verdict.derivation.steps) if verdict.derivation is not None else None
            entries += [("score", verdict.score), ("reason", verdict.reason)]
            entries += list(verdict.thresholds.items())
            entries.append(("steps", steps))
        else:
            entries.append(("count", int(verdict.score)))
            entries += list(verdict.thresholds.items())

        lines = ReportWriter.render(entries)
        if verdict.method is Method.LPE:
            lines += [render_evidence(evidence) for evidence in verdict.evidence]
        if trace and verdict.derivation is not None:
            lines += render_trace(verdict.derivation)
        return "\n".join(lines)

    @staticmethod
    def kb_stats(stats: KBStats) -> str:
        entries: List[Tuple[str, Any]] = [("synsets", stats.synsets), ("edges", stats.edges)]
        entries += [(f"synsets.{pos}", n) for pos, n in stats.synsets_by_pos.items()]
        entries += [(f"edges.{relation}", n) for relation, n in stats.edges_by_relation.items()]
        entries += [(f"max_depth.{pos}", depth) for pos, depth in stats.max_depth.items()]
        return "\n".join(ReportWriter.render(entries))

    @staticmethod
    def _row(row: EvalRow) -> str:
        if row.skipped:
            return f"row {row.id}: skipped ({row.error})"
        return (
            f"row {row.id}: gold={format_value(row.gold)} "
            f"mrm={format_value(row.mrm_entailed)} score={format_value(row.mrm_score)} "
            f"status={format_value(row.mrm_status)} "
            f"lpe={format_value(row.lpe_entailed)} count={format_value(row.lpe_count)}"
        )

    @staticmethod
    def evaluation(report: EvalReport) -> str:
        lines = ReportWriter.render(
            [
                ("pairs", report.pairs),
                ("skipped", report.skipped),
                ("mrm_accuracy", report.mrm_accuracy),
                ("lpe_accuracy", report.lpe_accuracy),
                ("agreement", report.agreement),
            ]
        )
        lines += [ReportWriter._row(row) for row in report.rows]
        for sweep in report.sweep:
            lines.append(
                f"sweep {sweep.parameter}={format_value(sweep.value)}: "
                f"mrm_entailed={sweep.mrm_entailed} lpe_entailed={sweep.lpe_entailed} "
                f"mrm_accuracy={format_value(sweep.mrm_accuracy)} "
                f"lpe_accuracy={format_value(sweep.lpe_accuracy)} "
                f"agreement={format_value(sweep.agreement)}"
            )
        return "\n".join(lines)
