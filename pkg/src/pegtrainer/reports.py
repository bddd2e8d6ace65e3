"""Canonical report documents.

Reports serialize to JSON with a fixed key order, compact separators, and
all reals formatted as 6-decimal fixed point, so identical inputs produce
byte-identical documents and round trips are stable: serialize, parse,
serialize again gives the same bytes. No wall-clock or host-specific fields
are ever included.
"""

from __future__ import annotations

import json
from pathlib import Path

from .trial import SessionReport, TrialReport


def _render(value, out: list) -> None:
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format(value, ".6f"))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, dict):
        out.append("{")
        for i, (key, item) in enumerate(value.items()):
            if not isinstance(key, str):
                raise TypeError(f"document keys must be strings, got {key!r}")
            if i:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _render(item, out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _render(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(value) -> str:
    """Deterministic JSON: insertion-ordered keys, 6-decimal reals, compact."""
    out: list = []
    _render(value, out)
    return "".join(out)


def trial_report_to_doc(report: TrialReport) -> dict:
    return {
        "kind": "trial_report",
        "trial_id": report.trial_id,
        "duration_s": float(report.duration_s),
        "transfers": report.transfers,
        "drops": report.drops,
        "avg_transfer_time_s": (
            None if report.avg_transfer_time_s is None
            else float(report.avg_transfer_time_s)
        ),
        "total_path_length_m": float(report.total_path_length_m),
        "path_length_by_instrument": {
            str(iid): float(length)
            for iid, length in sorted(report.path_length_by_instrument.items())
        },
        "truncated": report.truncated,
        "events": [
            {"t_us": e.t_us, "kind": e.kind, "data": dict(e.data)}
            for e in report.events
        ],
    }


def session_report_to_doc(report: SessionReport) -> dict:
    return {
        "kind": "session_report",
        "protocol": {
            "familiarization_s": float(report.protocol.familiarization_s),
            "trial_s": float(report.protocol.trial_s),
            "trials": report.protocol.trials,
            "break_s": float(report.protocol.break_s),
        },
        "trials": [trial_report_to_doc(t) for t in report.trials],
        "transfer_improvement_pct": [
            None if v is None else float(v) for v in report.transfer_improvement_pct
        ],
        "drop_improvement_pct": [
            None if v is None else float(v) for v in report.drop_improvement_pct
        ],
    }


def render_report(report: TrialReport | SessionReport) -> str:
    if isinstance(report, TrialReport):
        doc = trial_report_to_doc(report)
    elif isinstance(report, SessionReport):
        doc = session_report_to_doc(report)
    else:
        raise TypeError(f"not a report: {type(report).__name__}")
    return canonical_json(doc) + "\n"


def write_report(report: TrialReport | SessionReport, path) -> None:
    Path(path).write_text(render_report(report))


def parse_report(text: str) -> dict:
    return json.loads(text)
