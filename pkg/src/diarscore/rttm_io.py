"""RTTM parsing/serialization and score-report formatting (json/csv/text).

Parsing is strict and byte-deterministic: exactly 10 whitespace-separated
fields, SPEAKER records only, decimal-point times converted to integer
milliseconds with round-half-away-from-zero.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass

from .cder import CderReport
from .der import DerReport
from .timeline import (
    Annotation,
    SameSpeakerOverlap,
    Segment,
    Turn,
    ms_from_decimal_seconds,
    ms_to_seconds_str,
)

NA = "<NA>"


class MalformedLine(ValueError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class EmptyReport(ValueError):
    pass


@dataclass(frozen=True)
class RttmRecord:
    file_id: str
    channel: str
    onset_ms: int
    duration_ms: int
    speaker: str
    line_no: int


def parse_rttm_records(text: str | bytes) -> list[RttmRecord]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    records: list[RttmRecord] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith((";", "#")):
            continue
        fields = line.split()
        if len(fields) != 10:
            raise MalformedLine(line_no, f"expected 10 fields, got {len(fields)}")
        rec_type, file_id, channel, onset_s, dur_s, _, _, speaker, _, _ = fields
        if rec_type != "SPEAKER":
            raise MalformedLine(line_no, f"unsupported record type {rec_type!r}")
        try:
            onset_ms = ms_from_decimal_seconds(onset_s)
            duration_ms = ms_from_decimal_seconds(dur_s)
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc)) from exc
        if duration_ms <= 0:
            raise MalformedLine(line_no, f"non-positive duration {dur_s!r}")
        records.append(
            RttmRecord(file_id, channel, onset_ms, duration_ms, speaker, line_no)
        )
    return records


def parse_rttm(text: str | bytes) -> list[Annotation]:
    """One canonical Annotation per file_id, in file_id order."""
    records = parse_rttm_records(text)
    grouped: dict[str, list[RttmRecord]] = {}
    for rec in records:
        grouped.setdefault(rec.file_id, []).append(rec)
    annotations = []
    for file_id in sorted(grouped):
        recs = grouped[file_id]
        # locate the offending line before delegating to Annotation
        by_speaker: dict[str, list[RttmRecord]] = {}
        for rec in recs:
            by_speaker.setdefault(rec.speaker, []).append(rec)
        for speaker, group in by_speaker.items():
            group_sorted = sorted(group, key=lambda r: (r.onset_ms, r.line_no))
            prev_end = None
            for rec in group_sorted:
                if prev_end is not None and rec.onset_ms < prev_end:
                    raise SameSpeakerOverlap(file_id, speaker, rec.line_no)
                prev_end = rec.onset_ms + rec.duration_ms
        turns = [
            Turn(r.speaker, Segment(r.onset_ms, r.onset_ms + r.duration_ms))
            for r in recs
        ]
        annotations.append(Annotation(file_id, turns))
    return annotations


def write_rttm(anns: list[Annotation]) -> str:
    lines = []
    rows = []
    for ann in anns:
        for t in ann.turns:
            rows.append((ann.recording_id, t.start, t.speaker, t.end))
    rows.sort()
    for file_id, start, speaker, end in rows:
        lines.append(
            f"SPEAKER {file_id} 1 {ms_to_seconds_str(start)} "
            f"{ms_to_seconds_str(end - start)} {NA} {NA} {speaker} {NA} {NA}"
        )
    return "".join(line + "\n" for line in lines)


@dataclass
class ReportEntry:
    recording_id: str
    der: DerReport | None = None
    cder: CderReport | None = None
    cder_undefined: bool = False
    cder_macro: float | None = None  # aggregates only


CSV_COLUMNS = (
    "recording_id",
    "der",
    "miss",
    "fa",
    "error",
    "total",
    "cder",
    "n_error",
    "n_total",
)


def _entry_values(entry: ReportEntry) -> dict[str, object]:
    values: dict[str, object] = {c: None for c in CSV_COLUMNS}
    values["recording_id"] = entry.recording_id
    if entry.der is not None:
        values["der"] = round(entry.der.der, 4)
        values["miss"] = entry.der.miss_ms
        values["fa"] = entry.der.fa_ms
        values["error"] = entry.der.error_ms
        values["total"] = entry.der.total_ms
    if entry.cder is not None:
        values["cder"] = round(entry.cder.cder, 4)
        values["n_error"] = entry.cder.n_error
        values["n_total"] = entry.cder.n_total
    return values


def _csv_cell(column: str, value: object) -> str:
    if value is None:
        return ""
    if column in ("miss", "fa", "error", "total"):
        return ms_to_seconds_str(int(value))
    if column in ("der", "cder"):
        return f"{value:.4f}"
    return str(value)


def write_report(
    per_file: list[ReportEntry],
    overall: ReportEntry | None,
    fmt: str = "text",
) -> str:
    """Deterministic report: per-recording rows sorted by id plus OVERALL."""
    entries = sorted(per_file, key=lambda e: e.recording_id)
    if overall is not None:
        overall = ReportEntry(
            recording_id="OVERALL",
            der=overall.der,
            cder=overall.cder,
            cder_undefined=overall.cder_undefined,
            cder_macro=overall.cder_macro,
        )
        entries = entries + [overall]
    if not entries:
        raise EmptyReport("no reports to write")

    if fmt == "csv":
        out = io.StringIO()
        out.write(",".join(CSV_COLUMNS) + "\n")
        for e in entries:
            values = _entry_values(e)
            out.write(",".join(_csv_cell(c, values[c]) for c in CSV_COLUMNS) + "\n")
        return out.getvalue()

    if fmt == "json":
        def jsonify(e: ReportEntry) -> dict:
            values = _entry_values(e)
            obj = {
                c: (
                    None
                    if values[c] is None
                    else float(ms_to_seconds_str(int(values[c])))
                    if c in ("miss", "fa", "error", "total")
                    else values[c]
                )
                for c in CSV_COLUMNS
            }
            if e.cder_undefined:
                obj["cder_undefined"] = True
            if e.cder_macro is not None:
                obj["cder_macro"] = round(e.cder_macro, 4)
            return obj

        payload = {
            "recordings": [jsonify(e) for e in entries if e.recording_id != "OVERALL"],
            "overall": next(
                (jsonify(e) for e in entries if e.recording_id == "OVERALL"), None
            ),
        }
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"

    if fmt == "text":
        header = f"{'recording':<24}{'DER':>8}{'MISS(s)':>10}{'FA(s)':>10}" \
                 f"{'ERR(s)':>10}{'TOTAL(s)':>10}{'CDER':>8}{'N_ERR':>7}{'N_TOT':>7}"
        lines = [header, "-" * len(header)]
        for e in entries:
            values = _entry_values(e)
            der = f"{values['der']:.4f}" if values["der"] is not None else "-"
            cder = (
                "undef"
                if e.cder_undefined
                else f"{values['cder']:.4f}"
                if values["cder"] is not None
                else "-"
            )
            def dur(col):
                return ms_to_seconds_str(int(values[col])) if values[col] is not None else "-"
            n_err = values["n_error"] if values["n_error"] is not None else "-"
            n_tot = values["n_total"] if values["n_total"] is not None else "-"
            lines.append(
                f"{e.recording_id:<24}{der:>8}{dur('miss'):>10}{dur('fa'):>10}"
                f"{dur('error'):>10}{dur('total'):>10}{cder:>8}{n_err!s:>7}{n_tot!s:>7}"
            )
            if e.recording_id == "OVERALL" and e.cder_macro is not None:
                lines.append(f"{'(macro CDER)':<24}{'':>8}{'':>40}{e.cder_macro:>8.4f}")
        return "".join(line + "\n" for line in lines)

    raise ValueError(f"unknown report format {fmt!r}")
