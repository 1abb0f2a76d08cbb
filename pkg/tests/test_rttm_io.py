import json
import random

import pytest

from conftest import random_annotation
from diarscore.cder import CderReport
from diarscore.der import DerReport
from diarscore.rttm_io import (
    EmptyReport,
    MalformedLine,
    ReportEntry,
    parse_rttm,
    parse_rttm_records,
    write_report,
    write_rttm,
)
from diarscore.timeline import Annotation, SameSpeakerOverlap, Segment, Turn


def test_parse_basic():
    anns = parse_rttm("SPEAKER rec1 1 0.00 2.50 <NA> <NA> A <NA> <NA>")
    assert len(anns) == 1
    ann = anns[0]
    assert ann.recording_id == "rec1"
    assert ann.turns == (Turn("A", Segment(0, 2500)),)


def test_parse_rounds_half_away():
    (ann,) = parse_rttm("SPEAKER rec1 1 0.0045 1.0 <NA> <NA> A <NA> <NA>")
    assert ann.turns[0].start == 5


def test_parse_field_count():
    with pytest.raises(MalformedLine):
        parse_rttm("SPEAKER rec1 1 0.00 2.50 <NA> <NA> A <NA>")


def test_parse_rejects_bad_records():
    with pytest.raises(MalformedLine):
        parse_rttm("SPEAKER rec1 1 0.00 0.00 <NA> <NA> A <NA> <NA>")
    with pytest.raises(MalformedLine):
        parse_rttm("SPEAKER rec1 1 abc 2.50 <NA> <NA> A <NA> <NA>")
    with pytest.raises(MalformedLine):
        parse_rttm("LEXEME rec1 1 0.00 2.50 <NA> <NA> A <NA> <NA>")


def test_parse_skips_comments_blanks_and_crlf():
    text = "; comment\r\n\r\n# also comment\nSPEAKER r 1 0.0 1.0 <NA> <NA> A <NA> <NA>\r\n"
    (ann,) = parse_rttm(text)
    assert len(ann.turns) == 1


def test_parse_propagates_same_speaker_overlap():
    text = (
        "SPEAKER r 1 0.0 1.0 <NA> <NA> A <NA> <NA>\n"
        "SPEAKER r 1 0.5 1.0 <NA> <NA> A <NA> <NA>\n"
    )
    with pytest.raises(SameSpeakerOverlap) as exc:
        parse_rttm(text)
    assert exc.value.line_no == 2


def test_channel_preserved_in_records():
    recs = parse_rttm_records("SPEAKER r 2 0.0 1.0 <NA> <NA> A <NA> <NA>")
    assert recs[0].channel == "2"


def test_write_basic():
    ann = Annotation("rec1", [Turn("A", Segment(0, 2500))])
    assert write_rttm([ann]) == "SPEAKER rec1 1 0.000 2.500 <NA> <NA> A <NA> <NA>\n"
    assert write_rttm([]) == ""


def test_round_trip_random_annotations():
    rng = random.Random(42)
    for i in range(100):
        ann = random_annotation(rng, f"rec{i:03d}", n_speakers=rng.randint(1, 4))
        (back,) = parse_rttm(write_rttm([ann]))
        assert back == ann


def _entry(rec_id, der=0.2, miss=2000, total=10000, cder=(0, 4)):
    return ReportEntry(
        recording_id=rec_id,
        der=DerReport(miss_ms=miss, fa_ms=0, error_ms=0, total_ms=total),
        cder=CderReport(
            n_error=cder[0],
            n_total=cder[1],
            errors_unmatched_ref_speaker=0,
            errors_iou_below_eta=cder[0],
            errors_unmatched_hyp_utterance=0,
        ),
    )


def test_write_report_csv_values():
    out = write_report([], _entry("rec1"), "csv")
    lines = out.strip().split("\n")
    assert lines[0] == "recording_id,der,miss,fa,error,total,cder,n_error,n_total"
    assert lines[1] == "OVERALL,0.2000,2.000,0.000,0.000,10.000,0.0000,0,4"


def test_write_report_sorted_with_overall():
    out = write_report([_entry("b"), _entry("a")], _entry("ignored"), "csv")
    ids = [line.split(",")[0] for line in out.strip().split("\n")[1:]]
    assert ids == ["a", "b", "OVERALL"]


def test_write_report_empty_raises():
    with pytest.raises(EmptyReport):
        write_report([], None, "csv")


def test_write_report_json_mirrors_schema():
    out = json.loads(write_report([_entry("a")], _entry("x"), "json"))
    assert out["recordings"][0]["recording_id"] == "a"
    assert out["recordings"][0]["der"] == 0.2
    assert out["overall"]["cder"] == 0.0
    assert out["overall"]["miss"] == 2.0


def test_write_report_text_table():
    out = write_report([_entry("a")], _entry("x"), "text")
    assert "OVERALL" in out and "0.2000" in out
