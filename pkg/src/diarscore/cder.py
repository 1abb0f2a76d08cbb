"""Utterance-level conversational DER (CDER).

Pipeline: merge each speaker's consecutive turns into maximal runs with no
other speaker active in between, match reference and hypothesis speakers,
greedily match merged utterances within each matched pair, then count
mistakes: an utterance is wrong when unmatched or when its IoU against the
matched hypothesis utterance falls below the threshold eta.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from . import mapping
from .timeline import (
    Annotation,
    Segment,
    intersect,
    merge_segments,
    speaker_timeline,
    union_duration,
)


class UndefinedMetric(ValueError):
    """No reference speaker was matched: n_total is 0 and CDER is undefined."""


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class CderConfig:
    eta: float = 0.5
    count_unmatched_hyp_speakers: bool = False

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie strictly between 0 and 1")


@dataclass(frozen=True)
class MergedUtterance:
    speaker: str
    segment: Segment
    source_count: int


@dataclass(frozen=True)
class CderReport:
    n_error: int
    n_total: int
    errors_unmatched_ref_speaker: int
    errors_iou_below_eta: int
    errors_unmatched_hyp_utterance: int

    @property
    def cder(self) -> float:
        if self.n_total <= 0:
            raise UndefinedMetric("n_total is zero")
        return self.n_error / self.n_total


def merge_utterances(ann: Annotation) -> dict[str, list[MergedUtterance]]:
    """Per speaker, merge chronological runs of turns while no other speaker
    is active inside [run_start, candidate_end)."""
    out: dict[str, list[MergedUtterance]] = {}
    INF = float("inf")
    for speaker in ann.speakers():
        segs = speaker_timeline(ann, speaker)
        others = merge_segments(
            t.segment for t in ann.turns if t.speaker != speaker
        )
        other_starts = [o.start for o in others]
        other_ends = [o.end for o in others]
        utts: list[MergedUtterance] = []
        i = 0
        n = len(segs)
        while i < n:
            start = segs[i].start
            end = segs[i].end
            count = 1
            k = bisect_right(other_ends, start)
            barrier = other_starts[k] if k < len(others) else INF
            while i + 1 < n and segs[i + 1].end <= barrier:
                i += 1
                end = segs[i].end
                count += 1
            utts.append(MergedUtterance(speaker, Segment(start, end), count))
            i += 1
        out[speaker] = utts
    return out


def match_utterances(
    ref_utts: list[MergedUtterance], hyp_utts: list[MergedUtterance]
) -> list[tuple[int, int | None]]:
    """Greedy one-to-one matching in reference chronological order.

    Each reference utterance takes the still-unassigned hypothesis
    utterance with maximal intersection; ties break toward the earlier
    hypothesis start. Zero intersection means no match.
    """
    hyp_starts = [u.segment.start for u in hyp_utts]
    hyp_ends = [u.segment.end for u in hyp_utts]
    used = [False] * len(hyp_utts)
    out: list[tuple[int, int | None]] = []
    for ri, r in enumerate(ref_utts):
        j = bisect_right(hyp_ends, r.segment.start)
        best: int | None = None
        best_inter = 0
        while j < len(hyp_utts) and hyp_starts[j] < r.segment.end:
            if not used[j]:
                inter = intersect(r.segment, hyp_utts[j].segment)
                if inter > best_inter:
                    best_inter = inter
                    best = j
            j += 1
        if best is not None:
            used[best] = True
        out.append((ri, best))
    return out


def compute_cder(ref: Annotation, hyp: Annotation, cfg: CderConfig) -> CderReport:
    if not ref.turns:
        raise EmptyInput(f"reference for {ref.recording_id!r} has no turns")
    merged_ref = merge_utterances(ref)
    merged_hyp = merge_utterances(hyp)
    speaker_map = mapping.match_speakers(ref, hyp)
    hyp_of = speaker_map.as_dict

    n_total = 0
    err_unmatched_speaker = 0
    err_iou = 0
    err_unmatched_hyp = 0

    for ref_speaker in ref.speakers():
        ref_utts = merged_ref[ref_speaker]
        hyp_speaker = hyp_of.get(ref_speaker)
        if hyp_speaker is None:
            err_unmatched_speaker += len(ref_utts)
            continue
        hyp_utts = merged_hyp.get(hyp_speaker, [])
        assignment = match_utterances(ref_utts, hyp_utts)
        matched_hyp_count = 0
        for ri, hi in assignment:
            n_total += 1
            if hi is None:
                err_iou += 1
                continue
            matched_hyp_count += 1
            r_seg = ref_utts[ri].segment
            h_seg = hyp_utts[hi].segment
            if intersect(r_seg, h_seg) / union_duration(r_seg, h_seg) < cfg.eta:
                err_iou += 1
        err_unmatched_hyp += len(hyp_utts) - matched_hyp_count

    if cfg.count_unmatched_hyp_speakers:
        for hyp_speaker in speaker_map.unmatched_hyp:
            err_unmatched_hyp += len(merged_hyp.get(hyp_speaker, []))

    n_error = err_unmatched_speaker + err_iou + err_unmatched_hyp
    if n_total <= 0:
        raise UndefinedMetric(
            f"no reference speaker matched in {ref.recording_id!r}"
        )
    return CderReport(
        n_error=n_error,
        n_total=n_total,
        errors_unmatched_ref_speaker=err_unmatched_speaker,
        errors_iou_below_eta=err_iou,
        errors_unmatched_hyp_utterance=err_unmatched_hyp,
    )


def aggregate_cder(reports: list[CderReport]) -> CderReport:
    """Micro-aggregate: pool counts across recordings, recompute the ratio."""
    if not reports:
        raise EmptyInput("no CDER reports to aggregate")
    return CderReport(
        n_error=sum(r.n_error for r in reports),
        n_total=sum(r.n_total for r in reports),
        errors_unmatched_ref_speaker=sum(
            r.errors_unmatched_ref_speaker for r in reports
        ),
        errors_iou_below_eta=sum(r.errors_iou_below_eta for r in reports),
        errors_unmatched_hyp_utterance=sum(
            r.errors_unmatched_hyp_utterance for r in reports
        ),
    )


def macro_cder(reports: list[CderReport]) -> float:
    """Mean of per-recording ratios (companion to the pooled micro value)."""
    if not reports:
        raise EmptyInput("no CDER reports to average")
    return sum(r.cder for r in reports) / len(reports)
