"""Time-weighted diarization error rate: DER = (FA + MISS + ERROR) / TOTAL.

Count-based instantaneous formulation so overlapped conversational speech
is scored correctly: at each instant, with Nref/Nhyp active speaker counts
and Ncorrect the count of mapped pairs speaking simultaneously,

    MISS  = integral of max(0, Nref - Nhyp)
    FA    = integral of max(0, Nhyp - Nref)
    ERROR = integral of (min(Nref, Nhyp) - Ncorrect)
    TOTAL = integral of Nref

A no-score collar (default 0.25 s) around every reference boundary is
excluded from all four integrals.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mapping
from .timeline import (
    Annotation,
    Segment,
    TimeMs,
    clip_to_regions,
    complement,
    merge_segments,
    speaker_timeline,
)


class EmptyReference(ValueError):
    """No scored reference speech time (TOTAL would be 0)."""


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class DerConfig:
    collar_s: float = 0.25
    score_overlap: bool = True

    def __post_init__(self):
        if self.collar_s < 0:
            raise ValueError("collar must be non-negative")

    @property
    def collar_ms(self) -> TimeMs:
        return round(self.collar_s * 1000)


@dataclass(frozen=True)
class DerReport:
    miss_ms: TimeMs
    fa_ms: TimeMs
    error_ms: TimeMs
    total_ms: TimeMs

    @property
    def der(self) -> float:
        if self.total_ms <= 0:
            raise EmptyReference("TOTAL is zero")
        return (self.miss_ms + self.fa_ms + self.error_ms) / self.total_ms


def scoring_regions(
    ref: Annotation, collar: TimeMs, extent: Segment | None = None
) -> list[Segment]:
    """Scored regions: the extent minus +/-collar windows around ref boundaries.

    With collar 0 the full extent is returned. Extent defaults to
    [0, last reference end).
    """
    if extent is None:
        end = ref.extent_end
        if end <= 0:
            return []
        extent = Segment(0, end)
    if collar <= 0:
        return [extent]
    zones = []
    for t in ref.turns:
        for b in (t.start, t.end):
            lo = max(0, b - collar)
            hi = b + collar
            if lo < hi:
                zones.append(Segment(lo, hi))
    return complement(merge_segments(zones), extent)


def _ref_overlap_zones(ref: Annotation) -> list[Segment]:
    """Instants where two or more reference speakers are active."""
    events: list[tuple[TimeMs, int]] = []
    for t in ref.turns:
        events.append((t.start, 1))
        events.append((t.end, -1))
    events.sort()
    zones: list[Segment] = []
    depth = 0
    zone_start = None
    for time, delta in events:
        new_depth = depth + delta
        if depth < 2 <= new_depth:
            zone_start = time
        elif new_depth < 2 <= depth and zone_start is not None:
            if time > zone_start:
                zones.append(Segment(zone_start, time))
            zone_start = None
        depth = new_depth
    return merge_segments(zones)


def _scored_regions_for_pair(
    ref: Annotation, hyp: Annotation, cfg: DerConfig
) -> list[Segment]:
    extent_end = max(ref.extent_end, hyp.extent_end)
    if extent_end <= 0:
        return []
    extent = Segment(0, extent_end)
    regions = scoring_regions(ref, cfg.collar_ms, extent)
    if not cfg.score_overlap:
        overlap = _ref_overlap_zones(ref)
        kept: list[Segment] = []
        for r in regions:
            kept.extend(complement([z for z in overlap], r))
        regions = kept
    return regions


def compute_der(ref: Annotation, hyp: Annotation, cfg: DerConfig) -> DerReport:
    if not ref.turns:
        raise EmptyReference(f"reference for {ref.recording_id!r} has no turns")
    regions = _scored_regions_for_pair(ref, hyp, cfg)

    ref_pieces: dict[str, list[Segment]] = {}
    hyp_pieces: dict[str, list[Segment]] = {}
    for spk in ref.speakers():
        ref_pieces[spk] = clip_to_regions(speaker_timeline(ref, spk), regions)
    for spk in hyp.speakers():
        hyp_pieces[spk] = clip_to_regions(speaker_timeline(hyp, spk), regions)

    ref_labels = sorted(ref_pieces)
    hyp_labels = sorted(hyp_pieces)
    matrix = np.zeros((len(ref_labels), len(hyp_labels)), dtype=np.int64)
    for i, r in enumerate(ref_labels):
        for j, h in enumerate(hyp_labels):
            matrix[i, j] = mapping.overlap_of_timelines(ref_pieces[r], hyp_pieces[h])
    speaker_map = mapping.match_from_matrix(ref_labels, hyp_labels, matrix)
    hyp_of = speaker_map.as_dict
    ref_of = {h: r for r, h in speaker_map.pairs}

    # event sweep over elementary intervals
    events: list[tuple[TimeMs, int, str, int]] = []
    for spk, segs in ref_pieces.items():
        for seg in segs:
            events.append((seg.start, 0, spk, 1))
            events.append((seg.end, 0, spk, -1))
    for spk, segs in hyp_pieces.items():
        for seg in segs:
            events.append((seg.start, 1, spk, 1))
            events.append((seg.end, 1, spk, -1))
    events.sort(key=lambda e: e[0])

    ref_active: dict[str, int] = {}
    hyp_active: dict[str, int] = {}
    nref = nhyp = ncorrect = 0
    miss = fa = err = total = 0
    prev_t: TimeMs | None = None
    i = 0
    n = len(events)
    while i < n:
        t = events[i][0]
        if prev_t is not None and t > prev_t and (nref or nhyp):
            dt = t - prev_t
            if nref > nhyp:
                miss += (nref - nhyp) * dt
            elif nhyp > nref:
                fa += (nhyp - nref) * dt
            err += (min(nref, nhyp) - ncorrect) * dt
            total += nref * dt
        while i < n and events[i][0] == t:
            _, side, spk, delta = events[i]
            if side == 0:
                old = ref_active.get(spk, 0)
                new = old + delta
                ref_active[spk] = new
                if old == 0 and new > 0:
                    nref += 1
                    h = hyp_of.get(spk)
                    if h is not None and hyp_active.get(h, 0) > 0:
                        ncorrect += 1
                elif old > 0 and new == 0:
                    nref -= 1
                    h = hyp_of.get(spk)
                    if h is not None and hyp_active.get(h, 0) > 0:
                        ncorrect -= 1
            else:
                old = hyp_active.get(spk, 0)
                new = old + delta
                hyp_active[spk] = new
                if old == 0 and new > 0:
                    nhyp += 1
                    r = ref_of.get(spk)
                    if r is not None and ref_active.get(r, 0) > 0:
                        ncorrect += 1
                elif old > 0 and new == 0:
                    nhyp -= 1
                    r = ref_of.get(spk)
                    if r is not None and ref_active.get(r, 0) > 0:
                        ncorrect -= 1
            i += 1
        prev_t = t

    if total <= 0:
        raise EmptyReference(f"no scored reference speech in {ref.recording_id!r}")
    return DerReport(miss_ms=miss, fa_ms=fa, error_ms=err, total_ms=total)


def aggregate_der(reports: list[DerReport]) -> DerReport:
    """Micro-aggregate: sum durations across recordings, recompute the ratio."""
    if not reports:
        raise EmptyInput("no DER reports to aggregate")
    agg = DerReport(
        miss_ms=sum(r.miss_ms for r in reports),
        fa_ms=sum(r.fa_ms for r in reports),
        error_ms=sum(r.error_ms for r in reports),
        total_ms=sum(r.total_ms for r in reports),
    )
    if agg.total_ms <= 0:
        raise EmptyReference("aggregate TOTAL is zero")
    return agg
