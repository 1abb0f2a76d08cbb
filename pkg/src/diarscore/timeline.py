"""Core timeline model: integer-millisecond segments, turns and annotations.

All time arithmetic is exact integer milliseconds; no floats enter any
metric computation. Segments are half-open [start, end), so touching
segments neither overlap nor conflict.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

TimeMs = int


class TimelineError(ValueError):
    pass


class SameSpeakerOverlap(TimelineError):
    """Two turns of the same speaker overlap inside one annotation."""

    def __init__(self, recording_id: str, speaker: str, line_no: int | None = None):
        self.recording_id = recording_id
        self.speaker = speaker
        self.line_no = line_no
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(
            f"overlapping turns for speaker {speaker!r} in recording "
            f"{recording_id!r}{where}"
        )


def ms_from_decimal_seconds(token: str) -> TimeMs:
    """Convert a decimal-seconds string to integer ms, rounding half away from zero.

    Exact string arithmetic; rejects signs, exponents and empty parts so
    parsing stays byte-deterministic and locale-independent.
    """
    text = token.strip()
    if not text:
        raise ValueError("empty time token")
    if "." in text:
        whole, frac = text.split(".", 1)
    else:
        whole, frac = text, ""
    if whole == "" and frac == "":
        raise ValueError(f"bad time token {token!r}")
    if (whole and not whole.isdigit()) or (frac and not frac.isdigit()):
        raise ValueError(f"bad time token {token!r}")
    ms = (int(whole) if whole else 0) * 1000
    frac3 = (frac + "000")[:3]
    ms += int(frac3)
    rest = frac[3:]
    # round half away from zero on the sub-millisecond remainder
    if rest and int(rest) * 2 >= 10 ** len(rest):
        ms += 1
    return ms


def ms_to_seconds_str(ms: TimeMs) -> str:
    """Format integer milliseconds as seconds with exactly 3 decimals."""
    return f"{ms // 1000}.{ms % 1000:03d}"


@dataclass(frozen=True, order=True)
class Segment:
    start: TimeMs
    end: TimeMs

    def __post_init__(self):
        if self.start < 0:
            raise TimelineError(f"negative start {self.start}")
        if self.end <= self.start:
            raise TimelineError(f"empty or inverted segment [{self.start}, {self.end})")

    @property
    def duration(self) -> TimeMs:
        return self.end - self.start


def intersect(a: Segment, b: Segment) -> TimeMs:
    """Duration of shared time between two segments (0 when disjoint or touching)."""
    return max(0, min(a.end, b.end) - max(a.start, b.start))


def union_duration(a: Segment, b: Segment) -> TimeMs:
    """Duration covered by either segment, overlap counted once."""
    return a.duration + b.duration - intersect(a, b)


@dataclass(frozen=True, order=True)
class Turn:
    speaker: str
    segment: Segment

    def __post_init__(self):
        if not self.speaker:
            raise TimelineError("empty speaker label")

    @property
    def start(self) -> TimeMs:
        return self.segment.start

    @property
    def end(self) -> TimeMs:
        return self.segment.end


class Annotation:
    """All turns of one recording, canonically sorted by (start, end, speaker).

    Turns of the same speaker must not overlap each other; turns of
    different speakers may (conversational overlap). Immutable after
    construction.
    """

    __slots__ = ("recording_id", "turns", "_by_speaker")

    def __init__(self, recording_id: str, turns):
        self.recording_id = recording_id
        ordered = tuple(
            sorted(turns, key=lambda t: (t.segment.start, t.segment.end, t.speaker))
        )
        by_speaker: dict[str, list[Segment]] = {}
        for t in ordered:
            by_speaker.setdefault(t.speaker, []).append(t.segment)
        for speaker, segs in by_speaker.items():
            prev = None
            for seg in segs:
                if prev is not None and seg.start < prev.end:
                    raise SameSpeakerOverlap(recording_id, speaker)
                prev = seg
        self.turns = ordered
        self._by_speaker = {s: tuple(v) for s, v in by_speaker.items()}

    def speakers(self) -> list[str]:
        return sorted(self._by_speaker)

    def __len__(self):
        return len(self.turns)

    def __eq__(self, other):
        return (
            isinstance(other, Annotation)
            and self.recording_id == other.recording_id
            and self.turns == other.turns
        )

    def __hash__(self):
        return hash((self.recording_id, self.turns))

    def __repr__(self):
        return f"Annotation({self.recording_id!r}, {len(self.turns)} turns)"

    @property
    def extent_end(self) -> TimeMs:
        return max((t.end for t in self.turns), default=0)


def speaker_timeline(ann: Annotation, speaker: str) -> list[Segment]:
    """The speaker's segments sorted by start; empty if the speaker is absent."""
    return list(ann._by_speaker.get(speaker, ()))


def any_other_speaker_active(ann: Annotation, speaker: str, window: Segment) -> bool:
    """True iff a different speaker has positive intersection with the window.

    Touching endpoints do not count as activity.
    """
    for t in ann.turns:
        if t.start >= window.end:
            break
        if t.speaker != speaker and t.end > window.start:
            return True
    return False


def merge_segments(segments) -> list[Segment]:
    """Union of segments as a sorted list of disjoint segments."""
    out: list[Segment] = []
    for seg in sorted(segments):
        if out and seg.start <= out[-1].end:
            if seg.end > out[-1].end:
                out[-1] = Segment(out[-1].start, seg.end)
        else:
            out.append(seg)
    return out


def complement(segments: list[Segment], extent: Segment) -> list[Segment]:
    """Extent minus the (sorted, disjoint) segments."""
    out: list[Segment] = []
    cursor = extent.start
    for seg in segments:
        if seg.end <= extent.start or seg.start >= extent.end:
            continue
        s = max(seg.start, extent.start)
        if s > cursor:
            out.append(Segment(cursor, s))
        cursor = max(cursor, min(seg.end, extent.end))
    if cursor < extent.end:
        out.append(Segment(cursor, extent.end))
    return out


def clip_to_regions(segments, regions: list[Segment]) -> list[Segment]:
    """Pieces of each input segment that fall inside the sorted disjoint regions."""
    if not regions:
        return []
    starts = [r.start for r in regions]
    out: list[Segment] = []
    for seg in segments:
        i = bisect_right(starts, seg.start) - 1
        if i < 0:
            i = 0
        while i < len(regions) and regions[i].start < seg.end:
            lo = max(seg.start, regions[i].start)
            hi = min(seg.end, regions[i].end)
            if lo < hi:
                out.append(Segment(lo, hi))
            i += 1
    return out
