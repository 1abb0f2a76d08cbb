"""Independent brute-force references: a 1 ms grid DER and an exhaustive
utterance matcher. Not performance-optimized; input sizes are guarded.

These live in the library (not only in tests) so documented derived values
can be regenerated by users.
"""
from __future__ import annotations

import numpy as np

from . import mapping
from .cder import MergedUtterance
from .der import DerConfig, DerReport, EmptyReference
from .timeline import Annotation, intersect, speaker_timeline

MAX_EXTENT_MS = 4 * 3600 * 1000
MAX_UTTERANCES = 8


class ExtentTooLarge(ValueError):
    pass


class TooManyUtterances(ValueError):
    pass


def _activity_array(ann: Annotation, speaker: str, extent: int) -> np.ndarray:
    arr = np.zeros(extent, dtype=bool)
    for seg in speaker_timeline(ann, speaker):
        arr[seg.start : seg.end] = True
    return arr


def grid_der(ref: Annotation, hyp: Annotation, cfg: DerConfig) -> DerReport:
    """DER by counting individual milliseconds over the recording extent."""
    if not ref.turns:
        raise EmptyReference(f"reference for {ref.recording_id!r} has no turns")
    extent = max(ref.extent_end, hyp.extent_end)
    if extent > MAX_EXTENT_MS:
        raise ExtentTooLarge(f"extent {extent} ms exceeds {MAX_EXTENT_MS} ms")

    scored = np.ones(extent, dtype=bool)
    collar = cfg.collar_ms
    if collar > 0:
        for t in ref.turns:
            for b in (t.start, t.end):
                scored[max(0, b - collar) : min(extent, b + collar)] = False

    ref_labels = ref.speakers()
    hyp_labels = hyp.speakers()
    ref_arrays = [_activity_array(ref, s, extent) for s in ref_labels]
    hyp_arrays = [_activity_array(hyp, s, extent) for s in hyp_labels]

    if not cfg.score_overlap and ref_arrays:
        depth = np.zeros(extent, dtype=np.int32)
        for arr in ref_arrays:
            depth += arr
        scored &= depth < 2

    matrix = np.zeros((len(ref_labels), len(hyp_labels)), dtype=np.int64)
    for i, ra in enumerate(ref_arrays):
        for j, ha in enumerate(hyp_arrays):
            matrix[i, j] = int(np.count_nonzero(ra & ha & scored))
    speaker_map = mapping.match_from_matrix(ref_labels, hyp_labels, matrix)

    nref = np.zeros(extent, dtype=np.int32)
    for arr in ref_arrays:
        nref += arr & scored
    nhyp = np.zeros(extent, dtype=np.int32)
    for arr in hyp_arrays:
        nhyp += arr & scored

    ncorrect = 0
    for r, h in speaker_map.pairs:
        ncorrect += int(matrix[ref_labels.index(r), hyp_labels.index(h)])

    miss = int(np.maximum(nref - nhyp, 0).sum())
    fa = int(np.maximum(nhyp - nref, 0).sum())
    err = int(np.minimum(nref, nhyp).sum()) - ncorrect
    total = int(nref.sum())
    if total <= 0:
        raise EmptyReference(f"no scored reference speech in {ref.recording_id!r}")
    return DerReport(miss_ms=miss, fa_ms=fa, error_ms=err, total_ms=total)


def exhaustive_cder_match(
    ref_utts: list[MergedUtterance], hyp_utts: list[MergedUtterance]
) -> list[tuple[int, int | None]]:
    """Best one-to-one assignment maximizing total intersection duration.

    Enumerates every injective assignment; ties break toward the
    lexicographically smallest hypothesis-index tuple (None last).
    """
    if len(ref_utts) > MAX_UTTERANCES or len(hyp_utts) > MAX_UTTERANCES:
        raise TooManyUtterances(f"guard is {MAX_UTTERANCES} utterances per side")
    n_ref = len(ref_utts)
    n_hyp = len(hyp_utts)
    inter = [
        [intersect(r.segment, h.segment) for h in hyp_utts] for r in ref_utts
    ]
    sentinel = n_hyp  # None sorts after every real index
    best_total = -1
    best_key: tuple[int, ...] | None = None

    def dfs(i: int, used: int, total: int, key: list[int]):
        nonlocal best_total, best_key
        if i == n_ref:
            tup = tuple(key)
            if total > best_total or (total == best_total and (
                best_key is None or tup < best_key
            )):
                best_total = total
                best_key = tup
            return
        for j in range(n_hyp):
            if not (used >> j) & 1 and inter[i][j] > 0:
                key.append(j)
                dfs(i + 1, used | (1 << j), total + inter[i][j], key)
                key.pop()
        key.append(sentinel)
        dfs(i + 1, used, total, key)
        key.pop()

    dfs(0, 0, 0, [])
    assert best_key is not None
    return [
        (i, None if j == sentinel else j) for i, j in enumerate(best_key)
    ]
