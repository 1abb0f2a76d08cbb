"""Optimal one-to-one speaker matching between reference and hypothesis.

The criterion is maximum total temporal overlap via optimal linear
assignment. Pairs with zero overlap are pruned (those speakers stay
unmatched), and ties between equal-total assignments break toward the
lexicographically smallest (ref_label, hyp_label) pair list so scores are
reproducible across platforms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .timeline import Annotation, Segment, TimeMs, speaker_timeline


@dataclass(frozen=True)
class SpeakerMap:
    pairs: tuple[tuple[str, str], ...]
    unmatched_ref: frozenset[str]
    unmatched_hyp: frozenset[str]

    def hyp_for(self, ref_label: str) -> str | None:
        for r, h in self.pairs:
            if r == ref_label:
                return h
        return None

    @property
    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)


def overlap_of_timelines(a: list[Segment], b: list[Segment]) -> TimeMs:
    """Total intersection duration of two sorted, disjoint segment lists."""
    total = 0
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i].start, b[j].start)
        hi = min(a[i].end, b[j].end)
        if lo < hi:
            total += hi - lo
        if a[i].end <= b[j].end:
            i += 1
        else:
            j += 1
    return total


def overlap_matrix(ref: Annotation, hyp: Annotation) -> np.ndarray:
    """Entry (i, j): intersection duration of ref speaker i and hyp speaker j.

    Rows/columns follow the sorted speaker-label order of each annotation.
    """
    ref_labels = ref.speakers()
    hyp_labels = hyp.speakers()
    matrix = np.zeros((len(ref_labels), len(hyp_labels)), dtype=np.int64)
    hyp_timelines = [speaker_timeline(hyp, h) for h in hyp_labels]
    for i, r in enumerate(ref_labels):
        r_tl = speaker_timeline(ref, r)
        for j, h_tl in enumerate(hyp_timelines):
            matrix[i, j] = overlap_of_timelines(r_tl, h_tl)
    return matrix


def _best_total(matrix: np.ndarray) -> int:
    if matrix.size == 0:
        return 0
    rows, cols = linear_sum_assignment(matrix, maximize=True)
    return int(matrix[rows, cols].sum())


def match_from_matrix(
    ref_labels: list[str], hyp_labels: list[str], matrix: np.ndarray
) -> SpeakerMap:
    """Assignment maximizing total overlap, with the deterministic tie-break.

    Greedy fix-and-verify: walk ref labels in sorted order, lock in the
    smallest hyp label that still allows the global optimum, otherwise
    leave the ref speaker unmatched. Zero-overlap pairs are never locked.
    """
    ref_order = sorted(range(len(ref_labels)), key=lambda i: ref_labels[i])
    hyp_order = sorted(range(len(hyp_labels)), key=lambda j: hyp_labels[j])
    target = _best_total(matrix)
    pairs: list[tuple[str, str]] = []
    fixed = 0
    avail = list(hyp_order)
    remaining_rows = list(ref_order)
    for pos, i in enumerate(ref_order):
        remaining_rows = ref_order[pos + 1:]
        chosen = None
        for j in avail:
            if matrix[i, j] <= 0:
                continue
            sub = matrix[np.ix_(remaining_rows, [c for c in avail if c != j])]
            if fixed + int(matrix[i, j]) + _best_total(sub) == target:
                chosen = j
                break
        if chosen is not None:
            pairs.append((ref_labels[i], hyp_labels[chosen]))
            fixed += int(matrix[i, chosen])
            avail.remove(chosen)
    matched_ref = {r for r, _ in pairs}
    matched_hyp = {h for _, h in pairs}
    return SpeakerMap(
        pairs=tuple(sorted(pairs)),
        unmatched_ref=frozenset(set(ref_labels) - matched_ref),
        unmatched_hyp=frozenset(set(hyp_labels) - matched_hyp),
    )


def match_speakers(ref: Annotation, hyp: Annotation) -> SpeakerMap:
    return match_from_matrix(ref.speakers(), hyp.speakers(), overlap_matrix(ref, hyp))
