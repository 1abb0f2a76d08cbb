"""Synthetic two-party dialog generator and diarization-error injector.

Used to study how the time-weighted and utterance-level metrics move
together across systems of increasing error severity, without needing any
real corpus. Everything is seed-deterministic.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, replace

import numpy as np

from .cder import CderConfig, CderReport, UndefinedMetric, aggregate_cder, compute_cder
from .der import DerConfig, aggregate_der, compute_der
from .timeline import Annotation, Segment, Turn

# log-normal shape for segment durations; mu is solved from the mean target
_SIGMA = 0.9


@dataclass(frozen=True)
class DialogProfile:
    duration_min: float = 30.8
    mean_segment_s: float = 2.54
    segment_s_range: tuple[float, float] = (0.09, 14.91)
    turn_taking_rate: float = 0.7
    overlap_prob: float = 0.15
    mean_gap_s: float = 0.3
    rng_seed: int = 0

    def __post_init__(self):
        if self.duration_min <= 0 or self.mean_segment_s <= 0 or self.mean_gap_s < 0:
            raise ValueError("durations must be positive")
        lo, hi = self.segment_s_range
        if not 0 < lo < hi:
            raise ValueError("bad segment duration range")
        for p in (self.turn_taking_rate, self.overlap_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")


@dataclass(frozen=True)
class ErrorProfile:
    boundary_jitter_std_ms: float = 0.0
    short_segment_drop_prob: float = 0.0
    split_prob: float = 0.0
    merge_prob: float = 0.0
    confusion_prob: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.boundary_jitter_std_ms < 0:
            raise ValueError("jitter std must be non-negative")
        for p in (
            self.short_segment_drop_prob,
            self.split_prob,
            self.merge_prob,
            self.confusion_prob,
        ):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")


SPEAKERS = ("spk1", "spk2")


def generate_dialog(profile: DialogProfile, recording_id: str = "dialog") -> Annotation:
    """Two-speaker dialog with log-normal segment durations (clipped to the
    profile range) and alternating turn-taking with optional overlap."""
    rng = np.random.default_rng(profile.rng_seed)
    total_ms = round(profile.duration_min * 60_000)
    lo_ms = round(profile.segment_s_range[0] * 1000)
    hi_ms = round(profile.segment_s_range[1] * 1000)
    mu = math.log(profile.mean_segment_s) - _SIGMA * _SIGMA / 2

    turns: list[Turn] = []
    last_end = {s: 0 for s in SPEAKERS}
    cur = 0
    t = 0
    while t < total_ms:
        dur = int(np.clip(round(rng.lognormal(mu, _SIGMA) * 1000), lo_ms, hi_ms))
        start = max(t, last_end[SPEAKERS[cur]])
        end = start + dur
        turns.append(Turn(SPEAKERS[cur], Segment(start, end)))
        last_end[SPEAKERS[cur]] = end
        switch = rng.random() < profile.turn_taking_rate
        gap = round(rng.exponential(profile.mean_gap_s * 1000))
        if switch:
            if rng.random() < profile.overlap_prob:
                overlap = round(rng.uniform(1, max(2, min(dur, 1000))))
                t = max(end - overlap, last_end[SPEAKERS[1 - cur]])
            else:
                t = end + gap
            cur = 1 - cur
        else:
            t = end + max(1, gap)
    return Annotation(recording_id, turns)


def corrupt(ref: Annotation, profile: ErrorProfile) -> Annotation:
    """Inject errors in fixed order: jitter, drop, split, merge, confuse.

    Same-speaker overlaps created along the way are repaired by truncating
    the later segment, so the output is always a valid annotation.
    """
    rng = np.random.default_rng(profile.rng_seed)
    items = [(t.speaker, t.start, t.end) for t in ref.turns]
    labels = sorted({s for s, _, _ in items}) or list(SPEAKERS)

    if profile.boundary_jitter_std_ms > 0:
        std = profile.boundary_jitter_std_ms
        jittered = []
        for spk, s, e in items:
            s2 = max(0, s + round(rng.normal(0, std)))
            e2 = e + round(rng.normal(0, std))
            if e2 - s2 < 10:
                e2 = s2 + 10
            jittered.append((spk, s2, e2))
        items = jittered

    if profile.short_segment_drop_prob > 0:
        items = [
            (spk, s, e)
            for spk, s, e in items
            if not (e - s < 1000 and rng.random() < profile.short_segment_drop_prob)
        ]

    if profile.split_prob > 0:
        split_items = []
        for spk, s, e in items:
            if e - s >= 200 and rng.random() < profile.split_prob:
                mid = (s + e) // 2
                split_items.append((spk, s, mid))
                split_items.append((spk, mid + 40, e) if e - mid > 50 else (spk, mid, e))
            else:
                split_items.append((spk, s, e))
        items = split_items

    if profile.merge_prob > 0:
        merged_items = []
        for spk in sorted({s for s, _, _ in items}):
            own = sorted((s, e) for sp, s, e in items if sp == spk)
            if not own:
                continue
            cur_s, cur_e = own[0]
            for s, e in own[1:]:
                if rng.random() < profile.merge_prob:
                    cur_e = max(cur_e, e)
                else:
                    merged_items.append((spk, cur_s, cur_e))
                    cur_s, cur_e = s, e
            merged_items.append((spk, cur_s, cur_e))
        items = sorted(merged_items, key=lambda x: (x[1], x[2], x[0]))

    if profile.confusion_prob > 0 and len(labels) > 1:
        confused = []
        for spk, s, e in items:
            if rng.random() < profile.confusion_prob:
                others = [l for l in labels if l != spk]
                spk = others[int(rng.integers(len(others)))]
            confused.append((spk, s, e))
        items = confused

    # repair same-speaker overlaps by truncating the later segment
    repaired: list[Turn] = []
    for spk in sorted({s for s, _, _ in items}):
        own = sorted((s, e) for sp, s, e in items if sp == spk)
        prev_end = -1
        for s, e in own:
            s = max(s, prev_end)
            if s < e:
                repaired.append(Turn(spk, Segment(s, e)))
                prev_end = e
    return Annotation(ref.recording_id, repaired)


@dataclass(frozen=True)
class StudyRow:
    system_id: int
    der_collar025: float
    der_collar0: float
    cder: float | None


def default_error_grid(n_systems: int, seed: int = 0) -> list[ErrorProfile]:
    """Mild-to-severe grid; system 0 is error-free."""
    grid = []
    for i in range(n_systems):
        severity = i / max(1, n_systems - 1)
        grid.append(
            ErrorProfile(
                boundary_jitter_std_ms=round(300 * severity),
                short_segment_drop_prob=0.6 * severity,
                split_prob=0.3 * severity,
                merge_prob=0.3 * severity,
                confusion_prob=0.25 * severity,
                rng_seed=seed + i,
            )
        )
    return grid


def correlation_study(
    n_systems: int,
    dialog_profile: DialogProfile,
    error_grid: list[ErrorProfile],
    n_dialogs: int = 3,
    eta: float = 0.5,
) -> tuple[list[StudyRow], float]:
    """Score every corrupted variant of one fixed corpus with both metrics.

    Returns the per-system table and the Pearson correlation between CDER
    and DER at collar 0 (systems with undefined CDER are excluded from the
    correlation but kept in the table).
    """
    if n_systems < 2:
        raise ValueError("need at least 2 systems")
    if len(error_grid) < n_systems:
        raise ValueError("error grid shorter than n_systems")

    refs = [
        generate_dialog(
            replace(dialog_profile, rng_seed=dialog_profile.rng_seed + k),
            f"dialog{k:03d}",
        )
        for k in range(n_dialogs)
    ]

    rows: list[StudyRow] = []
    for system_id, err in enumerate(error_grid[:n_systems]):
        hyps = [
            corrupt(ref, replace(err, rng_seed=err.rng_seed + 1009 * k))
            for k, ref in enumerate(refs)
        ]
        der025 = aggregate_der(
            [compute_der(r, h, DerConfig(collar_s=0.25)) for r, h in zip(refs, hyps)]
        ).der
        der0 = aggregate_der(
            [compute_der(r, h, DerConfig(collar_s=0.0)) for r, h in zip(refs, hyps)]
        ).der
        cder_reports: list[CderReport] = []
        for r, h in zip(refs, hyps):
            try:
                cder_reports.append(compute_cder(r, h, CderConfig(eta=eta)))
            except UndefinedMetric:
                pass
        cder = aggregate_cder(cder_reports).cder if cder_reports else None
        rows.append(StudyRow(system_id, der025, der0, cder))

    xs = [row.cder for row in rows if row.cder is not None]
    ys = [row.der_collar0 for row in rows if row.cder is not None]
    if len(xs) < 2:
        raise ValueError("fewer than 2 systems with defined CDER")
    pearson = statistics.correlation(xs, ys)
    return rows, pearson


def study_rows_to_csv(rows: list[StudyRow]) -> str:
    lines = ["system_id,der_collar025,der_collar0,cder"]
    for row in rows:
        cder = "" if row.cder is None else f"{row.cder:.6f}"
        lines.append(
            f"{row.system_id},{row.der_collar025:.6f},{row.der_collar0:.6f},{cder}"
        )
    return "".join(line + "\n" for line in lines)
