import random

from diarscore.timeline import Annotation, Segment, Turn


def random_annotation(
    rng: random.Random,
    recording_id: str = "rec",
    n_speakers: int = 2,
    extent_ms: int = 30_000,
    cross_overlap: bool = True,
) -> Annotation:
    """Random multi-speaker annotation; same-speaker turns never overlap."""
    turns = []
    if cross_overlap:
        # independent per-speaker walks; cross-speaker overlap arises naturally
        for i in range(n_speakers):
            spk = f"s{i}"
            t = rng.randrange(0, 2000)
            while t < extent_ms - 200:
                dur = rng.randrange(100, 3000)
                end = min(t + dur, extent_ms)
                if end > t:
                    turns.append(Turn(spk, Segment(t, end)))
                t = end + rng.randrange(50, 2000)
    else:
        # strictly sequential turns, no overlap at all
        t = rng.randrange(0, 500)
        while t < extent_ms - 200:
            spk = f"s{rng.randrange(n_speakers)}"
            dur = rng.randrange(100, 3000)
            end = min(t + dur, extent_ms)
            if end > t:
                turns.append(Turn(spk, Segment(t, end)))
            t = end + rng.randrange(1, 2000)
    if not turns:
        turns.append(Turn("s0", Segment(0, 1000)))
    return Annotation(recording_id, turns)


def perturbed_hypothesis(
    rng: random.Random, ref: Annotation, relabel: bool = True
) -> Annotation:
    """Hypothesis derived from ref by jitter, drops, and label noise."""
    labels = ref.speakers()
    hyp_labels = {s: (f"h{i}" if relabel else s) for i, s in enumerate(labels)}
    turns = []
    for t in ref.turns:
        if rng.random() < 0.15:
            continue
        s = max(0, t.start + rng.randrange(-400, 401))
        e = max(s + 50, t.end + rng.randrange(-400, 401))
        spk = hyp_labels[t.speaker]
        if rng.random() < 0.15:
            spk = hyp_labels[rng.choice(labels)]
        turns.append((spk, s, e))
    # repair same-speaker overlaps by truncation
    repaired = []
    for spk in sorted({s for s, _, _ in turns}):
        prev_end = -1
        for s, e in sorted((a, b) for sp, a, b in turns if sp == spk):
            s = max(s, prev_end)
            if s < e:
                repaired.append(Turn(spk, Segment(s, e)))
                prev_end = e
    if not repaired:
        repaired.append(Turn("h0", Segment(0, 100)))
    return Annotation(ref.recording_id, repaired)
