import random

import pytest

from conftest import perturbed_hypothesis, random_annotation
from diarscore.cder import MergedUtterance, match_utterances
from diarscore.der import DerConfig, compute_der
from diarscore.oracle import (
    ExtentTooLarge,
    TooManyUtterances,
    exhaustive_cder_match,
    grid_der,
)
from diarscore.timeline import Annotation, Segment, Turn, intersect


def mu(a, b):
    return MergedUtterance("A", Segment(a, b), 1)


def test_grid_der_identity():
    rng = random.Random(1)
    ref = random_annotation(rng, "r", n_speakers=2, extent_ms=10000)
    rep = grid_der(ref, ref, DerConfig(collar_s=0.25))
    assert rep.miss_ms == rep.fa_ms == rep.error_ms == 0


def test_grid_der_extent_guard():
    ref = Annotation("r", [Turn("A", Segment(0, 5 * 3600 * 1000))])
    with pytest.raises(ExtentTooLarge):
        grid_der(ref, ref, DerConfig())


def test_grid_matches_compute_der_on_spec_examples():
    ref = Annotation("r", [Turn("A", Segment(0, 10000))])
    hyp = Annotation("r", [Turn("X", Segment(0, 8000))])
    cfg = DerConfig(collar_s=0.0)
    assert grid_der(ref, hyp, cfg) == compute_der(ref, hyp, cfg)
    ref2 = Annotation(
        "r", [Turn("A", Segment(0, 10000)), Turn("B", Segment(10000, 20000))]
    )
    hyp2 = Annotation(
        "r", [Turn("X", Segment(0, 12000)), Turn("Y", Segment(12000, 20000))]
    )
    assert grid_der(ref2, hyp2, cfg) == compute_der(ref2, hyp2, cfg)


def test_grid_equals_compute_der_random_two_speaker():
    rng = random.Random(2)
    for _ in range(50):
        ref = random_annotation(rng, "r", n_speakers=2, extent_ms=20000)
        hyp = perturbed_hypothesis(rng, ref)
        for collar in (0.0, 0.25):
            cfg = DerConfig(collar_s=collar)
            assert grid_der(ref, hyp, cfg) == compute_der(ref, hyp, cfg)


def test_exhaustive_match_examples():
    assert exhaustive_cder_match([mu(0, 1000)], [mu(0, 1000)]) == [(0, 0)]
    out = exhaustive_cder_match(
        [mu(0, 2000)], [mu(0, 1000), mu(900, 2000)]
    )
    assert out == [(0, 1)]
    assert exhaustive_cder_match([mu(0, 1000), mu(2000, 3000)], []) == [
        (0, None),
        (1, None),
    ]


def test_exhaustive_match_guard():
    utts = [mu(i * 1000, i * 1000 + 500) for i in range(9)]
    with pytest.raises(TooManyUtterances):
        exhaustive_cder_match(utts, utts[:1])


def _total(pairs, ref_utts, hyp_utts):
    return sum(
        intersect(ref_utts[i].segment, hyp_utts[j].segment)
        for i, j in pairs
        if j is not None
    )


def test_greedy_never_beats_exhaustive():
    rng = random.Random(3)
    for _ in range(100):
        def utts(n):
            out = []
            t = 0
            for _ in range(n):
                t += rng.randint(0, 2000)
                d = rng.randint(100, 3000)
                out.append(mu(t, t + d))
                t += d
            return out

        ref_utts = utts(rng.randint(1, 6))
        hyp_utts = utts(rng.randint(0, 6))
        greedy = match_utterances(ref_utts, hyp_utts)
        optimal = exhaustive_cder_match(ref_utts, hyp_utts)
        assert _total(greedy, ref_utts, hyp_utts) <= _total(
            optimal, ref_utts, hyp_utts
        )
