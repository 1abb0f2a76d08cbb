import random

import numpy as np

from conftest import perturbed_hypothesis, random_annotation
from diarscore.mapping import (
    match_from_matrix,
    match_speakers,
    overlap_matrix,
)
from diarscore.timeline import Annotation, Segment, Turn


def brute_force_best_total(matrix: np.ndarray) -> int:
    """Maximum total over all injective row->column assignments."""
    n_rows, n_cols = matrix.shape

    def rec(i: int, used: int) -> int:
        if i == n_rows:
            return 0
        best = rec(i + 1, used)  # row unmatched
        for j in range(n_cols):
            if not (used >> j) & 1:
                best = max(best, int(matrix[i, j]) + rec(i + 1, used | (1 << j)))
        return best

    return rec(0, 0)


def ann(rec, spec):
    return Annotation(rec, [Turn(s, Segment(a, b)) for s, a, b in spec])


def test_overlap_matrix_examples():
    m = overlap_matrix(ann("r", [("A", 0, 10000)]), ann("r", [("X", 0, 8000)]))
    assert m.tolist() == [[8000]]
    m = overlap_matrix(ann("r", [("A", 0, 1000)]), ann("r", [("X", 2000, 3000)]))
    assert m.tolist() == [[0]]
    m = overlap_matrix(
        ann("r", [("A", 0, 10000), ("B", 10000, 20000)]),
        ann("r", [("X", 0, 12000), ("Y", 12000, 20000)]),
    )
    assert m.tolist() == [[10000, 0], [2000, 8000]]


def test_match_identity():
    a = ann("r", [("A", 0, 1000)])
    sm = match_speakers(a, a)
    assert sm.pairs == (("A", "A"),)
    assert not sm.unmatched_ref and not sm.unmatched_hyp


def test_match_two_speakers():
    sm = match_speakers(
        ann("r", [("A", 0, 10000), ("B", 10000, 20000)]),
        ann("r", [("X", 0, 12000), ("Y", 12000, 20000)]),
    )
    assert sm.pairs == (("A", "X"), ("B", "Y"))


def test_unbalanced_leaves_ref_unmatched():
    sm = match_speakers(
        ann("r", [("A", 0, 1000), ("B", 2000, 3000), ("C", 4000, 5000)]),
        ann("r", [("X", 0, 1000), ("Y", 2000, 3000)]),
    )
    assert len(sm.unmatched_ref) == 1
    assert sm.unmatched_ref == frozenset({"C"})


def test_zero_overlap_pairs_pruned():
    sm = match_speakers(
        ann("r", [("A", 0, 1000)]), ann("r", [("X", 5000, 6000)])
    )
    assert sm.pairs == ()
    assert sm.unmatched_ref == frozenset({"A"})
    assert sm.unmatched_hyp == frozenset({"X"})


def test_lexicographic_tie_break():
    # both assignments total 2000; smallest pair list is ((A,X),(B,Y))
    matrix = np.array([[1000, 1000], [1000, 1000]])
    sm = match_from_matrix(["A", "B"], ["X", "Y"], matrix)
    assert sm.pairs == (("A", "X"), ("B", "Y"))
    # only one speaker can match; (A,X) beats (B,X)
    matrix = np.array([[500], [500]])
    sm = match_from_matrix(["A", "B"], ["X"], matrix)
    assert sm.pairs == (("A", "X"),)


def test_match_equals_brute_force_on_random_matrices():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 6)
        m = rng.randint(1, 6)
        matrix = np.array(
            [[rng.choice([0, 0, rng.randint(1, 5000)]) for _ in range(m)]
             for _ in range(n)],
            dtype=np.int64,
        )
        labels_r = [f"r{i}" for i in range(n)]
        labels_h = [f"h{j}" for j in range(m)]
        sm = match_from_matrix(labels_r, labels_h, matrix)
        total = sum(
            int(matrix[labels_r.index(r), labels_h.index(h)]) for r, h in sm.pairs
        )
        assert total == brute_force_best_total(matrix)


def test_relabeling_keeps_total_invariant():
    rng = random.Random(3)
    for i in range(30):
        ref = random_annotation(rng, "r", n_speakers=rng.randint(2, 4))
        hyp = perturbed_hypothesis(rng, ref)
        sm1 = match_speakers(ref, hyp)
        renamed = Annotation(
            "r", [Turn("z_" + t.speaker, t.segment) for t in hyp.turns]
        )
        sm2 = match_speakers(ref, renamed)
        m1 = overlap_matrix(ref, hyp)
        m2 = overlap_matrix(ref, renamed)
        total1 = sum(
            int(m1[ref.speakers().index(r), hyp.speakers().index(h)])
            for r, h in sm1.pairs
        )
        total2 = sum(
            int(m2[ref.speakers().index(r), renamed.speakers().index(h)])
            for r, h in sm2.pairs
        )
        assert total1 == total2


def test_self_match_covers_all_speech():
    rng = random.Random(11)
    ref = random_annotation(rng, "r", n_speakers=3)
    sm = match_speakers(ref, ref)
    assert sm.pairs == tuple((s, s) for s in ref.speakers())
    m = overlap_matrix(ref, ref)
    total = sum(int(m[i, i]) for i in range(len(ref.speakers())))
    assert total == sum(t.segment.duration for t in ref.turns)
