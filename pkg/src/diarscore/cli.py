"""Command-line entry point: score, simulate, inspect-merge.

Exit codes: 0 success, 2 malformed input or usage error, 3 when any
recording yields an undefined CDER (reports are still emitted).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import cder as cder_mod
from . import der as der_mod
from . import plotting, rttm_io, simulator
from .timeline import Annotation, SameSpeakerOverlap, ms_to_seconds_str


def _load_annotations(path: Path) -> dict[str, Annotation]:
    """Parse a file or a directory of *.rttm files, keyed by file_id."""
    files: list[Path]
    if path.is_dir():
        files = sorted(path.glob("*.rttm"))
    else:
        files = [path]
    out: dict[str, Annotation] = {}
    for f in files:
        try:
            anns = rttm_io.parse_rttm(f.read_text(encoding="utf-8"))
        except (rttm_io.MalformedLine, SameSpeakerOverlap) as exc:
            raise _InputError(f"{f}: {exc}") from exc
        for ann in anns:
            if ann.recording_id in out:
                merged = list(out[ann.recording_id].turns) + list(ann.turns)
                out[ann.recording_id] = Annotation(ann.recording_id, merged)
            else:
                out[ann.recording_id] = ann
    return out


class _InputError(Exception):
    pass


def _cmd_score(args) -> int:
    try:
        refs = _load_annotations(Path(args.ref))
        hyps = _load_annotations(Path(args.hyp))
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not refs:
        print("error: reference contains no recordings", file=sys.stderr)
        return 2
    for extra in sorted(set(hyps) - set(refs)):
        print(f"warning: hypothesis recording {extra!r} has no reference; "
              "ignored", file=sys.stderr)

    want_der = args.metric in ("der", "all")
    want_cder = args.metric in ("cder", "all")
    der_cfg = der_mod.DerConfig(collar_s=args.collar)
    cder_cfg = cder_mod.CderConfig(
        eta=args.eta,
        count_unmatched_hyp_speakers=args.count_unmatched_hyp_speakers,
    )

    entries: list[rttm_io.ReportEntry] = []
    any_undefined = False
    for rec_id in sorted(refs):
        ref = refs[rec_id]
        hyp = hyps.get(rec_id)
        if hyp is None:
            print(f"warning: no hypothesis for recording {rec_id!r}; "
                  "scored as all-miss / unmatched speakers", file=sys.stderr)
            hyp = Annotation(rec_id, [])
        entry = rttm_io.ReportEntry(recording_id=rec_id)
        if want_der:
            entry.der = der_mod.compute_der(ref, hyp, der_cfg)
        if want_cder:
            try:
                entry.cder = cder_mod.compute_cder(ref, hyp, cder_cfg)
            except cder_mod.UndefinedMetric:
                entry.cder_undefined = True
                any_undefined = True
                print(f"warning: CDER undefined for recording {rec_id!r} "
                      "(no matched reference speaker)", file=sys.stderr)
        entries.append(entry)

    overall = rttm_io.ReportEntry(recording_id="OVERALL")
    if want_der:
        overall.der = der_mod.aggregate_der([e.der for e in entries if e.der])
    if want_cder:
        defined = [e.cder for e in entries if e.cder is not None]
        if defined:
            overall.cder = cder_mod.aggregate_cder(defined)
            overall.cder_macro = cder_mod.macro_cder(defined)
        else:
            overall.cder_undefined = True
    per_file = entries if args.per_file else []
    sys.stdout.write(rttm_io.write_report(per_file, overall, args.format))
    if args.figure:
        plotting.save_score_figure(entries + [overall], args.figure)
    return 3 if any_undefined else 0


def _cmd_simulate(args) -> int:
    profile = simulator.DialogProfile(
        duration_min=args.duration_min,
        turn_taking_rate=args.turn_taking_rate,
        overlap_prob=args.overlap_prob,
        rng_seed=args.seed,
    )
    grid = simulator.default_error_grid(args.n_systems, seed=args.seed)
    rows, pearson = simulator.correlation_study(
        args.n_systems, profile, grid, n_dialogs=args.n_dialogs, eta=args.eta
    )
    out = Path(args.out)
    try:
        out.write_text(simulator.study_rows_to_csv(rows), encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return 2
    if not args.no_figure:
        plotting.save_correlation_figure(rows, str(out.with_suffix(".png")))
    print(f"pearson_r {pearson:.4f}")
    return 0


def _cmd_inspect_merge(args) -> int:
    try:
        anns = rttm_io.parse_rttm(Path(args.path).read_text(encoding="utf-8"))
    except (rttm_io.MalformedLine, SameSpeakerOverlap) as exc:
        print(f"error: {args.path}: {exc}", file=sys.stderr)
        return 2
    if not anns:
        print("no recordings")
        return 0
    for ann in anns:
        print(f"recording {ann.recording_id}")
        merged = cder_mod.merge_utterances(ann)
        flat = sorted(
            (u for utts in merged.values() for u in utts),
            key=lambda u: (u.segment.start, u.speaker),
        )
        for u in flat:
            print(
                f"  {u.speaker} {ms_to_seconds_str(u.segment.start)} "
                f"{ms_to_seconds_str(u.segment.end)} {u.source_count}"
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diarscore",
        description="Speaker diarization scoring: DER, conversational "
        "utterance-level DER (CDER), and a synthetic-error simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score hypothesis RTTM against reference")
    p_score.add_argument("--ref", required=True, help="reference RTTM file or directory")
    p_score.add_argument("--hyp", required=True, help="hypothesis RTTM file or directory")
    p_score.add_argument("--metric", choices=["der", "cder", "all"], default="all")
    p_score.add_argument("--collar", type=float, default=0.25,
                         help="no-score collar in seconds (DER only)")
    p_score.add_argument("--eta", type=float, default=0.5,
                         help="IoU threshold for utterance correctness (CDER only)")
    p_score.add_argument("--format", choices=["json", "csv", "text"], default="text")
    p_score.add_argument("--per-file", action="store_true",
                         help="emit per-recording rows in addition to OVERALL")
    p_score.add_argument("--count-unmatched-hyp-speakers", action="store_true",
                         help="count utterances of unmatched hypothesis speakers as errors")
    p_score.add_argument("--figure", default=None,
                         help="also render a per-recording DER/CDER bar chart to this path")
    p_score.set_defaults(func=_cmd_score)

    p_sim = sub.add_parser("simulate",
                           help="run the CDER/DER correlation study on synthetic dialogs")
    p_sim.add_argument("--n-systems", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.add_argument("--n-dialogs", type=int, default=3)
    p_sim.add_argument("--duration-min", type=float, default=30.8)
    p_sim.add_argument("--turn-taking-rate", type=float, default=0.7)
    p_sim.add_argument("--overlap-prob", type=float, default=0.15)
    p_sim.add_argument("--eta", type=float, default=0.5)
    p_sim.add_argument("--no-figure", action="store_true",
                       help="skip the scatter figure next to the CSV")
    p_sim.set_defaults(func=_cmd_simulate)

    p_merge = sub.add_parser("inspect-merge",
                             help="print merged utterance runs of an RTTM file")
    p_merge.add_argument("path")
    p_merge.set_defaults(func=_cmd_inspect_merge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.n_systems < 2:
        parser.error("--n-systems must be at least 2")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
