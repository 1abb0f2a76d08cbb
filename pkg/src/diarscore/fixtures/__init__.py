"""Golden fixture corpus and its standalone verification harness.

Each fixture directory holds ref.rttm, hyp.rttm and expected.json. Every
expected value carries a source note saying how it was obtained; derived
values are re-checked against the brute-force oracles on every
verification run.

Run standalone with:  python -m diarscore.fixtures
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ..cder import CderConfig, UndefinedMetric, compute_cder, merge_utterances
from ..der import DerConfig, compute_der
from ..oracle import grid_der
from ..rttm_io import parse_rttm
from ..timeline import Annotation


@dataclass
class CheckResult:
    fixture: str
    check: str
    ok: bool
    detail: str = ""


def fixture_names() -> list[str]:
    root = resources.files(__package__)
    return sorted(
        entry.name
        for entry in root.iterdir()
        if entry.is_dir() and (entry / "expected.json").is_file()
    )


def load_fixture(name: str):
    root = resources.files(__package__) / name
    ref_anns = parse_rttm((root / "ref.rttm").read_text(encoding="utf-8"))
    hyp_anns = parse_rttm((root / "hyp.rttm").read_text(encoding="utf-8"))
    expected = json.loads((root / "expected.json").read_text(encoding="utf-8"))
    assert len(ref_anns) == 1, f"fixture {name} must hold exactly one recording"
    ref = ref_anns[0]
    hyp = hyp_anns[0] if hyp_anns else Annotation(ref.recording_id, [])
    return ref, hyp, expected


def _flatten_merged(ann: Annotation) -> list[list]:
    merged = merge_utterances(ann)
    flat = sorted(
        (u for utts in merged.values() for u in utts),
        key=lambda u: (u.segment.start, u.speaker),
    )
    return [[u.speaker, u.segment.start, u.segment.end, u.source_count] for u in flat]


def verify_fixtures() -> list[CheckResult]:
    """Recompute every fixture through the pipeline and the oracles.

    Mismatches are reported, not thrown.
    """
    results: list[CheckResult] = []
    for name in fixture_names():
        ref, hyp, expected = load_fixture(name)

        if "merged_ref" in expected:
            got = _flatten_merged(ref)
            want = expected["merged_ref"]["value"]
            results.append(
                CheckResult(name, "merged_ref", got == want,
                            "" if got == want else f"got {got}, want {want}")
            )

        for key, cfg_kwargs in (
            ("der_collar_0", {"collar_s": 0.0}),
            ("der_collar_0.25", {"collar_s": 0.25}),
        ):
            if key not in expected:
                continue
            want = expected[key]["value"]
            cfg = DerConfig(**cfg_kwargs)
            rep = compute_der(ref, hyp, cfg)
            got = {
                "miss_ms": rep.miss_ms,
                "fa_ms": rep.fa_ms,
                "error_ms": rep.error_ms,
                "total_ms": rep.total_ms,
            }
            ok = got == {k: want[k] for k in got}
            results.append(
                CheckResult(name, key, ok,
                            "" if ok else f"got {got}, want {want}")
            )
            grid = grid_der(ref, hyp, cfg)
            ok_grid = (grid.miss_ms, grid.fa_ms, grid.error_ms, grid.total_ms) == (
                rep.miss_ms, rep.fa_ms, rep.error_ms, rep.total_ms
            )
            results.append(
                CheckResult(name, key + "_grid_oracle", ok_grid,
                            "" if ok_grid else f"grid {grid} vs sweep {rep}")
            )

        if "cder" in expected:
            want = expected["cder"]["value"]
            eta = want.get("eta", 0.5)
            try:
                rep = compute_cder(ref, hyp, CderConfig(eta=eta))
                got = {"n_error": rep.n_error, "n_total": rep.n_total}
                if want.get("undefined"):
                    results.append(CheckResult(name, "cder", False,
                                               f"expected undefined, got {got}"))
                else:
                    ok = got == {k: want[k] for k in got}
                    results.append(
                        CheckResult(name, "cder", ok,
                                    "" if ok else f"got {got}, want {want}")
                    )
            except UndefinedMetric:
                ok = bool(want.get("undefined"))
                results.append(
                    CheckResult(name, "cder", ok,
                                "" if ok else "unexpected UndefinedMetric")
                )
    return results


def main() -> int:
    results = verify_fixtures()
    failed = 0
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        line = f"[{status}] {r.fixture}: {r.check}"
        if r.detail:
            line += f" ({r.detail})"
        print(line)
        failed += not r.ok
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
