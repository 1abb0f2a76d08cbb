from diarscore.fixtures import fixture_names, main, verify_fixtures


def test_all_fixture_checks_pass():
    results = verify_fixtures()
    assert results, "no fixture checks ran"
    failures = [r for r in results if not r.ok]
    assert not failures, failures


def test_expected_fixture_set_present():
    names = fixture_names()
    for required in (
        "identity",
        "merge_runs",
        "cder_one_third",
        "der_miss",
        "der_confusion",
        "undefined_empty_hyp",
    ):
        assert required in names


def test_standalone_harness_exit_code(capsys):
    assert main() == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "[FAIL]" not in out
