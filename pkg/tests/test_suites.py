import os

import pytest

from pklab.suites import CHECK_NAMES, demo_einstein, run_suite


def test_unknown_check_rejected(triples):
    with pytest.raises(ValueError, match="unknown check"):
        run_suite(triples["dim-d2-2"], ["flatness", "nope"], n_points=3)


def test_nonpositive_tolerance_rejected(triples):
    with pytest.raises(ValueError, match="positive"):
        run_suite(triples["dim-d2-2"], ["flatness"], n_points=3,
                  tolerances={"flatness/riemann": 0.0})


def test_full_check_list_runs_on_plain_family(triples):
    report = run_suite(triples["dim-d2-2"], list(CHECK_NAMES), n_points=4)
    assert report.all_passed, [c.name for c in report.checks if not c.passed]
    by_name = {c.name: c for c in report.checks}
    # checks that need declared Einstein data are flagged, not failed
    assert "no-einstein-constant-declared" in by_name["einstein/metric"].flags
    assert by_name["flatness/riemann"].points == 4  # this family is flat, so it ran


def test_flatness_skipped_on_curved_family(triples):
    report = run_suite(triples["real-liouville"], ["flatness"], n_points=3)
    check = report.checks[0]
    assert check.passed and "not-declared-flat" in check.flags


def test_thread_pool_matches_serial(triples, monkeypatch):
    names = ["rank", "flatness", "benenti"]
    serial = run_suite(triples["dim-d2-4"], names, n_points=4, seed=2)
    monkeypatch.setenv("PKLAB_THREADS", "3")
    threaded = run_suite(triples["dim-d2-4"], names, n_points=4, seed=2)
    assert serial.to_json() == threaded.to_json()


def test_adapted_chart_extra_checks_present(triples):
    report = run_suite(triples["dim-d1"], ["benenti", "companion"], n_points=4)
    names = {c.name for c in report.checks}
    assert "benenti/adapted-block" in names
    assert "companion/potential-exponential" in names
    assert report.all_passed


def test_demo_passes_and_is_deterministic():
    a = demo_einstein(n_points=5, seed=1)
    b = demo_einstein(n_points=5, seed=1)
    assert a.all_passed
    assert a.to_json() == b.to_json()
