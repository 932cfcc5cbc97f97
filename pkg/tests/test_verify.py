"""Engine-level behavior: claim dispatch, negative controls, report
aggregation, and the certificates section."""

import pytest

from dcs import atlas
from dcs.paths import Atom
from dcs.projective import HPoint
from dcs.report import FAIL, INCONCLUSIVE, PASS, ClaimReport, classify_distance, dumps
from dcs.strata import validate
from dcs.verify import (
    ALL_CLAIM_IDS,
    RunConfig,
    _fiber_vector_check,
    run_verification,
    verify_claim,
)


def test_unknown_claim_rejected():
    with pytest.raises(atlas.AtlasError):
        verify_claim("C16", RunConfig())


def test_perturbed_expected_vector_fails():
    rep = ClaimReport("demo", "winding-relation")
    _fiber_vector_check(rep, "control", Atom("Psi_tilde_S1"), 3, (1, 1, 3), RunConfig())
    assert rep.verdict == FAIL
    assert "[1, 1, 2]" in rep.checks[-1].note


def test_correct_expected_vector_passes():
    rep = ClaimReport("demo", "winding-relation")
    _fiber_vector_check(rep, "control", Atom("Psi_tilde_S1"), 3, (1, 1, 2), RunConfig())
    assert rep.verdict == PASS


def test_classify_distance_tiers():
    assert classify_distance(1e-15, 1e-9, 1e-12) == PASS
    assert classify_distance(1e-13, 1e-30, 1e-12) == INCONCLUSIVE
    assert classify_distance(0.5, 1e-9, 1e-12) == FAIL


def test_claim_report_aggregation():
    rep = ClaimReport("demo", "membership")
    rep.add("a", PASS)
    assert rep.verdict == PASS
    rep.add("b", INCONCLUSIVE)
    assert rep.verdict == INCONCLUSIVE
    rep.add("c", FAIL)
    assert rep.verdict == FAIL


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(circle_samples=16)
    with pytest.raises(ValueError):
        RunConfig(disk_grid=(8, 8))


def test_c9_report_documents_the_discrepancy():
    rep = verify_claim("C9", RunConfig())
    assert rep.verdict == PASS
    assert rep.extra["stated_t0_distance"] > 0.1
    assert any("frozen" in c.name for c in rep.checks)
    assert any("doubles the third" in n or "twice" in n for n in rep.notes)


def test_c15_reports_display_distances_without_gating():
    rep = verify_claim("C15", RunConfig())
    assert rep.verdict == PASS
    assert "display_distances" in rep.extra


def test_partial_run_has_no_global_sections():
    run = run_verification(RunConfig(), ["C3"])
    assert run.certificates == {} and run.winding_tables == {}
    assert run.exit_code() == 0


def test_env_thread_pool(monkeypatch):
    monkeypatch.setenv("DCS_THREADS", "2")
    serial = run_verification(RunConfig(), ["C3", "C5"])
    monkeypatch.delenv("DCS_THREADS")
    ref = run_verification(RunConfig(), ["C3", "C5"])
    assert dumps(serial.to_json()) == dumps(ref.to_json())


def test_validator_imposes_only_written_conditions():
    # three first points collinear across the lines is allowed: membership
    # requires only distinctness, concurrency, spacing from the center, span
    pts = [
        HPoint([-1, 1, 0]), HPoint([-1, 1, 2]),
        HPoint([-1, 2, 0]), HPoint([-1, 2, 2]),
        HPoint([0, 1, 0]), HPoint([0, 1, 2]),
    ]
    rep = validate(pts, atlas.TAG_PLANAR_FIXED_2)
    assert rep.verdict, rep.failures
    from dcs.projective import span_dim

    assert span_dim([pts[0], pts[2], pts[4]]) == 1  # indeed collinear


def test_all_claim_ids_have_verifiers():
    assert set(ALL_CLAIM_IDS) == {f"C{i}" for i in range(1, 16)}
    registry_ids = {c.id for c in atlas.claims()}
    assert registry_ids == set(ALL_CLAIM_IDS)
