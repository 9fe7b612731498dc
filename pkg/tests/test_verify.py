"""Invariant suite: catalog coverage, determinism, and failure isolation."""

import json

import pytest

from willmore.potentials import (
    PotentialDocument,
    builtin_potential,
    document_for,
)
from willmore.scalars import BiPoly
from willmore.verify import CHECK_NAMES, DEFAULT_PLAN, run_suite

SMALL_PLAN = {"samples": 6, "fd_samples": 2, "seed": 3, "oracle_matrices": 4}


@pytest.fixture(scope="module")
def report2():
    return run_suite(builtin_potential(2), SMALL_PLAN)


def test_catalog_is_complete(report2):
    assert [c["name"] for c in report2.checks] == list(CHECK_NAMES)
    assert report2.passed
    for c in report2.checks:
        assert c["passed"], c
        assert c["max_residual"] <= c["tolerance"], c


def test_report_serialization_schema(report2):
    data = report2.to_dict()
    assert data["schema"] == "verification-report/1"
    assert data["m"] == 2
    assert data["potential_digest"] == document_for(builtin_potential(2)).digest()
    assert isinstance(data["singular_radii"], list)
    assert data["passed"] is True
    assert "timing_ms" in data
    assert "timing_ms" not in report2.to_dict(include_timing=False)
    # keys are emitted in a fixed order
    assert list(data)[:2] == ["schema", "potential_digest"]


def test_report_bytes_are_deterministic():
    a = run_suite(builtin_potential(2), SMALL_PLAN)
    b = run_suite(builtin_potential(2), SMALL_PLAN)
    assert a.to_json(include_timing=False) == b.to_json(include_timing=False)


def test_plan_rejects_unknown_keys():
    with pytest.raises(ValueError):
        run_suite(builtin_potential(2), {"sample": 3})


def test_default_plan_documented_keys():
    assert set(SMALL_PLAN) <= set(DEFAULT_PLAN)
    assert DEFAULT_PLAN["tol_fd"] == 1e-6
    assert DEFAULT_PLAN["tol_algebraic"] == 1e-10


def test_corrupted_pairing_fails_only_the_isotropy_check():
    pot = builtin_potential(2)
    rows = [list(r) for r in pot.b1hat()]
    rows[0][0] = rows[0][0] + BiPoly.var_z()
    doc = PotentialDocument(pot.m, pot.h, pot.hhat, tuple(tuple(r) for r in rows))
    rep = run_suite(doc, SMALL_PLAN)
    assert not rep.passed
    failed = [c["name"] for c in rep.checks if not c["passed"]]
    assert failed == ["potential-isotropy"]


def test_singular_radii_are_reported_and_avoided():
    rep = run_suite(builtin_potential(2), dict(SMALL_PLAN, radius=2.0))
    assert any(abs(r - 2 ** 0.5) < 1e-8 for r in rep.singular_radii)
    assert rep.passed


def test_fd_and_algebraic_tolerances_are_tagged(report2):
    kinds = {c["name"]: c["kind"] for c in report2.checks}
    assert kinds["mc-flatness"] == "finite-difference"
    assert kinds["iwasawa-1B"] == "algebraic"
    for c in report2.checks:
        want = 1e-6 if c["kind"] == "finite-difference" else 1e-10
        assert c["tolerance"] == want, c["name"]
