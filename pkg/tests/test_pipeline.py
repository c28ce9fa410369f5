"""
Tests for bblab/pipeline.py: reports, dimension ledgers, the Fujiki scale,
the final assembly and the check registry.

``all_reports`` runs every check once per session; the per-check tests
below it look at individual values and at the failure and blocked paths.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from bblab import pipeline
from bblab.errors import GlueError, LatticeError, LedgerError
from bblab.hilb2_h4 import H4Class, QwKind, k3_model, sigma_coords
from bblab.lattice_core import discriminant_profile, is_even
from bblab.pipeline import (
    CHECKS,
    CheckId,
    DimensionLedger,
    LedgerEquation,
    Provenance,
    Status,
    VerificationReport,
    assemble_final_lattice,
    betti_euler_ledger,
    hilbert_smith_ledger,
    k3_smith_ledger,
    run_check,
    run_checks,
    run_hilb2_quotient,
    run_k3_quotient,
    run_nikulin,
    run_torus_quotient,
    run_z2_cohomology,
    smith_dimension_ledger,
    solve_fujiki_constant,
    summarise,
)


@pytest.fixture(scope="session")
def all_reports() -> list[VerificationReport]:
    return run_checks()


def _statuses(reports: list[VerificationReport]) -> set[Status]:
    return {r.status for r in reports}


# ── VerificationReport ──────────────────────────────────────────────────────


class TestVerificationReport:
    def test_compare_pass(self) -> None:
        r = VerificationReport.compare(CheckId.NIKULIN, "n", "claim", 6, Fraction(12, 2))
        assert r.status is Status.PASS
        assert r.actual == 6
        assert r.provenance is Provenance.PAPER

    def test_compare_rationals_canonically(self) -> None:
        r = VerificationReport.compare(CheckId.NIKULIN, "n", "claim", "1/2", Fraction(1, 2))
        assert r.status is Status.PASS

    def test_compare_fail(self) -> None:
        r = VerificationReport.compare(CheckId.NIKULIN, "n", "claim", [1, 2], [2, 1])
        assert r.status is Status.FAIL

    def test_dict_key_order_does_not_matter(self) -> None:
        r = VerificationReport.compare(
            CheckId.NIKULIN, "n", "claim", {"a": 1, "b": 2}, {"b": 2, "a": 1}
        )
        assert r.status is Status.PASS

    def test_blocked(self) -> None:
        r = VerificationReport.blocked(
            CheckId.FINAL_LATTICE, "n", "claim", 16, Provenance.PAPER, "missing input"
        )
        assert r.status is Status.BLOCKED
        assert r.actual is None
        assert r.detail == "missing input"

    def test_from_error(self) -> None:
        r = VerificationReport.from_error(CheckId.H4_GRAM, LatticeError("boom"))
        assert r.status is Status.FAIL
        assert r.name == "error"
        assert r.actual == "LatticeError: boom"

    def test_to_dict(self) -> None:
        r = VerificationReport.compare(CheckId.NIKULIN, "n", "claim", 1, 1, Provenance.TRIVIAL)
        assert r.to_dict() == {
            "check": "nikulin",
            "name": "n",
            "anchor": "claim",
            "expected": 1,
            "provenance": "TRIVIAL",
            "actual": 1,
            "status": "pass",
            "detail": "",
        }

    def test_summarise_has_every_key(self) -> None:
        assert summarise([]) == {"pass": 0, "fail": 0, "blocked": 0}


# ── ledgers ─────────────────────────────────────────────────────────────────


class TestLedgers:
    def test_render(self) -> None:
        eq = LedgerEquation("restriction", (("h2",), (22,), (8,), ("h3",)))
        assert eq.render() == "h2 - 22 + 8 - h3 = 0"
        assert LedgerEquation("x", ((8,), (1, "h2"))).render() == "8 - (1 + h2) = 0"

    def test_coefficients_and_residual(self) -> None:
        eq = LedgerEquation("blow-up", ((8,), (1, "h2"), (30,), ("h2", 8), ("h3",)))
        assert eq.coefficients() == ({"h2": -2, "h3": 1}, 29)
        assert eq.residual({"h2": 15, "h3": 1}) == 0

    def test_k3(self) -> None:
        assert k3_smith_ledger().solve() == {"h2": 15, "h3": 1}

    def test_hilbert_square(self) -> None:
        assert hilbert_smith_ledger().solve() == {"h2": 36, "h3": 43}

    def test_printed_difference(self) -> None:
        assert hilbert_smith_ledger(printed_sign=True).solve() == {"h2": 22, "h3": 15}

    def test_not_square(self) -> None:
        ledger = DimensionLedger("x", ("a", "b"), (LedgerEquation("e", (("a",), (1,))),))
        with pytest.raises(LedgerError):
            ledger.solve()

    def test_undeclared_unknown(self) -> None:
        ledger = DimensionLedger("x", ("a",), (LedgerEquation("e", (("b",), (1,))),))
        with pytest.raises(LedgerError, match="undeclared"):
            ledger.solve()

    def test_singular(self) -> None:
        eq = LedgerEquation("e", (("a", "b"), (2,)))
        with pytest.raises(LedgerError, match="do not determine"):
            DimensionLedger("x", ("a", "b"), (eq, eq)).solve()

    def test_negative_solution(self) -> None:
        ledger = DimensionLedger("x", ("a",), (LedgerEquation("e", (("a", 3), (1,))),))
        with pytest.raises(LedgerError, match="non-negative"):
            ledger.solve()

    def test_smith_reports(self) -> None:
        reports = smith_dimension_ledger()
        assert _statuses(reports) == {Status.PASS}
        assert [r.actual for r in reports if r.name.startswith("image")] == [8, 7]

    def test_betti_reports(self) -> None:
        reports = {r.name: r.actual for r in betti_euler_ledger()}
        assert reports["b2"] == 16
        assert reports["b4"] == 178
        assert reports["χ"] == 212


# ── individual checks ───────────────────────────────────────────────────────


class TestSmallChecks:
    def test_torus(self) -> None:
        assert _statuses(run_torus_quotient()) == {Status.PASS}

    def test_nikulin(self) -> None:
        assert _statuses(run_nikulin()) == {Status.PASS}

    def test_z2_cohomology(self) -> None:
        reports = {r.name: r for r in run_z2_cohomology()}
        assert reports["H^2 of the Hilbert-square module"].actual == "(Z/2)^7"
        assert reports["torsion balance"].actual == [7, 7]
        assert all(r.status is Status.PASS for r in reports.values())

    def test_k3_quotient(self) -> None:
        reports = run_k3_quotient()
        assert _statuses(reports) == {Status.PASS}
        glue = reports[-1]
        assert glue.actual == {"status": "found", "rank": 22, "signature": [3, 19], "abs_det": 1}

    def test_k3_quotient_with_exhausted_bound(self) -> None:
        glue = run_k3_quotient(glue_bound=0)[-1]
        assert glue.status is Status.FAIL
        assert glue.actual == {"status": "bound_exhausted"}


class TestFujikiConstant:
    def test_scale_and_constant(self) -> None:
        sol = solve_fujiki_constant()
        assert sol.scale == 2
        assert sol.constant == 6

    def test_sigma_square_two_ways(self) -> None:
        sol = solve_fujiki_constant()
        assert sol.sigma_square == -4
        assert sol.sigma_square_from_delta == -4

    def test_orthogonality(self) -> None:
        sol = solve_fujiki_constant()
        assert len(sol.orthogonality) == 14
        assert all(row == (0, 0) for row in sol.orthogonality)
        assert sol.orthogonal

    def test_orthogonality_follows_the_degree4_data(self, monkeypatch: pytest.MonkeyPatch) -> None:
        model = k3_model()
        shifted = list(sigma_coords(model).coords)
        shifted[model.index(QwKind.POINT)] += 1
        monkeypatch.setattr(
            pipeline, "sigma_coords", lambda model=None: H4Class("sigma", tuple(shifted))
        )
        sol = solve_fujiki_constant()
        # δ²·pt = -1 and, for the first E8 pair, x²·pt = B(x, x) = -4
        assert sol.sigma_square_from_delta == -5
        assert sol.orthogonality[0] == (Fraction(4), Fraction(0))
        assert not sol.orthogonal
        reports = {r.name: r for r in run_check(CheckId.FUJIKI_CONSTANT)}
        assert reports["Σ′ is orthogonal to pushed classes"].status is Status.FAIL

    def test_form_square_is_trivial_and_delta_square_is_anchored(self) -> None:
        reports = {r.name: r for r in run_check(CheckId.FUJIKI_CONSTANT)}
        assert reports["B(Σ′, Σ′) in the form"].provenance is Provenance.TRIVIAL
        assert reports["B(Σ′, Σ′) from δ²·Σ"].provenance is Provenance.PAPER
        assert reports["B(Σ′, Σ′) from δ²·Σ"].expected == -4


class TestFinalAssembly:
    def test_target(self) -> None:
        final = assemble_final_lattice(2)
        lattice = final.overlattice.lattice
        assert lattice.rank == 16
        assert is_even(lattice)
        p = discriminant_profile(lattice)
        assert p.signature == (3, 13)
        assert p.invariant_factors == (2,) * 8
        assert final.change.T @ lattice.gram @ final.change == final.target.gram

    def test_scale_one_is_not_integral(self) -> None:
        with pytest.raises(GlueError):
            assemble_final_lattice(1)

    def test_blocked_when_a_certificate_fails(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setattr(pipeline, "_final_certificates", lambda: ["parity of δ² - Σ"])
        reports = run_hilb2_quotient()
        assert len(reports) == 4
        assert _statuses(reports) == {Status.BLOCKED}
        assert all("parity" in r.detail for r in reports)


# ── registry ────────────────────────────────────────────────────────────────


class TestRegistry:
    def test_every_check_is_registered(self) -> None:
        assert set(CHECKS) == set(CheckId)

    def test_error_becomes_a_failed_report(self, monkeypatch: pytest.MonkeyPatch) -> None:
        def broken() -> list[VerificationReport]:
            raise LatticeError("rules inconsistent")

        monkeypatch.setitem(CHECKS, CheckId.BETTI_EULER, broken)
        (report,) = run_check(CheckId.BETTI_EULER)
        assert report.status is Status.FAIL
        assert "rules inconsistent" in report.actual

    def test_selection_runs_in_id_order(self) -> None:
        reports = run_checks([CheckId.SMITH_DIMS, CheckId.NIKULIN])
        checks = [r.check for r in reports]
        assert checks == sorted(checks, key=list(CheckId).index)
        assert set(checks) == {CheckId.NIKULIN, CheckId.SMITH_DIMS}


class TestFullRun:
    """Every check end to end on the K3 data."""

    def test_all_pass(self, all_reports: list[VerificationReport]) -> None:
        failing = [(r.check, r.name, r.actual) for r in all_reports if r.status is not Status.PASS]
        assert failing == []

    def test_every_check_reports(self, all_reports: list[VerificationReport]) -> None:
        assert {r.check for r in all_reports} == set(CheckId)

    def test_final_lattice_values(self, all_reports: list[VerificationReport]) -> None:
        final = {r.name: r.actual for r in all_reports if r.check is CheckId.FINAL_LATTICE}
        assert final["rank"] == 16
        assert final["glue pair"] == [[-2, 0], [0, -2]]
