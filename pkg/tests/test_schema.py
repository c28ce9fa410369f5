"""
Tests for bblab/schema.py: validation rules of the output models.
"""

from __future__ import annotations

from typing import Any

import pytest
from pydantic import ValidationError

from bblab.hashing import compute_digest
from bblab.schema import (
    GramModel,
    LatticeJSON,
    LatticeModel,
    ProfileModel,
    ReportEnvelope,
    ReportModel,
    SublatticeJSON,
    SublatticeModel,
)


def _report(**overrides: Any) -> dict[str, Any]:
    row: dict[str, Any] = {
        "check": "nikulin",
        "name": "rank",
        "anchor": "the Nikulin lattice has rank 8",
        "expected": 8,
        "provenance": "PAPER",
        "actual": 8,
        "status": "pass",
    }
    row.update(overrides)
    return row


def _profile(**overrides: Any) -> dict[str, Any]:
    p: dict[str, Any] = {
        "rank": 2,
        "signature": (1, 1),
        "parity": "even",
        "determinant": -1,
        "discriminant_group": [],
        "form_values": [],
        "form_values_complete": True,
    }
    p.update(overrides)
    return p


# ── GramModel ───────────────────────────────────────────────────────────────


class TestGramModel:
    def test_valid(self) -> None:
        assert GramModel(rows=[[0, 1], [1, 0]]).rows == [[0, 1], [1, 0]]

    def test_empty_is_allowed(self) -> None:
        assert GramModel(rows=[]).rows == []

    def test_not_square(self) -> None:
        with pytest.raises(ValidationError, match="square"):
            GramModel(rows=[[1, 0]])

    def test_not_symmetric(self) -> None:
        with pytest.raises(ValidationError, match="symmetric"):
            GramModel(rows=[[0, 1], [2, 0]])


# ── lattices ────────────────────────────────────────────────────────────────


class TestProfileModel:
    def test_valid(self) -> None:
        assert ProfileModel(**_profile()).parity == "even"

    def test_signature_exceeds_rank(self) -> None:
        with pytest.raises(ValidationError, match="signature"):
            ProfileModel(**_profile(signature=(2, 1)))

    def test_parity_vocabulary(self) -> None:
        with pytest.raises(ValidationError):
            ProfileModel(**_profile(parity="neither"))


class TestLatticeModel:
    def test_rank_mismatch(self) -> None:
        with pytest.raises(ValidationError, match="rank"):
            LatticeModel(name="U", rank=3, gram=GramModel(rows=[[0, 1], [1, 0]]))

    def test_optional_fields_default_to_none(self) -> None:
        model = LatticeModel(name="U", rank=2, gram=GramModel(rows=[[0, 1], [1, 0]]))
        assert model.profile is None
        assert model.generators is None
        assert model.invariant is None

    def test_sublattice_basis_must_match_gram(self) -> None:
        with pytest.raises(ValidationError, match="basis"):
            SublatticeModel(ambient="U", basis=[[1, 0], [0, 1]], gram=GramModel(rows=[[0]]))

    def test_interchange_gram_must_be_symmetric(self) -> None:
        with pytest.raises(ValidationError, match="symmetric"):
            LatticeJSON(label="bad", gram=[[0, 1], [2, 0]])

    def test_interchange_sublattice_basis_lengths_agree(self) -> None:
        with pytest.raises(ValidationError, match="different lengths"):
            SublatticeJSON(label="", gram=[[0, 0], [0, 0]], ambient="U", basis=[[1, 0], [1]])

    def test_interchange_sublattice_basis_must_match_gram(self) -> None:
        with pytest.raises(ValidationError, match="basis"):
            SublatticeJSON(label="", gram=[[0]], ambient="U", basis=[[1, 0], [0, 1]])


# ── reports ─────────────────────────────────────────────────────────────────


class TestReportModel:
    def test_detail_defaults_to_empty(self) -> None:
        assert ReportModel(**_report()).detail == ""

    @pytest.mark.parametrize(
        "field, value", [("status", "skipped"), ("provenance", "GUESS")]
    )
    def test_closed_vocabularies(self, field: str, value: str) -> None:
        with pytest.raises(ValidationError):
            ReportModel(**_report(**{field: value}))


class TestReportEnvelope:
    def _envelope(self, **overrides: Any) -> dict[str, Any]:
        rows = [_report(), _report(name="det", status="fail")]
        env: dict[str, Any] = {
            "version": "0.1.0",
            "summary": {"pass": 1, "fail": 1, "blocked": 0},
            "digest": compute_digest(rows),
            "reports": rows,
        }
        env.update(overrides)
        return env

    def test_valid(self) -> None:
        assert len(ReportEnvelope(**self._envelope()).reports) == 2

    def test_summary_keys(self) -> None:
        with pytest.raises(ValidationError, match="summary"):
            ReportEnvelope(**self._envelope(summary={"pass": 2}))

    def test_summary_counts(self) -> None:
        with pytest.raises(ValidationError, match="add up"):
            ReportEnvelope(**self._envelope(summary={"pass": 3, "fail": 0, "blocked": 0}))

    @pytest.mark.parametrize("digest", ["abc", "A" * 64, "g" * 64])
    def test_digest_format(self, digest: str) -> None:
        with pytest.raises(ValidationError, match="digest"):
            ReportEnvelope(**self._envelope(digest=digest))
