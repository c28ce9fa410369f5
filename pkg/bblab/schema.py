"""
bblab/schema.py
-----------------------------------------------------------------------------
Pydantic v2 models for everything bblab writes out: lattices (catalog view and
label/gram interchange form), profiles, degree-4 classes,
verification reports and the report envelope.

Design principles
-----------------
• Keep models thin: construction from domain objects lives in
  ``bblab.reporting``.
• Rationals appear as ``"p/q"`` strings (canonical JSON, see
  ``bblab.hashing``); integers stay integers.
• Vocabularies (status, provenance, parity) are closed ``Literal`` sets so a
  malformed report fails validation instead of slipping through.
"""

from __future__ import annotations

import re
from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator, model_validator

_DIGEST_RE = re.compile(r"^[0-9a-f]{64}$")


def _square_and_symmetric(v: list[list[int]]) -> list[list[int]]:
    n = len(v)
    if any(len(row) != n for row in v):
        raise ValueError("Gram matrix must be square")
    if any(v[i][j] != v[j][i] for i in range(n) for j in range(i + 1, n)):
        raise ValueError("Gram matrix must be symmetric")
    return v


# -----------------------------------------------------------------------------
# Matrices and lattices
# -----------------------------------------------------------------------------


class GramModel(BaseModel):
    """A square symmetric integer matrix given by rows."""

    rows: list[list[int]] = Field(..., description="Matrix rows; square and symmetric.")

    @field_validator("rows")
    @classmethod
    def square_and_symmetric(cls, v: list[list[int]]) -> list[list[int]]:
        return _square_and_symmetric(v)


class ProfileModel(BaseModel):
    """Discriminant profile of a nondegenerate lattice."""

    rank: int = Field(..., ge=0)
    signature: tuple[int, int]
    parity: Literal["even", "odd"]
    determinant: int
    discriminant_group: list[int] = Field(
        ..., description="Invariant factors > 1 of the discriminant group."
    )
    form_values: list[int | str] = Field(
        ..., description="Sorted discriminant-form values as canonical rationals."
    )
    form_values_complete: bool = Field(
        ..., description="Whether the values cover the whole discriminant group."
    )

    @model_validator(mode="after")
    def signature_fits_rank(self) -> ProfileModel:
        if sum(self.signature) > self.rank:
            raise ValueError("signature exceeds the rank")
        return self


class LatticeJSON(BaseModel):
    """Interchange form of a lattice: a label and its Gram rows."""

    label: str
    gram: list[list[int]]

    @field_validator("gram")
    @classmethod
    def gram_is_square_and_symmetric(cls, v: list[list[int]]) -> list[list[int]]:
        return _square_and_symmetric(v)


class SublatticeJSON(LatticeJSON):
    """Interchange form of a sublattice: its own Gram plus ambient label and basis columns."""

    ambient: str
    basis: list[list[int]] = Field(..., description="Basis vectors, one list per column.")

    @model_validator(mode="after")
    def basis_matches_gram(self) -> SublatticeJSON:
        if len(self.basis) != len(self.gram):
            raise ValueError("number of basis vectors does not match the Gram matrix")
        if len({len(b) for b in self.basis}) > 1:
            raise ValueError("basis vectors have different lengths")
        return self


class SublatticeModel(BaseModel):
    """A sublattice by its basis columns in ambient coordinates."""

    ambient: str
    basis: list[list[int]] = Field(..., description="Basis vectors, one list per column.")
    gram: GramModel

    @model_validator(mode="after")
    def basis_matches_gram(self) -> SublatticeModel:
        if len(self.basis) != len(self.gram.rows):
            raise ValueError("number of basis vectors does not match the Gram matrix")
        return self


class LatticeModel(BaseModel):
    """A catalog lattice with its Gram and profile."""

    name: str = Field(..., examples=["E8(-1)", "Nikulin"])
    rank: int = Field(..., ge=0)
    gram: GramModel
    profile: ProfileModel | None = Field(
        default=None, description="Absent for degenerate lattices."
    )
    generators: list[list[int | str]] | None = Field(
        default=None,
        description="Presentation generators in the coordinates of the lattice they were glued to.",
    )
    glue: list[list[int | str]] | None = Field(
        default=None, description="Glue vectors adjoined to obtain the lattice."
    )
    invariant: SublatticeModel | None = Field(
        default=None, description="Invariant sublattice of the involution the lattice carries."
    )

    @model_validator(mode="after")
    def rank_matches_gram(self) -> LatticeModel:
        if len(self.gram.rows) != self.rank:
            raise ValueError("rank does not match the Gram matrix")
        return self


class H4ClassModel(BaseModel):
    """A degree-4 class of the Hilbert square in the integral basis."""

    name: Literal["delta2", "sigma"]
    model: str = Field(..., description="Surface the Hilbert square is built on.")
    coords: list[int]
    support: list[tuple[str, int]] = Field(
        ..., description="Basis labels with nonzero coefficients."
    )
    self_pairing: int


# -----------------------------------------------------------------------------
# Reports
# -----------------------------------------------------------------------------


class ReportModel(BaseModel):
    """One expected-versus-actual comparison."""

    check: str = Field(..., examples=["final-lattice"])
    name: str
    anchor: str = Field(..., description="The claim the comparison certifies.")
    expected: Any
    provenance: Literal["PAPER", "TRIVIAL", "DERIVED"]
    actual: Any
    status: Literal["pass", "fail", "blocked"]
    detail: str = ""


class ReportEnvelope(BaseModel):
    """The JSON document written by ``bblab verify``."""

    version: str
    summary: dict[str, int]
    digest: str = Field(..., description="SHA-256 of the canonical JSON of ``reports``.")
    reports: list[ReportModel]

    @field_validator("summary")
    @classmethod
    def summary_keys(cls, v: dict[str, int]) -> dict[str, int]:
        if set(v) != {"pass", "fail", "blocked"}:
            raise ValueError("summary must count exactly pass, fail and blocked")
        return v

    @field_validator("digest")
    @classmethod
    def digest_is_hex(cls, v: str) -> str:
        if not _DIGEST_RE.match(v):
            raise ValueError("digest must be 64 lowercase hex characters")
        return v

    @model_validator(mode="after")
    def summary_matches_reports(self) -> ReportEnvelope:
        if sum(self.summary.values()) != len(self.reports):
            raise ValueError("summary counts do not add up to the number of reports")
        return self
