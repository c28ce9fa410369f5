"""
bblab/reporting.py
-----------------------------------------------------------------------------
Turns domain objects into the pydantic models of ``bblab.schema`` and
renders them as JSON or Markdown.

Each function is a pure formatter: it takes domain values and returns a
model or a string.  File output is the caller's job (CLI or HTTP layer).

Exports
-------
build_envelope(reports) -> ReportEnvelope
envelope_json(envelope) -> str
render_report_markdown(envelope) -> str
gram_model(matrix) -> GramModel
profile_model(lattice) -> ProfileModel | None
sublattice_model(sub, ambient) -> SublatticeModel
lattice_model(name) -> LatticeModel
render_lattice_markdown(model) -> str
h4_class_model(name) -> H4ClassModel
lattice_json(lattice) -> LatticeJSON
lattice_from_json(model) -> Lattice
sublattice_json(sub, label) -> SublatticeJSON
sublattice_from_json(model, ambient) -> Sublattice

Design notes
------------
JSON output is indented and key-sorted so repeated runs are byte-identical.
The digest in the envelope is computed over the compact canonical form of
the report list, not over the indented file.
The interchange form keeps only label, Gram and, for sublattices, the ambient
label and basis columns; dumping it with ``canonical_json`` and reading it back
reproduces the same bytes.
"""

from __future__ import annotations

import itertools
import json
from typing import Any, Iterable

from jinja2 import Environment, PackageLoader, StrictUndefined, select_autoescape

from bblab.catalog import lattice_by_name, make_hilb2, make_k3, make_torus, nikulin_presentation
from bblab.config import VERSION
from bblab.errors import DegenerateLatticeError, DimensionError
from bblab.exact_linalg import IntMatrix
from bblab.hashing import canonical_json, compute_digest, to_canonical
from bblab.hilb2_h4 import delta_squared_coords, h4_pairing, k3_model, sigma_coords
from bblab.lattice_core import Lattice, Sublattice, discriminant_profile, invariant_sublattice
from bblab.pipeline import VerificationReport, summarise
from bblab.schema import (
    GramModel,
    H4ClassModel,
    LatticeJSON,
    LatticeModel,
    ProfileModel,
    ReportEnvelope,
    ReportModel,
    SublatticeJSON,
    SublatticeModel,
)

# -----------------------------------------------------------------------------
# Templates
# -----------------------------------------------------------------------------


def _cell(text: Any) -> str:
    """Escape a value for a Markdown table cell."""
    return str(text).replace("|", "\\|").replace("\n", " ")


_env = Environment(
    loader=PackageLoader("bblab", "templates"),
    autoescape=select_autoescape(enabled_extensions=("html",)),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
)
_env.filters["cell"] = _cell
_env.filters["value"] = lambda v: _cell(canonical_json(v))


# -----------------------------------------------------------------------------
# Reports
# -----------------------------------------------------------------------------


def build_envelope(reports: Iterable[VerificationReport]) -> ReportEnvelope:
    """Wrap reports with the version, status counts and digest."""
    reports = list(reports)
    rows = [r.to_dict() for r in reports]
    return ReportEnvelope(
        version=VERSION,
        summary=summarise(reports),
        digest=compute_digest(rows),
        reports=[ReportModel(**row) for row in rows],
    )


def envelope_json(envelope: ReportEnvelope) -> str:
    return json.dumps(envelope.model_dump(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_report_markdown(envelope: ReportEnvelope) -> str:
    groups = [
        (check, list(rows))
        for check, rows in itertools.groupby(envelope.reports, key=lambda r: r.check)
    ]
    return _env.get_template("report.md.j2").render(
        version=envelope.version,
        digest=envelope.digest,
        summary=envelope.summary,
        groups=groups,
    )


# -----------------------------------------------------------------------------
# Lattices and classes
# -----------------------------------------------------------------------------


def gram_model(matrix: IntMatrix) -> GramModel:
    return GramModel(rows=matrix.to_lists())


def profile_model(lattice: Lattice) -> ProfileModel | None:
    """Profile of ``lattice``, or None when it is degenerate."""
    try:
        p = discriminant_profile(lattice)
    except DegenerateLatticeError:
        return None
    return ProfileModel(
        rank=p.rank,
        signature=p.signature,
        parity=str(p.parity),
        determinant=p.determinant,
        discriminant_group=list(p.invariant_factors),
        form_values=to_canonical(p.disc_form_values),
        form_values_complete=p.form_values_complete,
    )


_INVOLUTIONS = {"K3": make_k3, "T4": make_torus, "K3Hilb2": make_hilb2}


def sublattice_model(sub: Sublattice, ambient: str) -> SublatticeModel:
    return SublatticeModel(
        ambient=ambient,
        basis=[list(c) for c in sub.basis.columns()],
        gram=gram_model(sub.gram),
    )


def lattice_model(name: str) -> LatticeModel:
    """
    JSON model of a catalog lattice.  The Nikulin lattice also carries its
    nine generators and the glue vector; K3, K3Hilb2 and T4 carry the
    invariant sublattice of their involution.

    Raises
    ------
    KeyError : ``name`` is not in the catalog.
    """
    lattice = lattice_by_name(name)
    extra: dict[str, Any] = {}
    if name == "Nikulin":
        pres = nikulin_presentation()
        extra = {
            "generators": to_canonical(pres.generators),
            "glue": to_canonical(pres.overlattice.glue),
        }
    elif name in _INVOLUTIONS:
        _, g = _INVOLUTIONS[name]()
        extra = {"invariant": sublattice_model(invariant_sublattice(g), name)}
    return LatticeModel(
        name=name,
        rank=lattice.rank,
        gram=gram_model(lattice.gram),
        profile=profile_model(lattice),
        **extra,
    )


def render_lattice_markdown(model: LatticeModel) -> str:
    return _env.get_template("lattice.md.j2").render(lattice=model)


# -----------------------------------------------------------------------------
# Interchange form
# -----------------------------------------------------------------------------


def lattice_json(lattice: Lattice) -> LatticeJSON:
    return LatticeJSON(label=lattice.label, gram=lattice.gram.to_lists())


def lattice_from_json(model: LatticeJSON) -> Lattice:
    return Lattice(IntMatrix.from_rows(model.gram, ncols=len(model.gram)), model.label)


def sublattice_json(sub: Sublattice, label: str = "") -> SublatticeJSON:
    return SublatticeJSON(
        label=label,
        gram=sub.gram.to_lists(),
        ambient=sub.ambient.label,
        basis=[list(c) for c in sub.basis.columns()],
    )


def sublattice_from_json(model: SublatticeJSON, ambient: Lattice | None = None) -> Sublattice:
    """
    Rebuild a sublattice.  ``ambient`` defaults to the catalog lattice named
    by ``model.ambient``.

    Raises
    ------
    KeyError        : no ambient given and the label is not in the catalog.
    DimensionError  : the basis does not fit the ambient, or the stored Gram
                      disagrees with the one the basis induces.
    """
    if ambient is None:
        ambient = lattice_by_name(model.ambient)
    if ambient.label != model.ambient:
        raise DimensionError(f"ambient {ambient.label!r} does not match {model.ambient!r}")
    if any(len(b) != ambient.rank for b in model.basis):
        raise DimensionError(f"basis vectors must have length {ambient.rank}")
    sub = Sublattice(ambient, IntMatrix.from_columns(model.basis, ambient.rank))
    if sub.gram.to_lists() != model.gram:
        raise DimensionError("stored Gram differs from the Gram induced by the basis")
    return sub


def h4_class_model(name: str) -> H4ClassModel:
    """
    ``delta2`` or ``sigma`` on the Hilbert square of K3.

    Raises
    ------
    KeyError : unknown class name.
    """
    builders = {"delta2": delta_squared_coords, "sigma": sigma_coords}
    if name not in builders:
        raise KeyError(f"unknown degree-4 class {name!r}; known: {', '.join(builders)}")
    model = k3_model()
    cls = builders[name](model)
    return H4ClassModel(
        name=name,
        model=model.name,
        coords=list(cls.coords),
        support=cls.support(model),
        self_pairing=int(h4_pairing(cls.coords, cls.coords, model)),
    )
