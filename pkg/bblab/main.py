"""
bblab/main.py
-----------------------------------------------------------------------------
Read-only HTTP API over the same contracts as the CLI.

This module is a **thin routing layer**: every handler calls one function
from ``bblab.pipeline`` or ``bblab.reporting`` and returns its model.

Run with:
    uvicorn bblab.main:app --host 127.0.0.1 --port 8242
or
    bblab serve

Endpoints
---------
GET /api/checks                → list of check ids
GET /api/checks/{check_id}     → report envelope for one check
GET /api/lattices              → catalog names
GET /api/lattices/{name}       → one catalog lattice
GET /api/h4/classes/{name}     → coordinates of ``delta2`` or ``sigma``

Architecture notes
------------------
- Handlers are plain ``def`` functions; the exact computations are CPU-bound
  and FastAPI runs them in its threadpool.
- Nothing is mutated; the caches behind the expensive builds are
  process-wide, so the second request for a check is fast.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, HTTPException

from bblab.catalog import names
from bblab.config import VERSION
from bblab.errors import LatticeError
from bblab.pipeline import CheckId, run_check
from bblab.reporting import build_envelope, h4_class_model, lattice_model
from bblab.schema import H4ClassModel, LatticeModel, ReportEnvelope

logger = logging.getLogger(__name__)

# -----------------------------------------------------------------------------
# FastAPI app
# -----------------------------------------------------------------------------

app = FastAPI(
    title="BB Lattice Lab",
    description=(
        "Exact lattice computations behind the Beauville-Bogomolov lattice of a "
        "quotient of the Hilbert square of a K3 surface."
    ),
    version=VERSION,
)


# -----------------------------------------------------------------------------
# Routes
# -----------------------------------------------------------------------------


@app.get("/api/checks", summary="List check ids")
def list_checks() -> list[str]:
    return [c.value for c in CheckId]


@app.get("/api/checks/{check_id}", response_model=ReportEnvelope, summary="Run one check")
def get_check(check_id: str) -> ReportEnvelope:
    """
    Run one check and return its reports in the CLI envelope.

    Raises
    ------
    HTTPException(404) : unknown check id.
    """
    try:
        check = CheckId(check_id)
    except ValueError:
        raise HTTPException(status_code=404, detail=f"unknown check id {check_id!r}") from None
    return build_envelope(run_check(check))


@app.get("/api/lattices", summary="List catalog lattices")
def list_lattices() -> list[str]:
    return names()


@app.get("/api/lattices/{name}", response_model=LatticeModel, summary="Get a catalog lattice")
def get_lattice(name: str) -> LatticeModel:
    """
    Raises
    ------
    HTTPException(404) : ``name`` is not in the catalog.
    HTTPException(422) : the lattice could not be built.
    """
    try:
        return lattice_model(name)
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=exc.args[0]) from exc
    except LatticeError as exc:
        logger.error("lattice %s failed: %s", name, exc)
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get(
    "/api/h4/classes/{name}",
    response_model=H4ClassModel,
    summary="Get delta2 or sigma in the integral degree-4 basis",
)
def get_h4_class(name: str) -> H4ClassModel:
    """
    Raises
    ------
    HTTPException(404) : ``name`` is neither ``delta2`` nor ``sigma``.
    HTTPException(422) : the degree-4 rules are inconsistent.
    """
    try:
        return h4_class_model(name)
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=exc.args[0]) from exc
    except LatticeError as exc:
        logger.error("degree-4 class %s failed: %s", name, exc)
        raise HTTPException(status_code=422, detail=str(exc)) from exc
