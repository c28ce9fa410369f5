"""Tests for bblab/main.py: the read-only HTTP routes."""

from __future__ import annotations

from fastapi.testclient import TestClient

from bblab.catalog import names
from bblab.pipeline import CheckId

# ── checks ───────────────────────────────────────────────────────────────────


class TestChecks:
    def test_list(self, client: TestClient) -> None:
        resp = client.get("/api/checks")
        assert resp.status_code == 200
        assert resp.json() == [c.value for c in CheckId]

    def test_run_one(self, client: TestClient) -> None:
        resp = client.get("/api/checks/nikulin")
        assert resp.status_code == 200
        data = resp.json()
        assert data["summary"]["fail"] == 0
        assert len(data["digest"]) == 64
        assert {r["check"] for r in data["reports"]} == {"nikulin"}

    def test_unknown_404(self, client: TestClient) -> None:
        resp = client.get("/api/checks/bogus")
        assert resp.status_code == 404
        assert "bogus" in resp.json()["detail"]


# ── lattices ─────────────────────────────────────────────────────────────────


class TestLattices:
    def test_list(self, client: TestClient) -> None:
        assert client.get("/api/lattices").json() == names()

    def test_get(self, client: TestClient) -> None:
        resp = client.get("/api/lattices/E8")
        assert resp.status_code == 200
        data = resp.json()
        assert data["rank"] == 8
        assert data["profile"]["parity"] == "even"

    def test_get_with_invariant(self, client: TestClient) -> None:
        data = client.get("/api/lattices/K3Hilb2").json()
        assert len(data["invariant"]["basis"]) == 15

    def test_unknown_404(self, client: TestClient) -> None:
        assert client.get("/api/lattices/E7").status_code == 404


# ── degree-4 classes ─────────────────────────────────────────────────────────


class TestH4Classes:
    def test_sigma(self, client: TestClient) -> None:
        resp = client.get("/api/h4/classes/sigma")
        assert resp.status_code == 200
        assert len(resp.json()["coords"]) == 276

    def test_unknown_404(self, client: TestClient) -> None:
        assert client.get("/api/h4/classes/bogus").status_code == 404
