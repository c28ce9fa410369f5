"""Shared fixtures for the bblab test suite."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from bblab.catalog import make_hilb2, make_k3, make_U
from bblab.exact_linalg import IntMatrix
from bblab.hilb2_h4 import SurfaceModel, k3_model, truncation_model
from bblab.lattice_core import Isometry, Lattice
from bblab.main import app


@pytest.fixture()
def client() -> TestClient:
    """FastAPI test client."""
    return TestClient(app)


@pytest.fixture()
def hyperbolic_plane() -> Lattice:
    return make_U()


@pytest.fixture()
def wiki_matrix() -> IntMatrix:
    """3×3 integer matrix with Smith form diag(2, 6, 12) and determinant −144."""
    return IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])


@pytest.fixture(scope="session")
def k3_swap() -> tuple[Lattice, Isometry]:
    """H²(K3) with the involution exchanging the two E8(−1) blocks."""
    return make_k3()


@pytest.fixture(scope="session")
def hilb_swap() -> tuple[Lattice, Isometry]:
    return make_hilb2()


@pytest.fixture(scope="session")
def truncation() -> SurfaceModel:
    """The rank-4 ``U ⊕ U`` harness with its 15-dimensional degree-4 basis."""
    return truncation_model()


@pytest.fixture(scope="session")
def k3() -> SurfaceModel:
    """The full K3 model.  Its degree-4 builds are cached for the session."""
    return k3_model()
