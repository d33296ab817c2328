"""
Pytest fixtures for tests in this repo.

Provides a seeded `rng` and the catalog measurements, built once per session
through `app.services.catalog.catalog_service` (which also re-verifies them).
"""
import numpy as np
import pytest

from app.services.catalog import catalog_service

TIGHT_EXACT = ["qubit_sic", "qubit_mub", "pauli_sic", "mub_d4", "hoggar1", "hoggar2"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture(scope="session")
def catalog():
    return catalog_service


@pytest.fixture(scope="session")
def qubit_sic():
    return catalog_service.get("qubit_sic")


@pytest.fixture(scope="session")
def qubit_mub():
    return catalog_service.get("qubit_mub")


@pytest.fixture(scope="session")
def mub_d4():
    return catalog_service.get("mub_d4")


@pytest.fixture(scope="session")
def hoggar1():
    return catalog_service.get("hoggar1")


@pytest.fixture(scope="session")
def hoggar2():
    return catalog_service.get("hoggar2")


@pytest.fixture(scope="session")
def appendix_b():
    return catalog_service.get("appendix_b")


@pytest.fixture(scope="session")
def product_sic():
    return catalog_service.get("qubit_sic_x2")


@pytest.fixture(scope="session")
def bell():
    return catalog_service.get("bell_basis")


@pytest.fixture(scope="session", params=TIGHT_EXACT)
def tight_povm(request):
    return catalog_service.get(request.param)
