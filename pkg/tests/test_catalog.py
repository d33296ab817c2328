import numpy as np
import pytest

from app.models.errors import CatalogVerificationError, StructureError
from app.models.quantum import PartyStructure
from app.services import entanglement, povm as povm_ops, qstate
from app.services.catalog import (
    ENTRIES,
    CatalogEntry,
    CatalogService,
    bell_basis,
    hoggar,
    hoggar_fiducial,
    off_diagonal_overlaps,
    pauli_group_orbit,
    pauli_sic_fiducial,
)
from app.utils.helpers import load_povm, load_povm_document


def test_every_entry_passes_its_checks(catalog):
    summaries = catalog.list_entries()
    assert [s["name"] for s in summaries] == [e.name for e in ENTRIES]
    for entry in ENTRIES:
        assert catalog.verify(entry, catalog.get(entry.name)) == []


def test_entries_are_cached(catalog):
    assert catalog.get("mub_d4") is catalog.get("mub_d4")
    assert catalog.get("mub_d4").name == "mub_d4"


def test_qubit_sic(qubit_sic):
    assert np.allclose(off_diagonal_overlaps(qubit_sic), 1 / 3, atol=1e-12)
    assert povm_ops.scaled_potential(qubit_sic, 2) == pytest.approx(16 / 3, abs=1e-12)


def test_qubit_mub(qubit_mub):
    assert povm_ops.scaled_potential(qubit_mub, 2) == pytest.approx(12.0, abs=1e-12)


def test_mub_d4_is_a_complete_set_of_unbiased_bases(mub_d4):
    assert mub_d4.m == 20
    assert mub_d4.structure.dims == (2, 2)
    assert np.allclose(mub_d4.weights, 1 / 20)
    overlaps = povm_ops.overlap_matrix(mub_d4)
    for a in range(5):
        for b in range(5):
            block = overlaps[4 * a:4 * a + 4, 4 * b:4 * b + 4]
            expected = np.eye(4) if a == b else np.full((4, 4), 0.25)
            assert np.max(np.abs(block - expected)) < 1e-12
    assert povm_ops.scaled_potential(mub_d4, 2) == pytest.approx(40.0, abs=1e-12)


@pytest.mark.parametrize("index,tangle", [(1, 2 / 3), (2, 2 / 9)])
def test_hoggar_lines(catalog, index, tangle):
    lines = catalog.get(f"hoggar{index}")
    assert lines.m == 64
    assert np.max(np.abs(off_diagonal_overlaps(lines) - 1 / 9)) < 1e-10
    assert povm_ops.scaled_potential(lines, 2) == pytest.approx(4096 / 36, abs=1e-9)
    tangles = np.array([entanglement.three_tangle(v) for v in lines.vectors])
    assert np.max(np.abs(tangles - tangle)) < 1e-10


def test_hoggar_fiducials_share_overlaps_but_not_tangles(hoggar1, hoggar2):
    spectrum1 = np.sort(povm_ops.overlap_matrix(hoggar1).ravel())
    spectrum2 = np.sort(povm_ops.overlap_matrix(hoggar2).ravel())
    assert np.max(np.abs(spectrum1 - spectrum2)) < 1e-12
    assert entanglement.three_tangle(hoggar_fiducial(1)) != pytest.approx(
        entanglement.three_tangle(hoggar_fiducial(2))
    )


def test_hoggar_fiducials_are_unit_vectors():
    for index in (1, 2):
        assert np.linalg.norm(hoggar_fiducial(index).amplitudes) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(StructureError):
        hoggar(3)


def test_appendix_b_sic(appendix_b):
    assert appendix_b.m == 16
    assert appendix_b.structure.dims == (2, 2)
    assert povm_ops.scaled_potential(appendix_b, 2) == pytest.approx(25.600034, abs=1e-4)
    verdict = povm_ops.verify_design(appendix_b, 2, 1e-4)
    assert verdict.is_saturated
    assert verdict.is_ic
    profile = entanglement.profile_povm(appendix_b, 1e-4)
    assert profile.separable_indices == [0, 1, 2, 3, 4]


def test_pauli_orbit_of_sic_fiducial_is_a_sic():
    orbit = pauli_group_orbit(pauli_sic_fiducial())
    assert orbit.m == 4
    assert np.allclose(off_diagonal_overlaps(orbit), 1 / 3, atol=1e-12)


def test_pauli_orbit_of_basis_state_is_not_tight():
    zero = qstate.basis_state(0, PartyStructure((2, 2, 2)))
    orbit = pauli_group_orbit(zero)
    assert orbit.m == 64
    overlaps = povm_ops.overlap_matrix(orbit)
    # eight distinct lines, each repeated eight times
    assert np.all(np.isclose(overlaps, 1.0).sum(axis=1) == 8)
    assert not povm_ops.verify_design(orbit, 2).is_saturated

    qubit_orbit = pauli_group_orbit(qstate.basis_state(0, PartyStructure((2,))))
    assert not povm_ops.verify_design(qubit_orbit, 2).is_saturated


def test_pauli_orbit_needs_qubits():
    with pytest.raises(StructureError):
        pauli_group_orbit(qstate.basis_state(0, PartyStructure((3,))))


def test_unknown_entry_lists_alternatives(catalog):
    with pytest.raises(KeyError, match="available"):
        catalog.get("no_such_povm")


def test_failed_expectation_raises():
    service = CatalogService([CatalogEntry("fake_tight", bell_basis, "Bell states claimed tight", {"tight": True})])
    with pytest.raises(CatalogVerificationError) as exc:
        service.get("fake_tight")
    assert exc.value.name == "fake_tight"
    assert exc.value.failures


@pytest.mark.parametrize("name", ["mub_d4", "hoggar2", "appendix_b"])
def test_export_round_trip(catalog, tmp_path, name):
    path = tmp_path / f"{name}.json"
    catalog.export(name, str(path))
    loaded = load_povm(str(path))
    original = catalog.get(name)
    assert loaded.structure == original.structure
    assert np.max(np.abs(loaded.matrix - original.matrix)) < 1e-15
    assert np.allclose(loaded.weights, original.weights)
    doc = load_povm_document(str(path))
    assert doc.weights is None
    assert (doc.tolerance == 1e-4) is (name == "appendix_b")
