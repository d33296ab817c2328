import numpy as np
import pytest

from app.models.errors import PreconditionError, StructureError
from app.models.quantum import DensityMatrix, PartyStructure, Povm
from app.services import povm as povm_ops, qstate
from app.services.catalog import computational_basis

QUBIT = PartyStructure((2,))


def random_povm(structure: PartyStructure, m: int, rng) -> Povm:
    D = structure.dimension
    vectors = rng.normal(size=(m, D)) + 1j * rng.normal(size=(m, D))
    weights = rng.uniform(0.2, 1.0, size=m)
    return Povm.from_array(vectors, structure, weights=weights / weights.sum(), normalize=True)


@pytest.mark.parametrize(
    "m,expected", [(16, 25.6), (17, 28.9), (18, 32.4), (19, 36.1), (20, 40.0)]
)
def test_welch_bound_two_qubit_values(m, expected):
    assert povm_ops.welch_bound(4, m, 2) == pytest.approx(expected)


def test_printed_bound_differs_from_scaled_convention(mub_d4):
    assert povm_ops.printed_bound(4, 16, 2) == pytest.approx(1.6)
    verdict = povm_ops.verify_design(mub_d4, 2)
    assert verdict.bound == pytest.approx(40.0)
    assert verdict.printed_bound == pytest.approx(1.6)
    assert any("printed bound" in note for note in verdict.notes)


def test_frame_potential_rejects_order_zero(qubit_sic):
    with pytest.raises(PreconditionError):
        povm_ops.frame_potential(qubit_sic, 0)
    with pytest.raises(PreconditionError):
        povm_ops.welch_bound(1, 4, 2)


def test_qubit_sic_saturates_orders_one_and_two(qubit_sic):
    for t in (1, 2):
        verdict = povm_ops.verify_design(qubit_sic, t)
        assert verdict.is_saturated
        assert verdict.uniform_weights
    verdict = povm_ops.verify_design(qubit_sic, 2)
    assert verdict.potential == pytest.approx(16 / 3, abs=1e-12)
    assert verdict.is_ic
    assert not povm_ops.verify_design(qubit_sic, 3).is_saturated


def test_tight_catalog_measurements_resolve_identity(tight_povm):
    assert povm_ops.identity_defect(tight_povm) < 1e-10
    assert povm_ops.verify_design(tight_povm, 1, 1e-10).is_saturated
    assert povm_ops.verify_design(tight_povm, 2, 1e-10).is_saturated
    assert povm_ops.verify_ic(tight_povm)


def test_product_sic_is_ic_but_not_tight(product_sic):
    verdict = povm_ops.verify_design(product_sic, 2)
    assert verdict.is_ic
    assert not verdict.is_saturated
    assert verdict.potential == pytest.approx(256 / 9, abs=1e-9)
    assert povm_ops.verify_design(product_sic, 1).is_saturated


def test_bell_basis_is_neither_ic_nor_tight(bell):
    verdict = povm_ops.verify_design(bell, 2)
    assert not verdict.is_ic
    assert not verdict.is_saturated
    assert verdict.potential == pytest.approx(4.0)


def test_random_vectors_do_not_saturate(rng):
    p = Povm.from_array(rng.normal(size=(16, 4)) + 1j * rng.normal(size=(16, 4)), PartyStructure((4,)), normalize=True)
    assert not povm_ops.verify_design(p, 2).is_saturated
    assert povm_ops.verify_design(p, 2).residual > 0


def test_computational_basis_is_not_ic():
    basis = computational_basis(4, [2, 2])
    assert povm_ops.ic_rank(basis) == 4
    assert not povm_ops.verify_ic(basis)
    assert povm_ops.verify_design(basis, 1).is_saturated


@pytest.mark.parametrize("t", [1, 2, 3])
def test_frame_potential_factorizes_over_products(rng, t):
    a = random_povm(PartyStructure((2,)), 5, rng)
    b = random_povm(PartyStructure((3,)), 4, rng)
    ab = povm_ops.product_povm(a, b)
    assert ab.structure.dims == (2, 3)
    assert povm_ops.frame_potential(ab, t) == pytest.approx(
        povm_ops.frame_potential(a, t) * povm_ops.frame_potential(b, t), abs=1e-12
    )


@pytest.mark.parametrize("t", [1, 2, 3])
def test_random_weighted_povms_respect_the_bound(rng, t):
    for D in (2, 3, 4):
        for _ in range(20):
            p = random_povm(PartyStructure((D,)), int(rng.integers(1, 3 * D * D)), rng)
            assert povm_ops.frame_potential(p, t) >= povm_ops.weighted_welch_bound(D, t) - 1e-9


def test_product_of_qubit_mubs_is_ic_but_not_tight(qubit_mub):
    pauli_product = povm_ops.product_povm(qubit_mub, qubit_mub)
    assert pauli_product.m == 36
    assert pauli_product.structure.dims == (2, 2)
    verdict = povm_ops.verify_design(pauli_product, 2)
    assert verdict.is_ic
    assert not verdict.is_saturated
    assert povm_ops.verify_ic(pauli_product)


def test_zero_weight_vectors_do_not_count_towards_ic(qubit_sic):
    padded = Povm(
        qubit_sic.vectors + (qstate.basis_state(1, QUBIT),),
        np.append(qubit_sic.weights, 0.0),
    )
    assert povm_ops.gram_matrix(padded).shape == (4, 4)
    assert povm_ops.gram_matrix(padded, include_zero_weight=True).shape == (5, 5)
    assert povm_ops.verify_ic(padded)


def test_born_probabilities_sum_to_one(tight_povm, rng):
    rho = qstate.random_density_matrix(tight_povm.structure, rng)
    p = povm_ops.born_probabilities(tight_povm, rho)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(p >= -1e-15)
    with pytest.raises(StructureError):
        povm_ops.born_probabilities(tight_povm, DensityMatrix.maximally_mixed(PartyStructure((3,))))


def test_reconstruction_is_exact_for_tight_povms(tight_povm, rng):
    for _ in range(10):
        rho = qstate.random_density_matrix(tight_povm.structure, rng)
        estimate = povm_ops.reconstruct(tight_povm, povm_ops.born_probabilities(tight_povm, rho))
        assert qstate.hs_distance(estimate, rho) < 1e-10


def test_purity_identity_holds_for_tight_povms(tight_povm, rng):
    for _ in range(100):
        rho = qstate.random_density_matrix(tight_povm.structure, rng, rank=int(rng.integers(1, tight_povm.dimension + 1)))
        assert povm_ops.purity_identity_residual(tight_povm, rho) < 1e-10


def test_weighted_union_of_designs_is_tight(qubit_sic, qubit_mub, rng):
    a = 0.3
    union = Povm(
        qubit_sic.vectors + qubit_mub.vectors,
        np.concatenate([np.full(4, a / 4), np.full(6, (1 - a) / 6)]),
    )
    verdict = povm_ops.verify_design(union, 2)
    assert not verdict.uniform_weights
    assert verdict.is_saturated
    rho = qstate.random_density_matrix(QUBIT, rng)
    p = povm_ops.born_probabilities(union, rho)
    assert qstate.hs_distance(povm_ops.reconstruct(union, p), rho) < 1e-10
    assert povm_ops.purity_identity_residual(union, rho) < 1e-10


def test_purity_identity_needs_tight_povm(product_sic, rng):
    rho = qstate.random_density_matrix(product_sic.structure, rng)
    with pytest.raises(PreconditionError):
        povm_ops.purity_identity_residual(product_sic, rho)


def test_reconstruct_checks_probabilities(qubit_sic):
    with pytest.raises(StructureError):
        povm_ops.reconstruct(qubit_sic, [0.5, 0.5])
    with pytest.raises(PreconditionError):
        povm_ops.reconstruct(qubit_sic, [0.0, 0.0, 0.0, 0.0])


def test_reconstruct_rescales_probabilities_off_by_rounding(qubit_sic):
    estimate = povm_ops.reconstruct(qubit_sic, [0.25 + 5e-11, 0.25, 0.25, 0.25])
    assert np.trace(estimate.entries).real == pytest.approx(1.0, abs=1e-12)
    maximally_mixed = DensityMatrix.maximally_mixed(QUBIT)
    assert qstate.hs_distance(estimate, maximally_mixed) < 1e-9
    doubled = povm_ops.reconstruct(qubit_sic, [0.5, 0.5, 0.5, 0.5])
    assert qstate.hs_distance(doubled, maximally_mixed) < 1e-12


def test_reconstruct_round_trip_on_six_decimal_sic(appendix_b, rng):
    for _ in range(5):
        rho = qstate.random_density_matrix(appendix_b.structure, rng)
        estimate = povm_ops.reconstruct(appendix_b, povm_ops.born_probabilities(appendix_b, rho))
        assert np.trace(estimate.entries).real == pytest.approx(1.0, abs=1e-10)
        assert qstate.hs_distance(estimate, rho) < 1e-4


def test_least_squares_recovers_state_from_product_sic(product_sic, rng):
    rho = qstate.random_density_matrix(product_sic.structure, rng)
    estimate = povm_ops.least_squares_reconstruct(product_sic, povm_ops.born_probabilities(product_sic, rho))
    assert qstate.hs_distance(estimate, rho) < 1e-10


def test_qubit_bloch_vector_from_mub_statistics(qubit_mub, rng):
    for _ in range(5):
        rho = qstate.random_density_matrix(QUBIT, rng)
        r = povm_ops.qubit_bloch_from_mub_probabilities(povm_ops.born_probabilities(qubit_mub, rho))
        paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
        expected = [np.trace(rho.entries @ s).real for s in paulis]
        assert np.allclose(r, expected, atol=1e-12)
    with pytest.raises(StructureError):
        povm_ops.qubit_bloch_from_mub_probabilities([0.25] * 4)
