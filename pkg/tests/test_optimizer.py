import numpy as np
import pytest
from pydantic import ValidationError

from app.models.quantum import PartyStructure
from app.models.schemas import OptimizerConfig
from app.services import povm as povm_ops
from app.services.optimizer import (
    FramePotentialOptimizer,
    euclidean_gradient,
    factor_gradients,
    maximize_separable_count,
    minimize_frame_potential,
    potential,
    product_residual,
)
from tests.helpers.oracles import numerical_gradient

# upper limits on the best F_2 at D = 4; the Welch bounds are m^2/10
F2_LIMITS = {16: 25.61, 17: 28.92, 18: 32.42, 19: 36.105, 20: 40.02}


def random_rows(rng, m, D):
    V = rng.normal(size=(m, D)) + 1j * rng.normal(size=(m, D))
    return V / np.linalg.norm(V, axis=1, keepdims=True)


@pytest.mark.parametrize("t", [1, 2, 3])
def test_gradient_matches_finite_differences(rng, t):
    for _ in range(20):
        V = random_rows(rng, 5, 3)
        w = rng.uniform(0.5, 1.5, size=5)
        analytic = euclidean_gradient(V, w, t)
        numeric = numerical_gradient(lambda X: potential(X, w, t), V)
        assert np.max(np.abs(analytic - numeric)) <= 1e-5 * max(1.0, np.max(np.abs(analytic)))


@pytest.mark.parametrize("t", [1, 2, 3])
def test_factor_gradients_match_finite_differences(rng, t):
    dims = (2, 3)
    w = np.ones(4)
    for _ in range(20):
        f1 = random_rows(rng, 1, 2)[0]
        f2 = random_rows(rng, 1, 3)[0]
        rest = random_rows(rng, 3, 6)
        V = np.vstack([np.kron(f1, f2), rest])
        g1, g2 = factor_gradients(euclidean_gradient(V, w, t)[0], [f1, f2], dims)
        n1 = numerical_gradient(lambda x: potential(np.vstack([np.kron(x, f2), rest]), w, t), f1)
        n2 = numerical_gradient(lambda x: potential(np.vstack([np.kron(f1, x), rest]), w, t), f2)
        scale = max(1.0, np.max(np.abs(g1)), np.max(np.abs(g2)))
        assert np.max(np.abs(g1 - n1)) <= 1e-5 * scale
        assert np.max(np.abs(g2 - n2)) <= 1e-5 * scale


def test_potential_is_monotone_along_a_restart(rng):
    cfg = OptimizerConfig(D=4, m=10, t=2, restarts=1, max_iterations=400)
    outcome = FramePotentialOptimizer().run_restart(cfg, 0, rng, record_history=True)
    history = np.array(outcome.history)
    assert len(history) > 1
    assert np.all(np.diff(history) <= 1e-12)
    assert outcome.potential == pytest.approx(history[-1])


def test_constrained_restart_is_monotone(rng):
    cfg = OptimizerConfig(D=4, m=12, parties=[2, 2], separable_count=6, restarts=1, max_iterations=400)
    outcome = FramePotentialOptimizer().run_restart(cfg, 0, rng, record_history=True)
    assert np.all(np.diff(outcome.history) <= 1e-12)


def test_qubit_sic_is_found():
    cfg = OptimizerConfig(D=2, m=4, t=2, restarts=8, max_iterations=3000, seed=3)
    result = minimize_frame_potential(cfg)
    assert result.bound == pytest.approx(16 / 3)
    assert result.potential == pytest.approx(16 / 3, abs=1e-6)
    found = result.povm.to_povm()
    assert povm_ops.verify_design(found, 2).is_saturated
    assert len(result.trace) == 8


def test_orthonormal_basis_minimizes_order_one():
    result = minimize_frame_potential(OptimizerConfig(D=2, m=2, t=1, restarts=4, max_iterations=2000))
    assert result.potential == pytest.approx(2.0, abs=1e-8)
    assert result.converged


def test_restarts_stop_once_the_potential_stops_decreasing():
    result = minimize_frame_potential(OptimizerConfig(D=2, m=4, t=2, restarts=3, max_iterations=5000, seed=3))
    assert result.gap <= 1e-6
    assert result.converged
    assert all(r.iterations < 5000 for r in result.trace)


def test_result_never_beats_the_bound():
    result = minimize_frame_potential(OptimizerConfig(D=3, m=9, restarts=4, max_iterations=500, seed=11))
    assert result.potential >= result.bound - 1e-9
    assert all(r.gap >= -1e-9 for r in result.trace)


def test_seeded_runs_are_reproducible_across_worker_counts():
    base = dict(D=3, m=9, t=2, restarts=4, max_iterations=300, seed=7)
    serial = minimize_frame_potential(OptimizerConfig(**base, workers=1))
    parallel = minimize_frame_potential(OptimizerConfig(**base, workers=4))
    again = minimize_frame_potential(OptimizerConfig(**base, workers=1))
    assert serial.potential == parallel.potential == again.potential
    assert serial.restart_index == parallel.restart_index
    assert serial.povm.vectors == parallel.povm.vectors
    assert [r.potential for r in serial.trace] == [r.potential for r in parallel.trace]


def test_product_constraint_holds_to_machine_precision():
    cfg = OptimizerConfig(D=4, m=16, parties=[2, 2], separable_count=3, restarts=2, max_iterations=300)
    result = minimize_frame_potential(cfg)
    assert result.product_residual < 1e-10
    vectors = np.array([[complex(re, im) for re, im in v] for v in result.povm.vectors])
    assert product_residual(vectors[:3], PartyStructure((2, 2))) < 1e-10


@pytest.mark.parametrize(
    "fields",
    [
        dict(D=4, m=4, separable_count=5, parties=[2, 2]),
        dict(D=4, m=16, parties=[2, 3]),
        dict(D=4, m=16, separable_count=2),
        dict(D=4, m=16, seed=-1),
        dict(D=1, m=4),
    ],
)
def test_invalid_configs_are_rejected(fields):
    with pytest.raises(ValidationError):
        OptimizerConfig(**fields)


@pytest.mark.slow
@pytest.mark.parametrize("m", [16, 17, 18, 19, 20])
def test_two_qubit_sweep_reaches_reference_values(m):
    result = minimize_frame_potential(OptimizerConfig(D=4, m=m, t=2, seed=m))
    assert result.potential <= F2_LIMITS[m]
    assert result.relative_gap <= 5e-4


@pytest.mark.slow
def test_five_separable_vectors_keep_the_sic():
    cfg = OptimizerConfig(D=4, m=16, parties=[2, 2], separable_count=5, restarts=128, seed=5)
    assert minimize_frame_potential(cfg).relative_gap <= 1e-3


@pytest.mark.slow
def test_nine_separable_vectors_cannot_keep_the_sic():
    cfg = OptimizerConfig(D=4, m=16, parties=[2, 2], separable_count=9, restarts=128, seed=9)
    assert minimize_frame_potential(cfg).relative_gap > 1e-2


@pytest.mark.slow
def test_separable_search_finds_the_mub_count():
    s, result = maximize_separable_count(4, 20, PartyStructure((2, 2)), restarts=64, seed=1, accept_gap=1e-4)
    assert s == 12
    assert result.relative_gap <= 1e-4


@pytest.mark.slow
def test_twelve_separable_vectors_fit_twenty_outcomes():
    cfg = OptimizerConfig(D=4, m=20, parties=[2, 2], separable_count=12, restarts=64, seed=12)
    assert minimize_frame_potential(cfg).relative_gap <= 1e-4
