"""
Tomography robustness experiment

Haar-random pure states are measured with a tight POVM and with a product
baseline, the Born probabilities are perturbed by a named noise strategy, and the
reconstructions (linear inversion for the tight POVM, least squares for the
baseline) are compared with the true state in Hilbert-Schmidt distance.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import reduce
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..config import Settings
from ..models.errors import PreconditionError, StructureError
from ..models.quantum import DensityMatrix, PartyStructure, Povm
from ..models.schemas import RobustnessReport
from . import qstate
from .catalog import qubit_sic
from .povm import born_probabilities, least_squares_reconstruct, product_povm, reconstruct, verify_design, verify_ic

logger = logging.getLogger(__name__)

NoiseModel = Callable[[np.ndarray, float, np.random.Generator], np.ndarray]


def uniform_additive(p: np.ndarray, noise: float, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. U(-noise, noise) on each outcome, clipped at zero and renormalized"""
    q = np.clip(p + rng.uniform(-noise, noise, size=p.shape), 0.0, None)
    total = q.sum()
    if total <= 0:
        return np.full(p.shape, 1.0 / p.size)
    return q / total


NOISE_MODELS: Dict[str, NoiseModel] = {
    "uniform_additive": uniform_additive,
}


def default_baseline(structure: PartyStructure) -> Povm:
    """Product of qubit SICs over every party"""
    if any(d != 2 for d in structure.dims):
        raise PreconditionError(f"No built-in product baseline for {structure}; pass one explicitly")
    sic = qubit_sic()
    return reduce(product_povm, [sic] * structure.n_parties)


class TomographyService:
    """Monte-Carlo comparison of reconstruction errors under noisy statistics"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers

    def _trial(
        self,
        tight: Povm,
        baseline: Povm,
        noise: float,
        model: NoiseModel,
        rng: np.random.Generator,
    ) -> Tuple[float, float]:
        state = qstate.haar_random_state(tight.structure, rng)
        rho = DensityMatrix.pure(state)

        q = model(born_probabilities(tight, rho), noise, rng)
        estimate = reconstruct(tight, q)

        q_base = model(born_probabilities(baseline, rho), noise, rng)
        base_estimate = least_squares_reconstruct(baseline, q_base)

        return qstate.hs_distance(estimate, rho), qstate.hs_distance(base_estimate, rho)

    def run(
        self,
        povm: Povm,
        baseline: Optional[Povm] = None,
        noise: float = 0.01,
        trials: int = 1000,
        seed: int = 0,
        noise_model: str = "uniform_additive",
        tol: Optional[float] = None,
    ) -> RobustnessReport:
        if not 0.0 <= noise <= 1.0:
            raise PreconditionError(f"Noise level must lie in [0, 1], got {noise}")
        if trials < 1:
            raise PreconditionError(f"Need at least one trial, got {trials}")
        try:
            model = NOISE_MODELS[noise_model]
        except KeyError:
            raise PreconditionError(f"Unknown noise model '{noise_model}'; available: {', '.join(NOISE_MODELS)}")
        verdict = verify_design(povm, 2, tol)
        if not verdict.is_saturated:
            raise PreconditionError(
                f"Linear inversion needs a tight POVM; relative gap {verdict.relative_gap:.3e}"
            )
        if baseline is None:
            baseline = default_baseline(povm.structure)
        if baseline.dimension != povm.dimension:
            raise StructureError(f"Baseline dimension {baseline.dimension} != POVM dimension {povm.dimension}")
        if not verify_ic(baseline):
            raise PreconditionError(f"Baseline {baseline.name} is not informationally complete")

        children = np.random.SeedSequence(seed).spawn(trials)
        workers = self.workers or Settings.workers()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda c: self._trial(povm, baseline, noise, model, np.random.default_rng(c)),
                    children,
                )
            )
        errors = np.array([r[0] for r in results])
        base_errors = np.array([r[1] for r in results])
        mean_error = float(np.mean(errors))
        base_mean = float(np.mean(base_errors))
        ratio = base_mean / mean_error if mean_error > 0 else None
        logger.info(
            f"Tomography on {povm.name or 'povm'} (D={povm.dimension}, noise={noise}, {trials} trials): "
            f"mean error {mean_error:.6f} vs baseline {base_mean:.6f}"
        )
        return RobustnessReport(
            povm_name=povm.name or "povm",
            baseline_name=baseline.name or "baseline",
            dimension=povm.dimension,
            noise=noise,
            noise_model=noise_model,
            trials=trials,
            seed=seed,
            mean_error=mean_error,
            baseline_mean_error=base_mean,
            std_error=float(np.std(errors)),
            baseline_std_error=float(np.std(base_errors)),
            ratio=ratio,
        )


tomography_service = TomographyService()
