"""
Frame potential minimization on products of unit spheres

The variables are a list of unit-norm blocks: every product-constrained vector
contributes one block per party, every free vector one block of length D. Each
iteration takes the tangent gradient of F_t = sum_ij |<phi_i|phi_j>|^(2t) (the
equal-weight scaled convention), a Barzilai-Borwein trial step and Armijo
backtracking, then retracts every block back to its sphere.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import OPTIMIZER_ACCEPT_GAP, Settings
from ..models.quantum import PartyStructure, Povm
from ..models.schemas import OptimizationResult, OptimizerConfig, PovmDocument, RestartSummary
from .entanglement import sep_bound
from .nested import fix_global_phase
from .povm import welch_bound

logger = logging.getLogger(__name__)

ARMIJO_C1 = 1e-4
MAX_BACKTRACKS = 60
MIN_STEP, MAX_STEP = 1e-12, 1e6
# Line search stalling below this tangent-gradient norm (relative to max(1, F)) means the
# working precision is reached
STATIONARY_FLOOR = 1e-6
# Accepted steps must lower F by more than a few ulps
NO_PROGRESS_ULPS = 4.0


def potential(V: np.ndarray, weights: np.ndarray, t: int) -> float:
    """sum_ij w_i w_j |<v_i|v_j>|^(2t) over the rows of V"""
    G = V.conj() @ V.T
    return float(weights @ (np.abs(G) ** (2 * t)) @ weights)


def euclidean_gradient(V: np.ndarray, weights: np.ndarray, t: int) -> np.ndarray:
    """Real gradient of potential w.r.t. each row: 4t sum_j w_i w_j |g_ij|^(2t-2) <v_j|v_i> v_j

    The directional derivative along dV is Re sum_i <G_i, dV_i>.
    """
    G = V.conj() @ V.T
    A = np.abs(G) ** (2 * t - 2) * G.conj()
    return 4 * t * weights[:, None] * ((A * weights[None, :]) @ V)


def factor_gradients(g: np.ndarray, factors: Sequence[np.ndarray], dims: Sequence[int]) -> List[np.ndarray]:
    """Chain rule through v = f_1 x ... x f_N: contract g with the conjugates of the other factors"""
    out = []
    n = len(dims)
    for p in range(n):
        tensor = g.reshape(dims)
        for q in range(n - 1, -1, -1):
            if q != p:
                tensor = np.tensordot(tensor, factors[q].conj(), axes=([q], [0]))
        out.append(tensor)
    return out


def product_residual(vectors: np.ndarray, structure: PartyStructure) -> float:
    """Largest 1 - lambda_max over single-party reductions of the given vectors"""
    worst = 0.0
    if structure.n_parties < 2:
        return worst
    for amps in vectors:
        psi = amps.reshape(structure.dims)
        for i in range(structure.n_parties):
            mat = np.moveaxis(psi, i, 0).reshape(structure.dims[i], -1)
            lam = np.linalg.eigvalsh(mat @ mat.conj().T)[-1]
            worst = max(worst, 1.0 - float(lam))
    return worst


def _tangent(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    return g - np.real(np.vdot(x, g)) * x


def _inner(a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> float:
    return float(sum(np.real(np.vdot(x, y)) for x, y in zip(a, b)))


def _random_unit(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return z / np.linalg.norm(z)


@dataclass
class RestartOutcome:
    restart_index: int
    vectors: np.ndarray
    potential: float
    iterations: int
    converged: bool
    history: List[float] = field(default_factory=list)


class _BlockLayout:
    """Maps unit-norm blocks to the (m, D) matrix of measurement vectors"""

    def __init__(self, cfg: OptimizerConfig):
        self.structure = cfg.structure()
        self.dims = self.structure.dims
        self.n = len(self.dims)
        self.s = cfg.separable_count
        self.m = cfg.m

    def random_blocks(self, rng: np.random.Generator) -> List[np.ndarray]:
        blocks = [_random_unit(d, rng) for _ in range(self.s) for d in self.dims]
        blocks += [_random_unit(self.structure.dimension, rng) for _ in range(self.m - self.s)]
        return blocks

    def factors(self, blocks: List[np.ndarray], i: int) -> List[np.ndarray]:
        return blocks[i * self.n:(i + 1) * self.n]

    def assemble(self, blocks: List[np.ndarray]) -> np.ndarray:
        rows = [reduce(np.kron, self.factors(blocks, i)) for i in range(self.s)]
        rows += blocks[self.s * self.n:]
        return np.array(rows)

    def tangent_gradient(self, blocks: List[np.ndarray], G: np.ndarray) -> List[np.ndarray]:
        grads = []
        for i in range(self.s):
            factors = self.factors(blocks, i)
            for x, g in zip(factors, factor_gradients(G[i], factors, self.dims)):
                grads.append(_tangent(x, g))
        free = blocks[self.s * self.n:]
        for offset, x in enumerate(free):
            grads.append(_tangent(x, G[self.s + offset]))
        return grads


def _retract(blocks: List[np.ndarray], direction: List[np.ndarray], alpha: float) -> List[np.ndarray]:
    out = []
    for x, d in zip(blocks, direction):
        y = x + alpha * d
        out.append(y / np.linalg.norm(y))
    return out


class FramePotentialOptimizer:
    """Multi-start projected gradient descent for the frame potential"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers

    def run_restart(
        self,
        cfg: OptimizerConfig,
        restart_index: int,
        rng: np.random.Generator,
        record_history: bool = False,
    ) -> RestartOutcome:
        layout = _BlockLayout(cfg)
        weights = np.ones(cfg.m)
        t = cfg.t

        blocks = layout.random_blocks(rng)
        V = layout.assemble(blocks)
        f = potential(V, weights, t)
        grads = layout.tangent_gradient(blocks, euclidean_gradient(V, weights, t))
        history = [f] if record_history else []
        alpha = 1.0 / max(1.0, math.sqrt(_inner(grads, grads)))
        converged = False
        iterations = 0

        for iterations in range(1, cfg.max_iterations + 1):
            gnorm2 = _inner(grads, grads)
            gnorm = math.sqrt(gnorm2)
            if gnorm <= cfg.gradient_tolerance:
                converged = True
                iterations -= 1
                break

            step = alpha
            accepted = None
            for _ in range(MAX_BACKTRACKS):
                trial = _retract(blocks, grads, -step)
                V_trial = layout.assemble(trial)
                f_trial = potential(V_trial, weights, t)
                if f_trial <= f - ARMIJO_C1 * step * gnorm2:
                    accepted = (trial, V_trial, f_trial)
                    break
                step *= 0.5
            scale = max(1.0, abs(f))
            if accepted is not None and f - accepted[2] <= NO_PROGRESS_ULPS * np.finfo(float).eps * scale:
                accepted = None
            if accepted is None:
                converged = gnorm <= STATIONARY_FLOOR * scale
                logger.debug(
                    f"Restart {restart_index}: line search stalled at iteration {iterations} (|grad| = {gnorm:.3e})"
                )
                break

            trial, V_trial, f_trial = accepted
            new_grads = layout.tangent_gradient(trial, euclidean_gradient(V_trial, weights, t))
            s_k = [y - x for x, y in zip(blocks, trial)]
            y_k = [b - a for a, b in zip(grads, new_grads)]
            sy = _inner(s_k, y_k)
            # Barzilai-Borwein length for the next trial step
            alpha = _inner(s_k, s_k) / sy if sy > 0 else 2.0 * step
            alpha = min(max(alpha, MIN_STEP), MAX_STEP)

            blocks, V, f, grads = trial, V_trial, f_trial, new_grads
            if record_history:
                history.append(f)
            if iterations % 1000 == 0:
                logger.debug(f"Restart {restart_index}: iteration {iterations}, F_{t} = {f:.12f}, |grad| = {gnorm:.3e}")

        vectors = np.array([fix_global_phase(row) for row in V])
        return RestartOutcome(
            restart_index=restart_index,
            vectors=vectors,
            potential=f,
            iterations=iterations,
            converged=converged,
            history=history,
        )

    def minimize(self, cfg: OptimizerConfig) -> OptimizationResult:
        """Best of cfg.restarts independent runs; the seed fixes every restart"""
        workers = cfg.workers or self.workers or Settings.workers()
        children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
        rngs = [np.random.default_rng(c) for c in children]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda i: self.run_restart(cfg, i, rngs[i]), range(cfg.restarts)))

        bound = welch_bound(cfg.D, cfg.m, cfg.t)
        trace = [
            RestartSummary(
                restart_index=o.restart_index,
                potential=o.potential,
                gap=o.potential - bound,
                iterations=o.iterations,
                converged=o.converged,
            )
            for o in outcomes
        ]
        best = min(outcomes, key=lambda o: (o.potential, o.restart_index))
        structure = cfg.structure()
        found = Povm.from_array(best.vectors, structure, normalize=True, name=f"optimized_D{cfg.D}_m{cfg.m}")
        residual = product_residual(best.vectors[: cfg.separable_count], structure)
        gap = best.potential - bound
        logger.info(
            f"Optimized D={cfg.D} m={cfg.m} t={cfg.t} s={cfg.separable_count}: "
            f"F_{cfg.t} = {best.potential:.6f} vs bound {bound:.6f} (restart {best.restart_index}/{cfg.restarts})"
        )
        if not best.converged:
            logger.warning(
                f"Best restart {best.restart_index} stopped after {best.iterations} iterations without converging"
            )
        return OptimizationResult(
            povm=PovmDocument.from_povm(found, provenance=f"frame potential minimization, seed {cfg.seed}"),
            potential=best.potential,
            bound=bound,
            gap=gap,
            relative_gap=gap / bound,
            iterations=best.iterations,
            restart_index=best.restart_index,
            converged=best.converged,
            product_residual=residual,
            config=cfg,
            trace=trace,
        )

    def maximize_separable_count(
        self,
        D: int,
        m: int,
        structure: PartyStructure,
        t: int = 2,
        restarts: Optional[int] = None,
        max_iterations: Optional[int] = None,
        seed: int = 0,
        accept_gap: float = OPTIMIZER_ACCEPT_GAP,
        s_max: Optional[int] = None,
        s_min: int = 0,
    ) -> Tuple[Optional[int], OptimizationResult]:
        """Largest product-constrained count s whose best relative gap is within accept_gap

        Sweeps s downward from the separable-count bound (or s_max). Returns
        (None, last result) when no s in the range is accepted.
        """
        if structure.dimension != D:
            raise ValueError(f"Structure {structure} does not have dimension {D}")
        if s_max is None:
            if structure.is_uniform and structure.n_parties >= 2:
                s_max = sep_bound(structure.local_dim, structure.n_parties, structure.n_parties // 2, m).m_sep_max
            else:
                s_max = m
        result = None
        for s in range(min(s_max, m), s_min - 1, -1):
            cfg = OptimizerConfig(
                D=D,
                m=m,
                t=t,
                parties=list(structure.dims),
                separable_count=s,
                restarts=restarts or Settings.restarts(),
                max_iterations=max_iterations or Settings.max_iterations(),
                seed=seed,
            )
            result = self.minimize(cfg)
            logger.info(f"Separable count {s}: relative gap {result.relative_gap:.3e}")
            if result.relative_gap <= accept_gap:
                return s, result
        logger.warning(f"No separable count in [{s_min}, {s_max}] reached relative gap {accept_gap}")
        return None, result


frame_optimizer = FramePotentialOptimizer()


def minimize_frame_potential(cfg: OptimizerConfig) -> OptimizationResult:
    return frame_optimizer.minimize(cfg)


def maximize_separable_count(
    D: int, m: int, structure: PartyStructure, t: int = 2, **kwargs
) -> Tuple[Optional[int], OptimizationResult]:
    return frame_optimizer.maximize_separable_count(D, m, structure, t, **kwargs)
