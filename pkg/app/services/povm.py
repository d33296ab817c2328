"""
POVM geometry: frame potentials, Welch bounds, design and IC verdicts, Born
probabilities, linear reconstruction and the purity identity of tight measurements
"""
import logging
from math import comb
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import svdvals

from ..config import IC_RANK_TOL, Settings
from ..models.errors import PreconditionError, StructureError
from ..models.quantum import DensityMatrix, Povm
from ..models.schemas import DesignVerdict
from . import qstate

logger = logging.getLogger(__name__)


def overlap_matrix(povm: Povm) -> np.ndarray:
    """|<phi_i|phi_j>|^2 for all pairs"""
    V = povm.matrix
    G = V.conj() @ V.T
    return np.abs(G) ** 2


def frame_potential(povm: Povm, t: int) -> float:
    """Weighted frame potential Phi_t = sum_ij w_i w_j |<phi_i|phi_j>|^(2t)"""
    if t < 1:
        raise PreconditionError(f"Design order must be >= 1, got {t}")
    w = povm.weights
    # numpy sums pairwise, so the value does not depend on thread count
    return float(np.sum(np.outer(w, w) * overlap_matrix(povm) ** t))


def scaled_potential(povm: Povm, t: int) -> float:
    """Equal-weight scaled convention F_t = m^2 Phi_t"""
    return povm.m ** 2 * frame_potential(povm, t)


def weighted_welch_bound(D: int, t: int) -> float:
    return 1.0 / comb(D + t - 1, t)


def welch_bound(D: int, m: int, t: int) -> float:
    """Frame-potential bound m^2 / C(D+t-1, t)"""
    if D < 2 or m < 1 or t < 1:
        raise PreconditionError(f"welch_bound needs D >= 2, m >= 1, t >= 1 (got {D}, {m}, {t})")
    return m ** 2 / comb(D + t - 1, t)


def printed_bound(D: int, m: int, t: int) -> float:
    """The bound in its printed form D^t / m^(t-2) / C(D+t-1, t), kept for comparison"""
    return D ** t / m ** (t - 2) / comb(D + t - 1, t)


def gram_matrix(povm: Povm, include_zero_weight: bool = False) -> np.ndarray:
    """Hilbert-Schmidt Gram matrix of the rank-one projectors"""
    G = overlap_matrix(povm)
    if include_zero_weight:
        return G
    keep = povm.weights > 0
    return G[np.ix_(keep, keep)]


def ic_rank(povm: Povm, tol: Optional[float] = None) -> int:
    tol = IC_RANK_TOL if tol is None else tol
    s = svdvals(gram_matrix(povm))
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def verify_ic(povm: Povm, tol: Optional[float] = None) -> bool:
    """True iff the projectors span the D^2-dimensional operator space"""
    return ic_rank(povm, tol) == povm.dimension ** 2


def verify_design(povm: Povm, t: int = 2, tol: Optional[float] = None) -> DesignVerdict:
    """Compare the order-t frame potential with the Welch bound

    Saturation at t=1 certifies a tight frame (a POVM after scaling); at t=2 it
    certifies a tight IC-POVM.
    """
    tol = Settings.saturation_tol() if tol is None else tol
    D, m = povm.dimension, povm.m
    phi = frame_potential(povm, t)
    phi_min = weighted_welch_bound(D, t)
    potential = m ** 2 * phi
    bound = m ** 2 * phi_min
    residual = potential - bound
    relative_gap = residual / bound
    notes = []
    uniform = povm.has_uniform_weights
    if t >= 2:
        notes.append(
            "printed bound D^t/m^(t-2)/C(D+t-1,t) differs from the scaled convention "
            "m^2/C(D+t-1,t) used for saturation"
        )
    if not uniform:
        notes.append("non-uniform weights: saturation judged on Phi_t against 1/C(D+t-1,t)")
        logger.debug(f"verify_design on non-uniform weights (m={m}, D={D})")
    if residual < -1e-9 * max(1.0, bound):
        logger.warning(f"Frame potential {potential!r} below the Welch bound {bound!r}")
    return DesignVerdict(
        t=t,
        m=m,
        dimension=D,
        potential=potential,
        bound=bound,
        residual=residual,
        relative_gap=relative_gap,
        weighted_potential=phi,
        weighted_bound=phi_min,
        printed_bound=printed_bound(D, m, t),
        uniform_weights=uniform,
        tolerance=tol,
        is_saturated=bool(relative_gap <= tol),
        is_ic=verify_ic(povm),
        notes=notes,
    )


def identity_defect(povm: Povm) -> float:
    """||sum_j Pi_j - I|| in Hilbert-Schmidt norm"""
    V = povm.matrix
    S = povm.dimension * (V.T * povm.weights) @ V.conj()
    return float(np.linalg.norm(S - np.eye(povm.dimension)))


def born_probabilities(povm: Povm, rho: DensityMatrix) -> np.ndarray:
    """p_j = Tr(rho Pi_j) = D w_j <phi_j|rho|phi_j>"""
    if rho.dimension != povm.dimension:
        raise StructureError(f"State dimension {rho.dimension} != POVM dimension {povm.dimension}")
    V = povm.matrix
    expectations = np.einsum("jd,de,je->j", V.conj(), rho.entries, V).real
    return povm.dimension * povm.weights * expectations


def _check_probs(povm: Povm, probs: Sequence[float]) -> np.ndarray:
    p = np.asarray(probs, dtype=float).reshape(-1)
    if p.shape[0] != povm.m:
        raise StructureError(f"{p.shape[0]} probabilities for {povm.m} outcomes")
    return p


def reconstruct(povm: Povm, probs: Sequence[float]) -> DensityMatrix:
    """Linear inversion for a (weighted) 2-design: rho = (D+1) sum_j p_j |phi_j><phi_j| - I

    With equal weights this is m(D+1)/D sum_j p_j Pi_j - I. The caller is responsible
    for the POVM being tight; the result is Hermitian with unit trace but may be
    slightly non-positive for noisy input. Probabilities are rescaled to sum to one.
    """
    p = _check_probs(povm, probs)
    total = float(p.sum())
    if not total > 0:
        raise PreconditionError(f"Probabilities sum to {total!r}, expected a positive total")
    if abs(total - 1.0) > 1e-12:
        logger.debug(f"Rescaling probabilities that sum to {total!r} for {povm.name}")
    p = p / total
    D = povm.dimension
    V = povm.matrix
    acc = (V.T * p) @ V.conj()
    rho = (D + 1) * acc - np.eye(D)
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho, povm.structure, check_positivity=False)


def least_squares_reconstruct(povm: Povm, probs: Sequence[float]) -> DensityMatrix:
    """Least-squares solution of p_j = Tr(Pi_j rho), for IC but non-tight POVMs"""
    p = _check_probs(povm, probs)
    D = povm.dimension
    A = np.stack([povm.element(j).T.reshape(-1) for j in range(povm.m)])
    x, *_ = np.linalg.lstsq(A, p.astype(complex), rcond=None)
    rho = x.reshape(D, D)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    return DensityMatrix(rho, povm.structure, check_positivity=False)


def purity_identity_residual(povm: Povm, rho: DensityMatrix, tol: Optional[float] = None) -> float:
    """|sum_j p_j^2 / (m w_j) - D (Tr rho^2 + 1) / (m (D+1))|

    For equal weights the first term is sum_j p_j^2. Requires a tight POVM.
    """
    verdict = verify_design(povm, 2, tol)
    if not verdict.is_saturated:
        raise PreconditionError(
            f"Purity identity needs a tight POVM (relative gap {verdict.relative_gap:.3e})"
        )
    D, m = povm.dimension, povm.m
    p = born_probabilities(povm, rho)
    w = povm.weights
    mask = w > 0
    lhs = float(np.sum(p[mask] ** 2 / (m * w[mask])))
    rhs = D * (qstate.purity(rho) + 1) / (m * (D + 1))
    return abs(lhs - rhs)


def product_povm(a: Povm, b: Povm) -> Povm:
    """All pairs phi_i^A x phi_j^B with weights w_i^A w_j^B, A index slow"""
    vectors = tuple(qstate.tensor(u, v) for u in a.vectors for v in b.vectors)
    weights = np.kron(a.weights, b.weights)
    weights = weights / weights.sum()
    name = f"{a.name}*{b.name}" if a.name and b.name else None
    return Povm(vectors, weights, name=name)


def qubit_bloch_from_mub_probabilities(probs: Sequence[float]) -> np.ndarray:
    """Bloch vector from the six outcomes of the qubit MUB ordered Z+, Z-, X+, X-, Y+, Y-

    Each outcome has probability <phi|rho|phi>/3, so three differences fix the state.
    """
    p = np.asarray(probs, dtype=float).reshape(-1)
    if p.shape[0] != 6:
        raise StructureError(f"Expected 6 qubit-MUB probabilities, got {p.shape[0]}")
    return 3.0 * np.array([p[2] - p[3], p[4] - p[5], p[0] - p[1]])
