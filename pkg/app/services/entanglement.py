"""
Entanglement diagnostics for measurement vectors

Reduction purities, fully-separable / k-uniform classification, Haar (Lubkin)
average purities, the separable-count bound with its corollaries, and the
three-qubit three-tangle.
"""
import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect
from scipy.stats import entropy

from ..config import Settings
from ..models.errors import PreconditionError, StructureError
from ..models.quantum import PartyStructure, PartySubset, Povm, StateVector
from ..models.schemas import (
    Classification,
    EntanglementProfile,
    SeparabilityBoundReport,
    VectorRecord,
)
from . import qstate

logger = logging.getLogger(__name__)

THREE_QUBITS = PartyStructure((2, 2, 2))


def subsets_of_size(n_parties: int, k: int) -> List[PartySubset]:
    """All size-k subsets of 1..n in lexicographic order"""
    return [PartySubset(c) for c in combinations(range(1, n_parties + 1), k)]


def _check_k(n_parties: int, k: int) -> None:
    if not 1 <= k <= n_parties - 1:
        raise PreconditionError(f"k must satisfy 1 <= k <= N-1 = {n_parties - 1}, got {k}")


def reduction_purities(v: StateVector, k: int) -> Dict[PartySubset, float]:
    """Purity of every size-k reduction of |v><v|"""
    n = v.structure.n_parties
    _check_k(n, k)
    return {
        subset: qstate.purity(qstate.reduced_density_array(v, subset))
        for subset in subsets_of_size(n, k)
    }


def _distance_to_maximally_mixed(v: StateVector, subset: PartySubset) -> float:
    rho = qstate.reduced_density_array(v, subset)
    dk = rho.shape[0]
    return qstate.hs_distance(rho, np.eye(dk) / dk)


def max_uniformity(v: StateVector, tol: Optional[float] = None) -> int:
    """Largest k <= floor(N/2) with every size-k reduction maximally mixed, 0 if none"""
    tol = Settings.classify_tol() if tol is None else tol
    n = v.structure.n_parties
    best = 0
    for k in range(1, n // 2 + 1):
        if all(_distance_to_maximally_mixed(v, s) <= tol for s in subsets_of_size(n, k)):
            best = k
        else:
            break
    return best


def is_fully_separable(v: StateVector, tol: Optional[float] = None) -> bool:
    tol = Settings.classify_tol() if tol is None else tol
    n = v.structure.n_parties
    return all(
        qstate.purity(qstate.reduced_density_array(v, PartySubset((i,)))) >= 1.0 - tol
        for i in range(1, n + 1)
    )


def classify_with_uniformity(v: StateVector, tol: Optional[float] = None) -> Tuple[Classification, Optional[int]]:
    if v.structure.n_parties < 2:
        raise PreconditionError("Classification needs at least two parties")
    if is_fully_separable(v, tol):
        return "fully_separable", None
    k = max_uniformity(v, tol)
    if k > 0:
        return "k_uniform", k
    return "generic", None


def classify(v: StateVector, tol: Optional[float] = None) -> Classification:
    """fully_separable, k_uniform (maximal k via max_uniformity) or generic"""
    return classify_with_uniformity(v, tol)[0]


def lubkin_purity(d: int, N: int, k: int) -> float:
    """Haar-average purity of a k-party reduction, (d^k + d^(N-k)) / (d^N + 1)"""
    _check_k(N, k)
    return (d ** k + d ** (N - k)) / (d ** N + 1)


def average_reduction_purity(povm: Povm, k: int) -> Dict[PartySubset, float]:
    """Weighted mean of the size-k reduction purities over the measurement vectors

    For equal weights this is (1/m) sum_j. Tight measurements reproduce
    lubkin_purity on every subset, which lubkin_deviation checks when the local
    dimension is uniform.
    """
    structure = povm.structure
    _check_k(structure.n_parties, k)
    totals = {s: 0.0 for s in subsets_of_size(structure.n_parties, k)}
    for w, v in zip(povm.weights, povm.vectors):
        for subset, p in reduction_purities(v, k).items():
            totals[subset] += w * p
    return totals


def lubkin_deviation(povm: Povm, k: int) -> Optional[float]:
    """Largest |average purity - Lubkin value| over size-k subsets, None for mixed local dimensions"""
    structure = povm.structure
    averages = average_reduction_purity(povm, k)
    if not structure.is_uniform:
        logger.info(f"Structure {structure} has mixed local dimensions; Lubkin comparison omitted")
        return None
    target = lubkin_purity(structure.local_dim, structure.n_parties, k)
    return max(abs(a - target) for a in averages.values())


def sep_bound(d: int, N: int, k: int, m: int, m_sep_observed: Optional[int] = None) -> SeparabilityBoundReport:
    """Upper bound m_sep <= m (d^k + 1) / (d^N + 1) on fully separable vectors"""
    if k < 1 or m < 1:
        raise PreconditionError(f"sep_bound needs k >= 1 and m >= 1 (got k={k}, m={m})")
    exact = Fraction(m * (d ** k + 1), d ** N + 1)
    saturated = None
    if m_sep_observed is not None:
        saturated = m_sep_observed * (d ** N + 1) == m * (d ** k + 1)
    return SeparabilityBoundReport(
        d=d,
        N=N,
        k=k,
        m=m,
        m_sep_observed=m_sep_observed,
        m_sep_max=math.floor(exact),
        exact_bound=str(exact),
        exact_bound_value=float(exact),
        is_integral=exact.denominator == 1,
        saturated=saturated,
    )


def mub_separable_basis_bound(d: int, N: int, k: int) -> int:
    """Maximal number of fully separable bases in a complete set of d^N + 1 MUBs"""
    if not 1 <= k <= N // 2:
        raise PreconditionError(f"k must satisfy 1 <= k <= floor(N/2) = {N // 2}, got {k}")
    D = d ** N
    report = sep_bound(d, N, k, D * (D + 1))
    return report.m_sep_max // D


def d_max(N: int, m: int, m_sep: int) -> float:
    """Largest local dimension compatible with m_sep separable and m - m_sep (N/2)-uniform vectors

    Solves m_sep (d^N + 1) = m (d^(N/2) + 1) for d >= 1; infinite when m_sep = 0.
    """
    if not 0 <= m_sep <= m:
        raise PreconditionError(f"m_sep must lie in [0, m={m}], got {m_sep}")
    if m_sep == 0:
        logger.info("d_max unbounded: no separable vectors")
        return math.inf
    if m_sep == m:
        return 1.0

    def f(d: float) -> float:
        return m_sep * (d ** N + 1) - m * (d ** (N / 2) + 1)

    hi = 2.0
    while f(hi) <= 0:
        hi *= 2.0
    return float(bisect(f, 1.0, hi, xtol=1e-9))


def sic_mixture_impossible(d: int, N: int, k: int) -> Tuple[bool, Fraction]:
    """Witness that a SIC on d^N cannot mix fully separable and k-uniform vectors

    Returns (impossible, value) where value = (1 + d^k) d^(2N) / (1 + d^N) is the
    saturating separable count; a non-integer value rules the mixture out.
    """
    _check_k(N, k)
    value = Fraction((1 + d ** k) * d ** (2 * N), 1 + d ** N)
    return value.denominator != 1, value


def mixture_purity_identity(d: int, N: int, k: int, m: int, m_sep: int) -> float:
    """Average k-party purity of m_sep pure-reduction and m - m_sep maximally mixed vectors"""
    return (m_sep + (m - m_sep) / d ** k) / m


def three_tangle(v: StateVector) -> float:
    """Three-tangle from the Cayley hyperdeterminant, tau = 4 |Det(a)|"""
    if v.structure != THREE_QUBITS:
        raise StructureError(f"three_tangle needs a 2x2x2 structure, got {v.structure}")
    a = v.amplitudes.reshape(2, 2, 2)
    d1 = (
        a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2
        + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
        + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2
        + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2
    )
    d2 = (
        a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
        + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1]
    )
    d3 = a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1] + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0]
    tau = 4.0 * abs(d1 - 2.0 * d2 + 4.0 * d3)
    return float(min(max(tau, 0.0), 1.0))


def reduction_entropies(v: StateVector) -> List[float]:
    """Von Neumann entropy (bits) of every single-party reduction"""
    out = []
    for i in range(1, v.structure.n_parties + 1):
        eigs = np.clip(np.linalg.eigvalsh(qstate.reduced_density_array(v, PartySubset((i,)))), 0.0, None)
        out.append(float(entropy(eigs, base=2)))
    return out


def average_reduction_entropy(povm: Povm) -> float:
    """Weighted mean over vectors of the mean single-party entropy"""
    per_vector = [np.mean(reduction_entropies(v)) for v in povm.vectors]
    return float(np.dot(povm.weights, per_vector))


def _single_party_purities(v: StateVector) -> np.ndarray:
    return np.array(list(reduction_purities(v, 1).values()))


def is_isoentangled(povm: Povm, tol: Optional[float] = None) -> bool:
    """All vectors share their single-party purities (and the three-tangle for three qubits)"""
    tol = Settings.classify_tol() if tol is None else tol
    if povm.structure.n_parties < 2:
        raise PreconditionError("Isoentanglement needs at least two parties")
    reference = _single_party_purities(povm.vectors[0])
    tangle = three_tangle(povm.vectors[0]) if povm.structure == THREE_QUBITS else None
    for v in povm.vectors[1:]:
        if np.max(np.abs(_single_party_purities(v) - reference)) > tol:
            return False
        if tangle is not None and abs(three_tangle(v) - tangle) > tol:
            return False
    return True


def vector_record(index: int, v: StateVector, tol: Optional[float] = None) -> VectorRecord:
    n = v.structure.n_parties
    tag, k = classify_with_uniformity(v, tol)
    purities = {}
    for size in range(1, n // 2 + 1):
        for subset, p in reduction_purities(v, size).items():
            purities[subset.label] = p
    return VectorRecord(
        index=index,
        classification=tag,
        uniformity=k,
        purities=purities,
        entropy=float(np.mean(reduction_entropies(v))),
        three_tangle=three_tangle(v) if v.structure == THREE_QUBITS else None,
    )


def profile_povm(povm: Povm, tol: Optional[float] = None) -> EntanglementProfile:
    """Classify every vector and average its reduction purities"""
    tol = Settings.classify_tol() if tol is None else tol
    structure = povm.structure
    if structure.n_parties < 2:
        raise PreconditionError(
            f"Entanglement analysis needs a multipartite structure, got {structure}; "
            "set 'parties' in the POVM file (e.g. [2, 2] for D=4)"
        )
    records = [vector_record(j, v, tol) for j, v in enumerate(povm.vectors)]
    mean_purities: Dict[str, float] = {}
    lubkin: Dict[str, float] = {}
    for size in range(1, structure.n_parties // 2 + 1):
        for subset, value in average_reduction_purity(povm, size).items():
            mean_purities[subset.label] = value
        if structure.is_uniform:
            lubkin[str(size)] = lubkin_purity(structure.local_dim, structure.n_parties, size)
    counts = {"fully_separable": 0, "k_uniform": 0, "generic": 0}
    for r in records:
        counts[r.classification] += 1
    logger.debug(f"Profiled {povm.m} vectors on {structure}: {counts}")
    return EntanglementProfile(
        parties=list(structure.dims),
        tolerance=tol,
        records=records,
        mean_purities=mean_purities,
        lubkin=lubkin,
        counts=counts,
    )


def separability_report(
    povm: Povm, k: int, profile: Optional[EntanglementProfile] = None, tol: Optional[float] = None
) -> SeparabilityBoundReport:
    """sep_bound filled with the observed number of fully separable vectors"""
    structure = povm.structure
    if not structure.is_uniform:
        raise PreconditionError(f"The separability bound needs equal local dimensions, got {structure}")
    profile = profile or profile_povm(povm, tol)
    return sep_bound(structure.local_dim, structure.n_parties, k, povm.m, profile.separable_count)
