"""
Reduction calculus for multipartite tight measurements

A tight measurement built from fully separable and k-uniform vectors reduces to
a party subset X of size k: separable vectors restrict to their local factor on X,
k-uniform vectors reduce to identity shares and drop out. The measurement is nested
when every such induced set is again tight.
"""
import logging
from typing import Dict, List, Optional

import numpy as np

from ..config import Settings
from ..models.errors import PreconditionError, ReductionConsistencyError
from ..models.quantum import DensityMatrix, PartyStructure, PartySubset, Povm, StateVector
from ..models.schemas import EntanglementProfile, NestedVerdict, PovmDocument
from . import qstate
from .entanglement import profile_povm, subsets_of_size
from .povm import born_probabilities, verify_design

logger = logging.getLogger(__name__)


def fix_global_phase(amplitudes: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude amplitude is real and positive"""
    amps = np.asarray(amplitudes, dtype=complex)
    pivot = amps[int(np.argmax(np.abs(amps)))]
    return amps * (abs(pivot) / pivot)


def local_factor(v: StateVector, subset: PartySubset, tol: Optional[float] = None) -> StateVector:
    """The pure state of v on subset, from the dominant eigenvector of its reduction"""
    tol = Settings.classify_tol() if tol is None else tol
    rho = qstate.reduced_density_array(v, subset)
    p = qstate.purity(rho)
    if p < 1.0 - tol:
        raise ReductionConsistencyError(
            f"Reduction to {{{subset.label}}} has purity {p:.12g}; expected a pure factor"
        )
    _, vecs = np.linalg.eigh(rho)
    factor = fix_global_phase(vecs[:, -1])
    sub = PartyStructure(tuple(v.structure.dims[i] for i in subset.zero_based()))
    return StateVector.normalized(factor, sub)


def _bound_saturated(d: int, N: int, k: int, m: int, m_sep: int) -> bool:
    return m_sep * (d ** N + 1) == m * (d ** k + 1)


def _check_structure(povm: Povm, subset: PartySubset) -> PartyStructure:
    structure = povm.structure
    subset.check(structure.n_parties)
    if not 1 <= subset.size <= structure.n_parties - 1:
        raise PreconditionError(
            f"Reduction subset must leave at least one party traced out, got {{{subset.label}}}"
        )
    if not structure.is_uniform:
        raise PreconditionError(f"Nested reductions need equal local dimensions, got {structure}")
    return structure


def reduce_povm(
    povm: Povm,
    subset: PartySubset,
    profile: Optional[EntanglementProfile] = None,
    tol: Optional[float] = None,
    classify_tol: Optional[float] = None,
) -> NestedVerdict:
    """Reduce a measurement to the parties in subset

    Generic vectors (neither separable nor uniform enough to drop out) make the set
    non-reducible; the verdict then names them instead of carrying an induced POVM.
    """
    structure = _check_structure(povm, subset)
    classify_tol = Settings.classify_tol() if classify_tol is None else classify_tol
    profile = profile or profile_povm(povm, classify_tol)
    d, N, k, m = structure.local_dim, structure.n_parties, subset.size, povm.m

    separable, uniform, offending = [], [], []
    for record in profile.records:
        if record.classification == "fully_separable":
            separable.append(record.index)
        elif record.classification == "k_uniform" and (record.uniformity or 0) >= k:
            uniform.append(record.index)
        else:
            offending.append(record.index)

    m_sep = len(separable)
    bound_saturated = _bound_saturated(d, N, k, m, m_sep)
    base = dict(
        subset=subset.label,
        k=k,
        m=m,
        m_sep=m_sep,
        separable_indices=separable,
        discarded_uniform_count=len(uniform),
        bound_saturated=bound_saturated,
    )

    if offending:
        preview = offending[:8]
        more = "" if len(offending) <= 8 else f" (+{len(offending) - 8} more)"
        logger.info(f"Subset {{{subset.label}}}: {len(offending)} vectors neither separable nor {k}-uniform")
        return NestedVerdict(
            **base,
            reducible=False,
            offending_indices=offending,
            nested=False,
            message=f"not reducible: vectors {preview}{more} are neither fully separable nor {k}-uniform",
        )

    if m_sep == 0:
        return NestedVerdict(
            **base,
            reducible=True,
            nested=False,
            message="no fully separable vectors; the induced measurement is empty",
        )

    factors = tuple(local_factor(povm.vectors[j], subset, classify_tol) for j in separable)
    induced = Povm(factors, np.full(m_sep, 1.0 / m_sep), name=f"{povm.name or 'povm'}|{subset.label}")
    design = verify_design(induced, 2, tol)
    consistent = design.is_saturated == bound_saturated
    if not consistent:
        logger.warning(
            f"Subset {{{subset.label}}}: induced tightness {design.is_saturated} disagrees with "
            f"bound saturation {bound_saturated} ({m_sep}*{d ** N + 1} vs {m}*{d ** k + 1})"
        )
    return NestedVerdict(
        **base,
        reducible=True,
        induced_povm=PovmDocument.from_povm(induced),
        induced_design=design,
        nested=design.is_saturated and bound_saturated,
        consistent=consistent,
    )


def verify_nested(
    povm: Povm, k: int, tol: Optional[float] = None, classify_tol: Optional[float] = None
) -> List[NestedVerdict]:
    """reduce_povm over every size-k subset, in lexicographic order"""
    verdict = verify_design(povm, 2, tol)
    if not verdict.is_saturated:
        raise PreconditionError(
            f"Nested verification needs a tight measurement; relative gap {verdict.relative_gap:.3e}"
        )
    structure = povm.structure
    if not 1 <= k <= structure.n_parties - 1:
        raise PreconditionError(f"k must satisfy 1 <= k <= N-1 = {structure.n_parties - 1}, got {k}")
    classify_tol = Settings.classify_tol() if classify_tol is None else classify_tol
    profile = profile_povm(povm, classify_tol)
    verdicts = [
        reduce_povm(povm, subset, profile, tol, classify_tol)
        for subset in subsets_of_size(structure.n_parties, k)
    ]
    logger.info(
        f"Nested check k={k} on {povm.name or 'povm'}: "
        f"{sum(v.nested for v in verdicts)}/{len(verdicts)} subsets nested"
    )
    return verdicts


def is_nested(verdicts: List[NestedVerdict]) -> bool:
    return bool(verdicts) and all(v.nested for v in verdicts)


def induced_probabilities_check(
    povm: Povm,
    subset: PartySubset,
    rho_sub: DensityMatrix,
    profile: Optional[EntanglementProfile] = None,
    classify_tol: Optional[float] = None,
) -> Dict[str, float]:
    """Probability bookkeeping for rho = rho_sub (x) I/d^(N-k)

    Separable outcomes satisfy p_j = (m_sep/m) p~_j and the uniform block sums to
    1 - m_sep/m. Returns the largest deviation of each relation.
    """
    if not povm.has_uniform_weights:
        raise PreconditionError("Probability bookkeeping assumes equal weights")
    verdict = reduce_povm(povm, subset, profile, classify_tol=classify_tol)
    if not verdict.reducible or verdict.induced_povm is None:
        raise PreconditionError(f"Subset {{{subset.label}}} does not induce a measurement")
    induced = verdict.induced_povm.to_povm()
    rho = qstate.extend_with_maximally_mixed(rho_sub, subset, povm.structure)
    p = born_probabilities(povm, rho)
    p_tilde = born_probabilities(induced, rho_sub)
    ratio = verdict.m_sep / verdict.m
    sep = np.asarray(verdict.separable_indices)
    rest = np.setdiff1d(np.arange(povm.m), sep)
    return {
        "separable": float(np.max(np.abs(p[sep] - ratio * p_tilde))),
        "uniform_block": float(abs(p[rest].sum() - (1.0 - ratio))),
    }
