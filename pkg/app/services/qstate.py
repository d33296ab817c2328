"""
Multipartite linear algebra: tensor products, partial traces, purities and
Hilbert-Schmidt geometry on dense matrices

Party 1 is the slowest-varying index, so |x_1 x_2 ... x_N> sits at position
x_1 d_2...d_N + ... + x_N, the ordering numpy.kron produces.
"""
import logging
from typing import Sequence, Union

import numpy as np
from scipy.stats import unitary_group

from ..models.errors import StructureError
from ..models.quantum import DensityMatrix, PartyStructure, PartySubset, StateVector

logger = logging.getLogger(__name__)

Operator = Union[DensityMatrix, np.ndarray]


def _as_array(op: Operator) -> np.ndarray:
    if isinstance(op, DensityMatrix):
        return op.entries
    return np.asarray(op, dtype=complex)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; the first factor is the slow index"""
    return StateVector(np.kron(a.amplitudes, b.amplitudes), a.structure.concat(b.structure))


def tensor_all(states: Sequence[StateVector]) -> StateVector:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def partial_trace_array(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every party not in keep (0-based, increasing) from a dense operator"""
    dims = list(dims)
    n = len(dims)
    t = np.asarray(rho).reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # trace from the highest index down so remaining axis numbers stay valid
    current = n
    for i in reversed(traced):
        t = np.trace(t, axis1=i, axis2=i + current)
        current -= 1
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(dk, dk)


def partial_trace(rho: DensityMatrix, keep: PartySubset) -> DensityMatrix:
    """Reduction of rho to the parties in keep"""
    structure = rho.structure
    keep.check(structure.n_parties)
    kept = keep.zero_based()
    reduced = partial_trace_array(rho.entries, structure.dims, kept)
    sub = PartyStructure(tuple(structure.dims[i] for i in kept))
    return DensityMatrix(reduced, sub, check_positivity=rho.check_positivity)


def reduced_density_array(state: StateVector, keep: PartySubset) -> np.ndarray:
    """Reduction of |v><v| to keep, computed from the amplitudes as M M^dagger"""
    structure = state.structure
    keep.check(structure.n_parties)
    kept = list(keep.zero_based())
    rest = [i for i in range(structure.n_parties) if i not in kept]
    psi = state.amplitudes.reshape(structure.dims)
    psi = np.transpose(psi, kept + rest)
    dk = int(np.prod([structure.dims[i] for i in kept]))
    mat = psi.reshape(dk, -1)
    return mat @ mat.conj().T


def reduce_state(state: StateVector, keep: PartySubset) -> DensityMatrix:
    kept = keep.zero_based()
    sub = PartyStructure(tuple(state.structure.dims[i] for i in kept))
    return DensityMatrix(reduced_density_array(state, keep), sub)


def purity(rho: Operator) -> float:
    """Tr(rho^2) for a Hermitian rho"""
    arr = _as_array(rho)
    return float(np.sum(np.abs(arr) ** 2))


def hs_inner(a: Operator, b: Operator) -> Union[float, complex]:
    """Hilbert-Schmidt product Tr(A^dagger B); real for Hermitian inputs"""
    A = _as_array(a)
    B = _as_array(b)
    if A.shape != B.shape:
        raise StructureError(f"Operator shapes differ: {A.shape} vs {B.shape}")
    value = complex(np.vdot(A, B))
    hermitian = np.allclose(A, A.conj().T) and np.allclose(B, B.conj().T)
    if hermitian:
        if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
            raise StructureError(f"Hilbert-Schmidt product of Hermitian operators has imaginary part {value.imag:.3e}")
        return float(value.real)
    return value


def hs_distance(a: Operator, b: Operator) -> float:
    A = _as_array(a)
    B = _as_array(b)
    if A.shape != B.shape:
        raise StructureError(f"Operator shapes differ: {A.shape} vs {B.shape}")
    return float(np.linalg.norm(A - B))


def projector(state: StateVector) -> DensityMatrix:
    return DensityMatrix.pure(state)


def basis_state(index: int, structure: PartyStructure) -> StateVector:
    amps = np.zeros(structure.dimension, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps, structure)


def haar_random_state(structure: PartyStructure, rng: np.random.Generator) -> StateVector:
    D = structure.dimension
    amps = rng.normal(size=D) + 1j * rng.normal(size=D)
    return StateVector.normalized(amps, structure)


def random_density_matrix(
    structure: PartyStructure, rng: np.random.Generator, rank: int = None
) -> DensityMatrix:
    """Induced-measure random state G G^dagger / Tr, full rank by default"""
    D = structure.dimension
    rank = rank or D
    g = rng.normal(size=(D, rank)) + 1j * rng.normal(size=(D, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho, structure)


def haar_random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def apply_local_unitaries(state: StateVector, unitaries: Sequence[np.ndarray]) -> StateVector:
    """(U_1 x ... x U_N)|v>, one unitary per party"""
    dims = state.structure.dims
    if len(unitaries) != len(dims):
        raise StructureError(f"{len(unitaries)} unitaries for {len(dims)} parties")
    op = np.array([[1.0]], dtype=complex)
    for u, d in zip(unitaries, dims):
        u = np.asarray(u, dtype=complex)
        if u.shape != (d, d):
            raise StructureError(f"Local unitary of shape {u.shape} on a {d}-level party")
        op = np.kron(op, u)
    return StateVector.normalized(op @ state.amplitudes, state.structure)


def permute_parties(state: StateVector, order: Sequence[int]) -> StateVector:
    """Reorder parties; order lists old 1-based party indices in their new positions"""
    dims = state.structure.dims
    axes = [int(i) - 1 for i in order]
    if sorted(axes) != list(range(len(dims))):
        raise StructureError(f"{list(order)} is not a permutation of {len(dims)} parties")
    psi = state.amplitudes.reshape(dims).transpose(axes).reshape(-1)
    return StateVector(psi, PartyStructure(tuple(dims[a] for a in axes)))


def extend_with_maximally_mixed(
    rho_sub: DensityMatrix, subset: PartySubset, structure: PartyStructure
) -> DensityMatrix:
    """rho_sub on subset tensored with I/d on the complement, in party order"""
    n = structure.n_parties
    subset.check(n)
    kept = list(subset.zero_based())
    rest = [i for i in range(n) if i not in kept]
    d_rest = int(np.prod([structure.dims[i] for i in rest])) if rest else 1
    full = np.kron(rho_sub.entries, np.eye(d_rest) / d_rest)
    # full currently orders parties as kept + rest; undo that permutation
    current = kept + rest
    dims_current = [structure.dims[i] for i in current]
    inverse = [current.index(i) for i in range(n)]
    t = full.reshape(dims_current + dims_current)
    t = t.transpose(inverse + [n + i for i in inverse])
    D = structure.dimension
    return DensityMatrix(t.reshape(D, D), structure)
