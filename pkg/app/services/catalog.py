"""
Catalog of named measurements

Builders for the standard small tight measurements (qubit SIC and MUBs, the
complete two-qubit MUB set, the Hoggar lines, the two-qubit SIC with five separable
vectors) and a few non-tight controls. Every entry re-checks its expected
quantities when first loaded and is cached afterwards.
"""
import json
import logging
import os
import threading
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..config import PRINTED_DATA_TOL, VERDICT_TOL, Settings
from ..models.errors import CatalogVerificationError, StructureError
from ..models.quantum import PartyStructure, Povm, StateVector
from ..models.schemas import PovmDocument
from . import entanglement, povm as povm_ops, qstate

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# Columns of these matrices (times 1/2) are the bases B1..B4; B0 is the identity
MUB_D4_MATRICES = (
    np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1]], dtype=complex),
    np.array([[1, 1, 1, 1], [1j, -1j, 1j, -1j], [1j, -1j, -1j, 1j], [-1, -1, 1, 1]], dtype=complex),
    np.array([[1, 1, 1, 1], [1, -1, 1, -1], [-1j, 1j, 1j, -1j], [1j, 1j, -1j, -1j]], dtype=complex),
    np.array([[1, 1, 1, 1], [-1j, 1j, 1j, -1j], [1, -1, 1, -1], [1j, 1j, -1j, -1j]], dtype=complex),
)

# Hoggar fiducials: (|000> + i|011> + i|101> + i|110> + c|111>) / sqrt(6)
HOGGAR_LAST_TERM = {1: -(1 - 1j), 2: -(1 + 1j)}

HOGGAR_OVERLAP = 1.0 / 9.0
OVERLAP_TOL = 1e-10

QUBIT = PartyStructure((2,))
TWO_QUBITS = PartyStructure((2, 2))


def _equal_weights(m: int) -> np.ndarray:
    return np.full(m, 1.0 / m)


def off_diagonal_overlaps(p: Povm) -> np.ndarray:
    G = povm_ops.overlap_matrix(p)
    return G[~np.eye(p.m, dtype=bool)]


def qubit_sic() -> Povm:
    """Tetrahedral qubit SIC: |0> and sqrt(1/3)|0> + sqrt(2/3) e^(2 pi i k/3)|1>"""
    vectors = [[1.0, 0.0]]
    for k in range(3):
        vectors.append([1 / np.sqrt(3), np.sqrt(2 / 3) * np.exp(2j * np.pi * k / 3)])
    return Povm.from_array(np.array(vectors), QUBIT, name="qubit_sic")


def qubit_mub() -> Povm:
    """The three Pauli eigenbases, ordered Z+, Z-, X+, X-, Y+, Y-"""
    vectors = np.array(
        [
            [1, 0],
            [0, 1],
            [1 / SQRT2, 1 / SQRT2],
            [1 / SQRT2, -1 / SQRT2],
            [1 / SQRT2, 1j / SQRT2],
            [1 / SQRT2, -1j / SQRT2],
        ],
        dtype=complex,
    )
    return Povm.from_array(vectors, QUBIT, name="qubit_mub")


def pauli_sic_fiducial() -> StateVector:
    """Qubit state with Bloch vector (1,1,1)/sqrt(3); its Pauli orbit is a SIC"""
    theta = np.arccos(1 / np.sqrt(3))
    amps = [np.cos(theta / 2), np.exp(1j * np.pi / 4) * np.sin(theta / 2)]
    return StateVector.normalized(amps, QUBIT)


def computational_basis(D: int, parties: Optional[List[int]] = None) -> Povm:
    structure = PartyStructure(tuple(parties) if parties else (D,))
    if structure.dimension != D:
        raise StructureError(f"parties {parties} do not multiply to D = {D}")
    return Povm.from_array(np.eye(D, dtype=complex), structure, name=f"basis_{structure}")


def bell_basis() -> Povm:
    vectors = np.array(
        [[1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0]], dtype=complex
    ) / SQRT2
    return Povm.from_array(vectors, TWO_QUBITS, name="bell_basis")


def mub_d4() -> Povm:
    """Complete set of five MUBs on two qubits; B0, B1, B2 separable, B3, B4 Bell-type"""
    bases = [np.eye(4, dtype=complex)] + [M / 2 for M in MUB_D4_MATRICES]
    vectors = np.concatenate([B.T for B in bases])
    return Povm.from_array(vectors, TWO_QUBITS, name="mub_d4")


def pauli_group_orbit(fiducial: StateVector, name: Optional[str] = None) -> Povm:
    """All 4^N Pauli products applied to an N-qubit fiducial, first party slowest"""
    structure = fiducial.structure
    if any(d != 2 for d in structure.dims):
        raise StructureError(f"Pauli orbits need qubit parties, got {structure}")
    vectors = []
    for labels in product(range(4), repeat=structure.n_parties):
        op = np.array([[1.0]], dtype=complex)
        for a in labels:
            op = np.kron(op, PAULIS[a])
        vectors.append(op @ fiducial.amplitudes)
    return Povm.from_array(np.array(vectors), structure, normalize=True, name=name)


def hoggar_fiducial(index: int) -> StateVector:
    if index not in HOGGAR_LAST_TERM:
        raise StructureError(f"Hoggar fiducial index must be 1 or 2, got {index}")
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = 1
    amps[0b011] = 1j
    amps[0b101] = 1j
    amps[0b110] = 1j
    amps[0b111] = HOGGAR_LAST_TERM[index]
    return StateVector(amps / np.sqrt(6), PartyStructure((2, 2, 2)))


def hoggar(index: int) -> Povm:
    """64 Hoggar lines from the given fiducial; fails unless every overlap is 1/9"""
    name = f"hoggar{index}"
    lines = pauli_group_orbit(hoggar_fiducial(index), name=name)
    deviation = float(np.max(np.abs(off_diagonal_overlaps(lines) - HOGGAR_OVERLAP)))
    if deviation > OVERLAP_TOL:
        raise CatalogVerificationError(name, [f"overlaps deviate from 1/9 by {deviation:.3e}"])
    return lines


def appendix_b_sic(path: Optional[str] = None) -> Povm:
    """Two-qubit SIC with five separable vectors, from the bundled fixture

    Separable vectors are stored as factor pairs and expanded with a tensor product;
    all vectors are normalized on load since the data carry six decimals.
    """
    path = path or os.path.join(Settings.data_dir(), "appendix_b_sic.json")
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)

    def amplitudes(pairs):
        return np.array([re + 1j * im for re, im in pairs], dtype=complex)

    structure = PartyStructure(tuple(data["parties"]))
    vectors = []
    for a, b in data["separable_factors"]:
        fa = StateVector.normalized(amplitudes(a), QUBIT)
        fb = StateVector.normalized(amplitudes(b), QUBIT)
        vectors.append(qstate.tensor(fa, fb))
    for v in data["vectors"]:
        vectors.append(StateVector.normalized(amplitudes(v), structure))
    logger.debug(f"Loaded {len(vectors)} vectors from {path}")
    return Povm(tuple(vectors), _equal_weights(len(vectors)), name=data.get("name", "appendix_b"))


@dataclass
class CatalogEntry:
    name: str
    builder: Callable[[], Povm]
    provenance: str
    expected: Dict[str, Any] = field(default_factory=dict)
    tolerance: float = VERDICT_TOL


ENTRIES: List[CatalogEntry] = [
    CatalogEntry(
        "qubit_sic",
        qubit_sic,
        "Tetrahedral qubit SIC",
        {"F_2": 16 / 3, "overlap": 1 / 3, "tight": True, "ic": True},
    ),
    CatalogEntry(
        "qubit_mub",
        qubit_mub,
        "Three Pauli eigenbases of a qubit",
        {"F_2": 12.0, "tight": True, "ic": True},
    ),
    CatalogEntry(
        "pauli_sic",
        lambda: pauli_group_orbit(pauli_sic_fiducial(), name="pauli_sic"),
        "Pauli orbit of the qubit state with Bloch vector (1,1,1)/sqrt(3)",
        {"F_2": 16 / 3, "overlap": 1 / 3, "tight": True},
    ),
    CatalogEntry(
        "mub_d4",
        mub_d4,
        "Complete set of five two-qubit MUBs: three separable and two Bell-type bases",
        {"F_2": 40.0, "tight": True, "ic": True, "m_sep": 12, "k_uniform": 8, "mean_purity_k1": 0.8},
    ),
    CatalogEntry(
        "hoggar1",
        lambda: hoggar(1),
        "Hoggar lines, fiducial with final amplitude -(1-i)/sqrt(6) on |111>",
        {
            "F_2": 4096 / 36,
            "overlap": 1 / 9,
            "tight": True,
            "m_sep": 0,
            "mean_purity_k1": 2 / 3,
            "three_tangle": 2 / 3,
        },
    ),
    CatalogEntry(
        "hoggar2",
        lambda: hoggar(2),
        "Hoggar lines, fiducial with final amplitude -(1+i)/sqrt(6) on |111>",
        {
            "F_2": 4096 / 36,
            "overlap": 1 / 9,
            "tight": True,
            "m_sep": 0,
            "mean_purity_k1": 2 / 3,
            "three_tangle": 2 / 9,
        },
    ),
    CatalogEntry(
        "appendix_b",
        appendix_b_sic,
        "Numerically optimized two-qubit SIC with five fully separable vectors (six-decimal data)",
        {"F_2": 25.600034, "tight": True, "ic": True, "m_sep": 5},
        tolerance=PRINTED_DATA_TOL,
    ),
    CatalogEntry(
        "qubit_sic_x2",
        lambda: povm_ops.product_povm(qubit_sic(), qubit_sic()),
        "Product of two qubit SICs: informationally complete but not tight",
        {"F_2": 256 / 9, "tight": False, "ic": True, "m_sep": 16},
    ),
    CatalogEntry(
        "bell_basis",
        bell_basis,
        "The four Bell states: every vector 1-uniform, far from tight",
        {"F_2": 4.0, "tight": False, "ic": False, "m_sep": 0, "k_uniform": 4},
    ),
]


class CatalogService:
    """Named, verified and cached catalog measurements"""

    def __init__(self, entries: List[CatalogEntry] = None):
        self._entries = {e.name: e for e in (entries or ENTRIES)}
        self._cache: Dict[str, Povm] = {}
        self._lock = threading.Lock()

    def names(self) -> List[str]:
        return list(self._entries)

    def entry(self, name: str) -> CatalogEntry:
        try:
            return self._entries[name]
        except KeyError:
            raise KeyError(f"Unknown catalog entry '{name}'; available: {', '.join(self._entries)}")

    def get(self, name: str) -> Povm:
        """Build, verify and cache an entry"""
        entry = self.entry(name)
        with self._lock:
            if name in self._cache:
                return self._cache[name]
        built = entry.builder().renamed(name)
        failures = self.verify(entry, built)
        if failures:
            raise CatalogVerificationError(name, failures)
        logger.info(f"Catalog entry '{name}' verified ({built.m} vectors on {built.structure})")
        with self._lock:
            self._cache.setdefault(name, built)
            return self._cache[name]

    def verify(self, entry: CatalogEntry, p: Povm) -> List[str]:
        """Failures of the entry's expected quantities, empty when all hold"""
        failures = []
        expected = entry.expected
        tol = entry.tolerance

        if "F_2" in expected:
            value = povm_ops.scaled_potential(p, 2)
            if abs(value - expected["F_2"]) > tol * max(1.0, abs(expected["F_2"])):
                failures.append(f"F_2 = {value:.9f}, expected {expected['F_2']:.9f}")
        if "overlap" in expected:
            deviation = float(np.max(np.abs(off_diagonal_overlaps(p) - expected["overlap"])))
            if deviation > OVERLAP_TOL:
                failures.append(f"off-diagonal overlaps deviate by {deviation:.3e}")
        if "tight" in expected:
            saturation_tol = max(tol, Settings.saturation_tol()) if tol > VERDICT_TOL else None
            verdict = povm_ops.verify_design(p, 2, saturation_tol)
            if verdict.is_saturated != expected["tight"]:
                failures.append(f"tight = {verdict.is_saturated} (relative gap {verdict.relative_gap:.3e})")
        if "ic" in expected and povm_ops.verify_ic(p) != expected["ic"]:
            failures.append(f"ic != {expected['ic']}")

        needs_profile = any(key in expected for key in ("m_sep", "k_uniform", "mean_purity_k1"))
        if needs_profile:
            profile = entanglement.profile_povm(p, max(tol, VERDICT_TOL))
            if "m_sep" in expected and profile.separable_count != expected["m_sep"]:
                failures.append(f"{profile.separable_count} separable vectors, expected {expected['m_sep']}")
            if "k_uniform" in expected and profile.counts["k_uniform"] != expected["k_uniform"]:
                failures.append(f"{profile.counts['k_uniform']} k-uniform vectors, expected {expected['k_uniform']}")
            if "mean_purity_k1" in expected:
                singles = [v for label, v in profile.mean_purities.items() if "," not in label]
                worst = max(abs(v - expected["mean_purity_k1"]) for v in singles)
                if worst > tol:
                    failures.append(f"single-party mean purity off by {worst:.3e}")
        if "three_tangle" in expected:
            tangles = np.array([entanglement.three_tangle(v) for v in p.vectors])
            worst = float(np.max(np.abs(tangles - expected["three_tangle"])))
            if worst > tol:
                failures.append(f"three-tangle off by {worst:.3e}")
        return failures

    def list_entries(self) -> List[Dict[str, Any]]:
        """Summaries for every entry; builds (and verifies) each one"""
        out = []
        for name, entry in self._entries.items():
            p = self.get(name)
            out.append(
                {
                    "name": name,
                    "m": p.m,
                    "dimension": p.dimension,
                    "parties": list(p.structure.dims),
                    "provenance": entry.provenance,
                    "expected": entry.expected,
                }
            )
        return out

    def document(self, name: str) -> PovmDocument:
        entry = self.entry(name)
        tolerance = entry.tolerance if entry.tolerance > VERDICT_TOL else None
        return PovmDocument.from_povm(self.get(name), name=name, provenance=entry.provenance, tolerance=tolerance)

    def export(self, name: str, path: str) -> PovmDocument:
        from ..utils.helpers import save_povm_document

        doc = self.document(name)
        save_povm_document(doc, path)
        logger.info(f"Exported catalog entry '{name}' to {path}")
        return doc


catalog_service = CatalogService()
