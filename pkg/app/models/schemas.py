"""
Pydantic models for reports, configs and the POVM JSON file format
"""
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ..config import Settings
from .errors import PovmLoadError, StructureError
from .quantum import PartyStructure, Povm, StateVector


Classification = Literal["fully_separable", "k_uniform", "generic"]


class PovmDocument(BaseModel):
    """POVM JSON format shared by every command; complex numbers are [re, im] pairs"""
    name: Optional[str] = None
    provenance: Optional[str] = None
    tolerance: Optional[float] = Field(
        None, gt=0, description="Suggested verification tolerance for data given to limited precision"
    )
    dimension: int = Field(..., ge=1, description="Ambient dimension D")
    parties: List[int] = Field(..., min_length=1, description="Local dimensions, product D")
    weights: Optional[List[float]] = Field(None, description="Defaults to equal weights")
    vectors: List[List[List[float]]] = Field(..., min_length=1, description="m vectors of [re, im]")

    @field_validator("vectors")
    @classmethod
    def _pairs(cls, vectors):
        for j, vec in enumerate(vectors):
            for a, pair in enumerate(vec):
                if len(pair) != 2:
                    raise ValueError(f"vectors[{j}][{a}] must be an [re, im] pair")
        return vectors

    @model_validator(mode="after")
    def _shapes(self):
        if int(np.prod(self.parties)) != self.dimension:
            raise ValueError(f"parties {self.parties} do not multiply to dimension {self.dimension}")
        for j, vec in enumerate(self.vectors):
            if len(vec) != self.dimension:
                raise ValueError(f"vectors[{j}] has {len(vec)} entries, expected {self.dimension}")
        if self.weights is not None and len(self.weights) != len(self.vectors):
            raise ValueError(f"{len(self.weights)} weights for {len(self.vectors)} vectors")
        return self

    def to_povm(self, norm_tol: Optional[float] = None) -> Povm:
        """Validate unit norms and build the Povm value"""
        norm_tol = Settings.load_norm_tol() if norm_tol is None else norm_tol
        try:
            structure = PartyStructure(tuple(self.parties))
        except StructureError as e:
            raise PovmLoadError(str(e), field="parties") from e
        states = []
        for j, vec in enumerate(self.vectors):
            amps = np.array([re + 1j * im for re, im in vec], dtype=complex)
            norm_sq = float(np.vdot(amps, amps).real)
            if abs(norm_sq - 1.0) > norm_tol:
                raise PovmLoadError(
                    f"vectors[{j}] is not unit-normalized (|v|^2 = {norm_sq:.12g})",
                    field="vectors",
                    index=j,
                )
            states.append(StateVector.normalized(amps, structure))
        if self.weights is None:
            weights = np.full(len(states), 1.0 / len(states))
        else:
            weights = np.asarray(self.weights, dtype=float)
            if np.any(weights < 0):
                raise PovmLoadError("weights must be non-negative", field="weights")
            if abs(weights.sum() - 1.0) > norm_tol:
                raise PovmLoadError(f"weights sum to {weights.sum():.12g}, expected 1", field="weights")
            weights = weights / weights.sum()
        return Povm(tuple(states), weights, name=self.name)

    @classmethod
    def from_povm(
        cls,
        povm: Povm,
        name: Optional[str] = None,
        provenance: Optional[str] = None,
        tolerance: Optional[float] = None,
    ) -> "PovmDocument":
        vectors = [[[float(z.real), float(z.imag)] for z in v.amplitudes] for v in povm.vectors]
        weights = None if povm.has_uniform_weights else [float(w) for w in povm.weights]
        return cls(
            name=name or povm.name,
            provenance=provenance,
            tolerance=tolerance,
            dimension=povm.dimension,
            parties=list(povm.structure.dims),
            weights=weights,
            vectors=vectors,
        )


class DesignVerdict(BaseModel):
    """Frame potential against the Welch bound at order t

    potential/bound use the scaled convention F_t = m^2 Phi_t, bound m^2 / C(D+t-1, t);
    weighted_potential/weighted_bound are Phi_t and 1 / C(D+t-1, t).
    """
    t: int
    m: int
    dimension: int
    potential: float
    bound: float
    residual: float
    relative_gap: float
    weighted_potential: float
    weighted_bound: float
    printed_bound: float
    uniform_weights: bool
    tolerance: float
    is_saturated: bool
    is_ic: bool
    notes: List[str] = Field(default_factory=list)


class VectorRecord(BaseModel):
    index: int
    classification: Classification
    uniformity: Optional[int] = Field(None, description="Maximal k for k_uniform vectors")
    purities: Dict[str, float] = Field(default_factory=dict, description="Keyed by subset label '1,3'")
    entropy: Optional[float] = Field(None, description="Mean single-party von Neumann entropy (bits)")
    three_tangle: Optional[float] = None


class EntanglementProfile(BaseModel):
    parties: List[int]
    tolerance: float
    records: List[VectorRecord]
    mean_purities: Dict[str, float] = Field(default_factory=dict)
    lubkin: Dict[str, float] = Field(default_factory=dict, description="Haar averages per subset size")
    counts: Dict[str, int] = Field(default_factory=dict)

    @property
    def separable_indices(self) -> List[int]:
        return [r.index for r in self.records if r.classification == "fully_separable"]

    @property
    def separable_count(self) -> int:
        return len(self.separable_indices)

    def record(self, index: int) -> VectorRecord:
        return self.records[index]


class SeparabilityBoundReport(BaseModel):
    d: int
    N: int
    k: int
    m: int
    m_sep_observed: Optional[int] = None
    m_sep_max: int
    exact_bound: str = Field(..., description="m (d^k+1) / (d^N+1) as a reduced fraction")
    exact_bound_value: float
    is_integral: bool
    saturated: Optional[bool] = None


class NestedVerdict(BaseModel):
    subset: str
    k: int
    m: int
    m_sep: int
    reducible: bool
    separable_indices: List[int] = Field(default_factory=list)
    offending_indices: List[int] = Field(default_factory=list)
    discarded_uniform_count: int
    induced_povm: Optional[PovmDocument] = None
    induced_design: Optional[DesignVerdict] = None
    bound_saturated: bool
    nested: bool
    consistent: Optional[bool] = Field(
        None, description="Induced saturation agrees with bound saturation (None when not reducible)"
    )
    message: Optional[str] = None


class OptimizerConfig(BaseModel):
    D: int = Field(..., ge=2)
    m: int = Field(..., ge=1)
    t: int = Field(2, ge=1)
    parties: Optional[List[int]] = Field(None, description="Structure for product constraints")
    separable_count: int = Field(0, ge=0)
    restarts: int = Field(default_factory=Settings.restarts, ge=1)
    max_iterations: int = Field(default_factory=Settings.max_iterations, ge=1)
    gradient_tolerance: float = Field(1e-10, gt=0)
    seed: int = Field(0, ge=0, lt=2**64)
    workers: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _consistent(self):
        if self.separable_count > self.m:
            raise ValueError(f"separable_count {self.separable_count} exceeds m = {self.m}")
        if self.parties is not None and int(np.prod(self.parties)) != self.D:
            raise ValueError(f"parties {self.parties} do not multiply to D = {self.D}")
        if self.separable_count and (self.parties is None or len(self.parties) < 2):
            raise ValueError("separable_count > 0 needs a multipartite 'parties' structure")
        return self

    def structure(self) -> PartyStructure:
        return PartyStructure(tuple(self.parties) if self.parties else (self.D,))


class RestartSummary(BaseModel):
    restart_index: int
    potential: float
    gap: float
    iterations: int
    converged: bool


class OptimizationResult(BaseModel):
    povm: PovmDocument
    potential: float
    bound: float
    gap: float
    relative_gap: float
    iterations: int
    restart_index: int
    converged: bool
    product_residual: float = 0.0
    config: Optional[OptimizerConfig] = None
    trace: List[RestartSummary] = Field(default_factory=list)


class RobustnessReport(BaseModel):
    povm_name: str
    baseline_name: str
    dimension: int
    noise: float = Field(..., ge=0.0, le=1.0)
    noise_model: str
    trials: int
    seed: int
    mean_error: float = Field(..., ge=0.0)
    baseline_mean_error: float = Field(..., ge=0.0)
    std_error: float
    baseline_std_error: float
    ratio: Optional[float] = Field(None, description="baseline_mean_error / mean_error")
