"""
Models module: value types, report schemas and errors
"""
from .errors import (
    CatalogVerificationError,
    PovmLoadError,
    PreconditionError,
    ReductionConsistencyError,
    StructureError,
    TightPovmError,
)
from .quantum import DensityMatrix, PartyStructure, PartySubset, Povm, StateVector
from .schemas import (
    DesignVerdict,
    EntanglementProfile,
    NestedVerdict,
    OptimizationResult,
    OptimizerConfig,
    PovmDocument,
    RestartSummary,
    RobustnessReport,
    SeparabilityBoundReport,
    VectorRecord,
)

__all__ = [
    'CatalogVerificationError', 'PovmLoadError', 'PreconditionError', 'ReductionConsistencyError',
    'StructureError', 'TightPovmError',
    'DensityMatrix', 'PartyStructure', 'PartySubset', 'Povm', 'StateVector',
    'DesignVerdict', 'EntanglementProfile', 'NestedVerdict', 'OptimizationResult', 'OptimizerConfig',
    'PovmDocument', 'RestartSummary', 'RobustnessReport', 'SeparabilityBoundReport', 'VectorRecord',
]
