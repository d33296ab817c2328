"""
Services module: linear algebra, design verification, entanglement, nesting,
catalog, optimization and tomography
"""
from .catalog import CatalogService, catalog_service
from .optimizer import FramePotentialOptimizer, frame_optimizer
from .tomography import TomographyService, tomography_service

__all__ = [
    "CatalogService",
    "catalog_service",
    "FramePotentialOptimizer",
    "frame_optimizer",
    "TomographyService",
    "tomography_service",
]
