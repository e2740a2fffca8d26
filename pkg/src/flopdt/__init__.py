"""Exact formal-series toolkit for flops of threefolds and blow-ups of surfaces."""

from .blowup import SurfaceDTSeries, blowup_cells, blowup_error, blowup_transform
from .curves import FlopCurveData, n_invariant
from .errors import (
    CapacityError,
    ChamberError,
    ConsistencyError,
    DomainError,
    FlopDTError,
    ParseError,
    PrecisionError,
    UsageError,
)
from .flop import DTSeries, GeometryConfig, error_term, flop_transform
from .series import ExponentLattice, FormalSeries

__all__ = [
    "CapacityError",
    "ChamberError",
    "ConsistencyError",
    "DTSeries",
    "DomainError",
    "ExponentLattice",
    "FlopCurveData",
    "FlopDTError",
    "FormalSeries",
    "GeometryConfig",
    "ParseError",
    "PrecisionError",
    "SurfaceDTSeries",
    "UsageError",
    "blowup_cells",
    "blowup_error",
    "blowup_transform",
    "error_term",
    "flop_transform",
    "n_invariant",
]

__version__ = "0.1.0"
