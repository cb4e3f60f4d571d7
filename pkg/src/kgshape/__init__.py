"""Exact bound states of the 1+1 dimensional Klein-Gordon equation with
matched scalar and vector potentials, via shape invariance."""
from .models import (
    BoundState,
    Couplings,
    Family,
    Reason,
    ShapeData,
    SpectrumReport,
    enumerate_spectrum,
    solve_level,
)

__version__ = "0.1.0"

__all__ = [
    "BoundState",
    "Couplings",
    "Family",
    "Reason",
    "ShapeData",
    "SpectrumReport",
    "enumerate_spectrum",
    "solve_level",
]
