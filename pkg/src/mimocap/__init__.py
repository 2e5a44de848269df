"""Throughput capacity of MIMO ad-hoc networks with MMSE receivers.

Closed-form Gamma-model analysis and a counter-seeded Monte Carlo
simulator, plus a command-line front end (``mimocap``).
"""

from . import analysis, capacity, detectors, geometry, montecarlo, randmat, seeding
from ._backend import name as backend
from .errors import (
    ApproximationBreakdown,
    BoundaryOptimumWarning,
    InvalidParameter,
    MimocapError,
    MultipleMaximaWarning,
    NumericFailure,
    UnsupportedCombination,
    UnsupportedMoment,
)
from .geometry import Scenario

__version__ = "0.1.0"

__all__ = [
    "analysis", "capacity", "detectors", "geometry", "montecarlo", "randmat", "seeding",
    "backend", "Scenario", "__version__",
    "MimocapError", "InvalidParameter", "UnsupportedMoment", "NumericFailure",
    "ApproximationBreakdown", "UnsupportedCombination",
    "BoundaryOptimumWarning", "MultipleMaximaWarning",
]
