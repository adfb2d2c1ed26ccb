"""Dynamical coarse-graining master equations for small open quantum systems."""
from .baths import BosonicBath, CorrelationIndex, FermionLeads, TwoSpinBath, hurwitz_zeta
from .engine import (
    GrainedGenerator,
    QuadratureConfig,
    SystemSpec,
    bms_liouvillian,
    build_generator,
    compute_T,
    dcg_propagate,
    extract_L,
)
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    FormatError,
    MalformedGenerator,
    NumericalFailure,
    UnsupportedError,
)

__all__ = [
    "BosonicBath",
    "ConfigError",
    "CorrelationIndex",
    "DimensionError",
    "DomainError",
    "FermionLeads",
    "FormatError",
    "GrainedGenerator",
    "MalformedGenerator",
    "NumericalFailure",
    "QuadratureConfig",
    "SystemSpec",
    "TwoSpinBath",
    "UnsupportedError",
    "bms_liouvillian",
    "build_generator",
    "compute_T",
    "dcg_propagate",
    "extract_L",
    "hurwitz_zeta",
]
