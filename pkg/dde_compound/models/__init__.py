"""Data models for the compound DDE toolkit."""

from .coefficient import DdeSystem, PeriodicCoefficient, SignClass, infer_sign_class
from .experiment import CoefficientSpec, ExperimentConfig, Subcommand
from .grid import (
    Grid,
    Segment,
    SimplexIndex,
    Trajectory,
    WedgeGrid,
    permutation_sign,
    simplex_rank,
    simplex_size,
    simplex_table,
)
from .reports import (
    CertReport,
    ConeReport,
    CvDecomposition,
    HomotopyReport,
    LapRecord,
    LapReport,
    RatioReport,
    RunRecord,
)
from .spectrum import ComplexSpectrum, MonodromyMatrix

__all__ = [
    "CertReport",
    "CoefficientSpec",
    "ComplexSpectrum",
    "ConeReport",
    "CvDecomposition",
    "DdeSystem",
    "ExperimentConfig",
    "Grid",
    "HomotopyReport",
    "LapRecord",
    "LapReport",
    "MonodromyMatrix",
    "PeriodicCoefficient",
    "RatioReport",
    "RunRecord",
    "Segment",
    "SignClass",
    "SimplexIndex",
    "Subcommand",
    "Trajectory",
    "WedgeGrid",
    "infer_sign_class",
    "permutation_sign",
    "simplex_rank",
    "simplex_size",
    "simplex_table",
]
