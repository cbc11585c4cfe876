"""Eigenvalues of small complex matrices by randomized shifted inverse iteration."""

from .driver import (
    EigenReport,
    ParameterLedger,
    SolverConfig,
    compute_parameters,
    forward_eig,
    preprocess,
    required_precision,
    shattering_parameters,
    small_eig,
    solve,
)
from .globaldata import GlobalData
from .matrix import RngStream

__version__ = "0.1.0"

__all__ = [
    "EigenReport",
    "GlobalData",
    "ParameterLedger",
    "RngStream",
    "SolverConfig",
    "compute_parameters",
    "forward_eig",
    "preprocess",
    "required_precision",
    "shattering_parameters",
    "small_eig",
    "solve",
]
