"""Simulation and analysis of a non-Markovian photonic dephasing process.

A polarization qubit dephases in a delay line and recoheres in a birefringent
fiber; the package computes the resulting trace-distance dynamics, the
information-backflow measure and the photon-counting measurement chain.
"""
from .dynamics import apply_map, integrate_master_equation, trace_distance_trajectory
from .errors import (
    BreakpointError,
    ConfigError,
    DomainError,
    FitError,
    InputError,
    InvariantError,
    StepSizeError,
    TomographyError,
)
from .measure import MeasureResult, blp_measure, delta_D, increase_intervals
from .process import ExperimentParams, ProcessModel, Spectrum, kappa_quadrature
from .qubit import DensityMatrix, PolarizationAngle, pure_state, purity, trace_distance

__version__ = "0.1.0"

__all__ = [
    "BreakpointError",
    "ConfigError",
    "DensityMatrix",
    "DomainError",
    "ExperimentParams",
    "FitError",
    "InputError",
    "InvariantError",
    "MeasureResult",
    "PolarizationAngle",
    "ProcessModel",
    "Spectrum",
    "StepSizeError",
    "TomographyError",
    "apply_map",
    "blp_measure",
    "delta_D",
    "increase_intervals",
    "integrate_master_equation",
    "kappa_quadrature",
    "pure_state",
    "purity",
    "trace_distance",
    "trace_distance_trajectory",
]
