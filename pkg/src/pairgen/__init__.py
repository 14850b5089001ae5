"""Photon-pair generation in dissipatively coupled Kerr waveguides.

Modules
-------
fock        truncated Fock-space operators and states
lindblad    master-equation integration
analytic    closed-form weak-pump results
design      platform design rules
scenarios   physical configurations as Lindblad models
cli         command-line harness
"""
from .analytic import PairGenParams
from .fock import FockOperator, QuantumState
from .lindblad import LindbladModel, TimeSeries, evolve
from .scenarios import ScenarioConfig, run_and_compare

__version__ = "0.1.0"

__all__ = ["PairGenParams", "FockOperator", "QuantumState", "LindbladModel", "TimeSeries",
           "evolve", "ScenarioConfig", "run_and_compare", "__version__"]
