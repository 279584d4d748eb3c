"""Sparkling Squid Algorithm, PSO/GA baselines, benchmark functions and a trial harness."""
from .baselines import GaParams, PsoParams, ga_minimize, pso_minimize
from .benchmarks import REGISTRY, registry_lookup
from .core import (
    DimensionError,
    NonFiniteObjectiveError,
    Objective,
    ParameterError,
    RngStream,
    SearchSpace,
    Squid,
    TraceRecord,
    clamp,
    sample_arcsine,
    uniform_point,
)
from .harness import ExperimentConfig, TrialStats, aggregate_summary, export_results, export_trace, run_experiment
from .ssa import OptResult, SsaParams, SwarmPartition, ssa_minimize

__version__ = "0.1.0"
