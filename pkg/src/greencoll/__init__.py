"""Energy profiling of collection implementations and substitution advice.

Measure the per-method energy of Set, List, and Map implementations under a
fixed workload protocol, persist the results as energy-profile tables, and
recommend the least-energy implementation for a program's collection usage.
"""

__version__ = "0.1.0"

from .adapters import ImplDescriptor, InterfaceKind, MethodId, construct, registry
from .advisor import (
    Recommendation,
    UsageProfile,
    UsageSite,
    improvement,
    nearest_popsize,
    parse_usage,
    recommend,
    total_energy,
)
from .meter import EnergyDelta, EnergySample, MeterConfig, delta, open_meter
from .profile import ProfileTable, emit_report, load, rank_row, save
from .runner import MeasurementRecord, RunConfig, run_cell, run_suite, trimmed_mean
from .workloads import Corpus, WorkloadSpec, build_corpus, execute_workload, workload_for

__all__ = [
    "Corpus",
    "EnergyDelta",
    "EnergySample",
    "ImplDescriptor",
    "InterfaceKind",
    "MeasurementRecord",
    "MeterConfig",
    "MethodId",
    "ProfileTable",
    "Recommendation",
    "RunConfig",
    "UsageProfile",
    "UsageSite",
    "WorkloadSpec",
    "__version__",
    "build_corpus",
    "construct",
    "delta",
    "emit_report",
    "execute_workload",
    "improvement",
    "load",
    "nearest_popsize",
    "open_meter",
    "parse_usage",
    "rank_row",
    "recommend",
    "registry",
    "run_cell",
    "run_suite",
    "save",
    "total_energy",
    "trimmed_mean",
    "workload_for",
]
