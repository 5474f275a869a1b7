"""Cycle-level simulator of an RV32 microcontroller core with swappable
interrupt architectures, plus the benchmark harness that measures them."""

from .config import SimConfig, Timing
from .memory import BusFault, ConfigError
from .sim import Simulator
from .trace import TraceEvent, Tracer
from .scenario import (
    Scenario,
    builtin_scenarios,
    find_builtin,
    load_scenario,
    parse_scenario,
    run_scenario,
)
from .analyze import Measurement, measure
from .sweep import Criterion, SweepOutcome, run_sweep

__version__ = "0.1.0"

__all__ = [
    "BusFault",
    "ConfigError",
    "SimConfig",
    "Timing",
    "Simulator",
    "TraceEvent",
    "Tracer",
    "Scenario",
    "builtin_scenarios",
    "find_builtin",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
    "Measurement",
    "measure",
    "Criterion",
    "SweepOutcome",
    "run_sweep",
    "__version__",
]
