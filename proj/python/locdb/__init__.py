"""Location database performance models: queueing analysis, simulation,
T-tree index and the overlapping-coverage protocol."""

from ._locdb import (
    ConfigError,
    DuplicateKeyError,
    Error,
    KeyNotFoundError,
    ProtocolError,
    SaturationError,
    SimulationError,
    SystemParams,
    TTree,
    arrival_rates,
    load_config,
    pk_response_time,
    report,
    run_cli,
    simulate,
    workload_rates,
)

__all__ = [
    "ConfigError",
    "DuplicateKeyError",
    "Error",
    "KeyNotFoundError",
    "ProtocolError",
    "SaturationError",
    "SimulationError",
    "SystemParams",
    "TTree",
    "arrival_rates",
    "load_config",
    "pk_response_time",
    "report",
    "run_cli",
    "simulate",
    "workload_rates",
]
