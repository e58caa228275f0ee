"""Friction stir welding thermal simulator."""

from ._core import (
    ConfigError,
    InvalidArgument,
    RunConfig,
    SimulationError,
    ToolGeometry,
    calibrate,
    heat_fractions,
    load_config,
    parse_config,
    power_from_torque,
    run_cli,
    serialize_config,
    simulate,
    total_heat,
    total_heat_mixed,
    total_heat_sliding,
    total_heat_sticking,
    trace_flow,
)

__all__ = [
    "ConfigError",
    "InvalidArgument",
    "RunConfig",
    "SimulationError",
    "ToolGeometry",
    "calibrate",
    "heat_fractions",
    "load_config",
    "parse_config",
    "power_from_torque",
    "run_cli",
    "serialize_config",
    "simulate",
    "total_heat",
    "total_heat_mixed",
    "total_heat_sliding",
    "total_heat_sticking",
    "trace_flow",
]
