"""Map environment: scenarios, paths, rasterized observations and terminals."""

from drive_planner.environment.localization import check_terminal, localize
from drive_planner.environment.models import (
    CHANNELS,
    LocalizationResult,
    Observation,
    Path,
    PathConfig,
    RenderConfig,
    Scenario,
    TerminalConfig,
    TerminalState,
)
from drive_planner.environment.raster import (
    dump_observation,
    read_pgm,
    render_observation,
)
from drive_planner.environment.scenario import (
    build_path,
    enumerate_routes,
    load_scenario,
    load_scenario_bundle,
    load_scenarios,
    sample_path,
)
from drive_planner.environment.simulator import (
    DrivingSimulator,
    SimulatorSettings,
    StepResult,
)

__all__ = [
    "CHANNELS",
    "DrivingSimulator",
    "LocalizationResult",
    "Observation",
    "Path",
    "PathConfig",
    "RenderConfig",
    "Scenario",
    "SimulatorSettings",
    "StepResult",
    "TerminalConfig",
    "TerminalState",
    "build_path",
    "check_terminal",
    "dump_observation",
    "enumerate_routes",
    "load_scenario",
    "load_scenario_bundle",
    "load_scenarios",
    "localize",
    "read_pgm",
    "render_observation",
    "sample_path",
]
