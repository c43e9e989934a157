"""scenario-check: validate scenario files and summarize their routes."""

from typing import Optional, Tuple

import click
import numpy as np

from drive_planner.cli.context import CliContext
from drive_planner.cli.formatters import ReportFormatter, console
from drive_planner.dynamics.models import VehicleState
from drive_planner.environment.raster import dump_observation, render_observation
from drive_planner.environment.scenario import (
    build_path,
    enumerate_routes,
    load_scenarios,
    route_length,
)
from drive_planner.utils.logger import get_logger

logger = get_logger(__name__)


@click.command("scenario-check")
@click.argument("files", nargs=-1, type=click.Path(dir_okay=False))
@click.option(
    "--dump-dir",
    type=click.Path(file_okay=False),
    help="Write the start-of-route observation of each scenario as PGM files",
)
@click.pass_obj
def scenario_check(ctx: CliContext, files: Tuple[str, ...], dump_dir: Optional[str]):
    """
    Validate scenario files and print lanes, routes and speed limits.

    Examples:
        drive-planner scenario-check config/scenarios/desk_scale.json
        drive-planner --config config/desk_scale.yaml scenario-check --dump-dir obs/
    """
    config = ctx.config
    sources = list(files) or config.scenario_files + config.eval_scenario_files
    scenarios = load_scenarios(sources)
    routes = {}
    for scenario in scenarios:
        found = enumerate_routes(scenario, config.path.min_path_length)
        routes[scenario.scenario_id] = [(r, route_length(scenario, r)) for r in found]
        if not found:
            console.print(
                f"[yellow]⚠ {scenario.scenario_id}: no route of at least "
                f"{config.path.min_path_length:g} m[/yellow]"
            )
    console.print(ReportFormatter.format_scenarios(scenarios, routes))

    if dump_dir:
        for scenario in scenarios:
            if not routes[scenario.scenario_id]:
                continue
            route = routes[scenario.scenario_id][0][0]
            path = build_path(scenario, route, config.path.spacing)
            start = path.waypoints[0]
            state = VehicleState(
                x=float(start[0]), y=float(start[1]), heading=float(start[2]), speed=0.0
            )
            obs = render_observation(
                scenario,
                path,
                state,
                config=config.render,
                wheelbase=config.vehicle.wheelbase,
            )
            written = dump_observation(obs, dump_dir, scenario.scenario_id)
            logger.debug(f"Dumped {len(written)} files for {scenario.scenario_id}")
        console.print(f"[green]✓ Observations written to {dump_dir}[/green]")
    console.print(
        f"[green]✓ {len(scenarios)} scenario(s) valid, "
        f"{int(np.sum([len(r) for r in routes.values()]))} admissible route(s)[/green]"
    )
