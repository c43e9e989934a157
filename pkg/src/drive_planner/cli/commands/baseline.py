"""baseline: average episode reward of the rule-based experts."""

import json
from typing import Optional, Tuple

import click

from drive_planner.cli.context import CliContext
from drive_planner.cli.formatters import console
from drive_planner.experts.baseline import baseline_reward


@click.command("baseline")
@click.option(
    "--episodes", type=click.IntRange(min=1), help="Override baseline_episodes"
)
@click.option(
    "--scenario", "scenarios", multiple=True, help="Scenario file (repeatable)"
)
@click.pass_obj
def baseline_command(
    ctx: CliContext, episodes: Optional[int], scenarios: Tuple[str, ...]
):
    """Drive Pure Pursuit + IDM and write <out>/baseline.json."""
    config = ctx.config
    loaded = ctx.training_scenarios(scenarios)
    n_episodes = episodes or config.baseline_episodes
    ctx.echo_config()

    with console.status(f"Running {n_episodes} expert episodes..."):
        result = baseline_reward(
            loaded,
            n_episodes,
            seed=config.seed,
            settings=config.simulator_settings(),
            expert=config.expert,
        )
    path = ctx.output_dir() / "baseline.json"
    path.write_text(
        json.dumps(result.model_dump(mode="json"), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    console.print(
        f"[bold]Expert baseline[/bold] over {result.n_episodes} episodes: "
        f"R_acc [cyan]{result.avg_r_acc:.3f}[/cyan], "
        f"R_sa [cyan]{result.avg_r_sa:.3f}[/cyan], "
        f"goal rate [cyan]{result.goal_rate:.1%}[/cyan]"
    )
    console.print(f"[green]✓ Written to {path}[/green]")
