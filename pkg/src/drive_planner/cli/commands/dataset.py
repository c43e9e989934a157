"""gen-dataset: record the imitation dataset with the rule-based experts."""

from typing import Optional, Tuple

import click

from drive_planner.cli.context import CliContext
from drive_planner.cli.formatters import console
from drive_planner.experts.dataset import generate_il_dataset, save_il_dataset


@click.command("gen-dataset")
@click.option(
    "--episodes", type=click.IntRange(min=1), help="Override dataset.n_episodes"
)
@click.option(
    "--scenario", "scenarios", multiple=True, help="Scenario file (repeatable)"
)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@click.pass_obj
def gen_dataset(
    ctx: CliContext, episodes: Optional[int], scenarios: Tuple[str, ...], jobs: int
):
    """
    Drive Pure Pursuit + IDM experts and save (observation, command) rows.

    Output: <out>/dataset/manifest.json plus one binary block per episode.
    """
    if episodes is not None:
        ctx.override("dataset", n_episodes=episodes)
    config = ctx.config
    loaded = ctx.training_scenarios(scenarios)
    ctx.echo_config()

    with console.status(f"Recording {config.dataset.n_episodes} expert episodes..."):
        dataset = generate_il_dataset(
            loaded,
            config.dataset.n_episodes,
            settings=config.simulator_settings(),
            seed=config.seed,
            config=config.dataset,
            expert=config.expert,
            n_jobs=jobs,
        )
    manifest = save_il_dataset(dataset, ctx.output_dir("dataset"))
    console.print(
        f"[green]✓ {len(dataset)} rows from {len(dataset.episodes)} episodes "
        f"written to {manifest.parent}[/green]"
    )
