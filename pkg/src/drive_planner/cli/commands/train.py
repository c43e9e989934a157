"""train: run D-A3C from random or imitation-pretrained weights."""

from typing import Optional, Tuple

import click

from drive_planner.cli.context import CliContext
from drive_planner.cli.formatters import ProgressFormatter, ReportFormatter, console
from drive_planner.experts.dataset import load_il_dataset
from drive_planner.policy.checkpoint import load_checkpoint
from drive_planner.training.trainer import CURVES_NAME, network_architecture, train


@click.command("train")
@click.option(
    "--mode",
    type=click.Choice(["pure_rl", "il_then_rl"]),
    default="pure_rl",
    show_default=True,
)
@click.option(
    "--episodes", type=click.IntRange(min=0), help="Override train.max_episodes"
)
@click.option(
    "--scenario", "scenarios", multiple=True, help="Scenario file (repeatable)"
)
@click.option(
    "--dataset",
    "dataset_dir",
    type=click.Path(file_okay=False),
    help="IL dataset to pretrain on (il_then_rl)",
)
@click.option(
    "--init-checkpoint",
    type=click.Path(dir_okay=False),
    help="Start from these weights (e.g. <out>/il/policy_il.dppf)",
)
@click.option(
    "--resume",
    type=click.Path(dir_okay=False),
    help="Continue a run from one of its round checkpoints",
)
@click.pass_obj
def train_command(
    ctx: CliContext,
    mode: str,
    episodes: Optional[int],
    scenarios: Tuple[str, ...],
    dataset_dir: Optional[str],
    init_checkpoint: Optional[str],
    resume: Optional[str],
):
    """
    Train the planner with D-A3C.

    Examples:
        drive-planner --config config/desk_scale.yaml train --episodes 400
        drive-planner train --mode il_then_rl --init-checkpoint runs/default/il/policy_il.dppf
    """
    if episodes is not None:
        ctx.override("train", max_episodes=episodes)
    config = ctx.config
    loaded = ctx.training_scenarios(scenarios)
    settings = config.simulator_settings()

    initial_params = None
    if init_checkpoint:
        architecture = network_architecture(config.train, settings)
        initial_params = load_checkpoint(init_checkpoint, expected=architecture).params
    il_dataset = load_il_dataset(dataset_dir) if dataset_dir else None
    out = ctx.output_dir("train")
    ctx.echo_config()

    total = config.train.max_episodes
    with ProgressFormatter.create_episode_progress() as progress:
        task = progress.add_task(f"Training ({mode})", total=total)
        result = train(
            mode,  # type: ignore[arg-type]
            loaded,
            config=config.train,
            settings=settings,
            initial_params=initial_params,
            il_dataset=il_dataset,
            il_config=config.imitation,
            out_dir=out,
            resume_from=resume,
            on_episode=lambda stats: progress.advance(task),
        )

    if result.curves.rows:
        console.print(ReportFormatter.format_curves(result.curves))
    if result.discarded:
        console.print(f"[yellow]⚠ {result.discarded} episode(s) discarded[/yellow]")
    console.print(
        f"[green]✓ {len(result.episodes)} episodes, final version "
        f"{result.store.version}; curves in {out / CURVES_NAME}[/green]"
    )
