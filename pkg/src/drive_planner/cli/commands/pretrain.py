"""pretrain-il: behaviour-clone the experts into the policy network."""

import csv
from pathlib import Path
from typing import Optional

import click

from drive_planner.cli.context import CliContext
from drive_planner.cli.formatters import ReportFormatter, console
from drive_planner.experts.dataset import load_il_dataset
from drive_planner.policy.checkpoint import save_checkpoint
from drive_planner.training.imitation import ILEpoch, il_pretrain

IL_CURVE_HEADER = tuple(ILEpoch.model_fields)


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.9g}"


def write_il_curve(path: Path, curve) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(IL_CURVE_HEADER)
        for record in curve:
            writer.writerow(
                [record.epoch] + [_fmt(getattr(record, k)) for k in IL_CURVE_HEADER[1:]]
            )
    return path


@click.command("pretrain-il")
@click.option(
    "--dataset",
    "dataset_dir",
    type=click.Path(file_okay=False),
    help="Dataset directory (default: <out>/dataset)",
)
@click.option("--epochs", type=click.IntRange(min=1), help="Override imitation.epochs")
@click.pass_obj
def pretrain_il(ctx: CliContext, dataset_dir: Optional[str], epochs: Optional[int]):
    """
    Fit the mean heads to the expert commands by MSE regression.

    Output: <out>/il/policy_il.dppf and <out>/il/il_curve.csv.
    """
    if epochs is not None:
        ctx.override("imitation", epochs=epochs)
    config = ctx.config
    dataset = load_il_dataset(dataset_dir or ctx.output_dir("dataset"))
    ctx.echo_config()

    with console.status(f"Pretraining on {len(dataset)} rows..."):
        result = il_pretrain(dataset, config.imitation, network=config.train.network)

    out = ctx.output_dir("il")
    checkpoint = save_checkpoint(
        out / "policy_il.dppf",
        result.params,
        metadata={
            "stage": "il",
            "seed": config.seed,
            "rows": len(dataset),
            "epochs": config.imitation.epochs,
        },
    )
    write_il_curve(out / "il_curve.csv", result.curve)
    console.print(ReportFormatter.format_il_curve(result.curve[-10:]))
    console.print(f"[green]✓ IL checkpoint written to {checkpoint}[/green]")
