"""fit-response: fit the deep_response surrogate on reference-plant logs."""

import csv
import json
from typing import Dict, Optional

import click

from drive_planner.cli.context import CliContext
from drive_planner.cli.formatters import ReportFormatter, console
from drive_planner.dynamics.analysis import rise_time, step_response_table
from drive_planner.dynamics.models import ACC_LIMIT, STEER_LIMIT
from drive_planner.dynamics.plant import generate_response_log, make_command_schedule
from drive_planner.dynamics.response_net import train_deep_response
from drive_planner.utils.seeding import make_rng

RESPONSE_STREAM = 6
SERIES = ("target", "low_pass", "deep_response", "plant")


@click.command("fit-response")
@click.option(
    "--epochs", type=click.IntRange(min=0), help="Override response.hyper.epochs"
)
@click.pass_obj
def fit_response(ctx: CliContext, epochs: Optional[int]):
    """
    Log the reference plant, fit deep_response and write the step-response
    comparison (target, low-pass, deep_response, plant) per channel.
    """
    if epochs is not None:
        hyper = ctx.config.response.hyper.model_copy(update={"epochs": epochs})
        ctx.override("response", hyper=hyper)
    config = ctx.config
    response = config.response
    ctx.echo_config()
    out = ctx.output_dir("response")

    rng = make_rng(config.seed, RESPONSE_STREAM)
    schedule = make_command_schedule(
        response.log_rows, rng, response.amplitude_fraction
    )
    log = generate_response_log(response.plant, schedule, rng)
    log.to_csv(out / "response_log.csv")

    with console.status("Fitting deep_response..."):
        net, report = train_deep_response(log, response.hyper)
    net.save(out / "deep_response.dppf")
    (out / "fit_report.json").write_text(
        json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )

    rise_times: Dict[str, float] = {}
    for channel, limit in (("acc", ACC_LIMIT), ("steer", STEER_LIMIT)):
        table = step_response_table(
            channel=channel,
            amplitude=response.amplitude_fraction * limit,
            alpha=config.actuation.alpha,
            response_net=net,
            plant_config=response.plant,
            speed=response.step_speed,
        )
        csv_path = out / f"step_response_{channel}.csv"
        with csv_path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(("t",) + SERIES)
            for k in range(len(table["t"])):
                values = [f"{table[name][k]:.9g}" for name in SERIES]
                writer.writerow([f"{table['t'][k]:.1f}"] + values)
        if channel == "steer":
            for name in ("low_pass", "deep_response", "plant"):
                shifted = table["t"] - 1.0
                mask = shifted >= 0.0
                rise_times[name] = rise_time(shifted[mask], table[name][mask])

    console.print(ReportFormatter.format_fit_report(report, rise_times))
    checkpoint = out / "deep_response.dppf"
    console.print(f"[green]✓ deep_response checkpoint: {checkpoint}[/green]")
