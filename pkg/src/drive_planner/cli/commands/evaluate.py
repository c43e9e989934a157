"""eval: score a policy checkpoint on training and held-out scenarios."""

from pathlib import Path
from typing import Optional, Tuple

import click
from pydantic import ValidationError as PydanticValidationError

from drive_planner.cli.context import CliContext
from drive_planner.cli.formatters import ReportFormatter, console
from drive_planner.dynamics.actuation import ActuationSpec
from drive_planner.environment.scenario import load_scenarios
from drive_planner.evaluation.report import evaluate
from drive_planner.policy.checkpoint import load_checkpoint
from drive_planner.training.trainer import network_architecture
from drive_planner.utils.errors import MissingPrerequisiteError


def _actuation_override(ctx: CliContext, kind: str) -> ActuationSpec:
    document = ctx.config.actuation.model_dump()
    document["kind"] = kind
    if kind == "deep_response" and not document.get("response_checkpoint"):
        fitted = Path(ctx.config.output_dir) / "response" / "deep_response.dppf"
        if fitted.exists():
            document["response_checkpoint"] = str(fitted)
    try:
        return ActuationSpec.model_validate(document)
    except PydanticValidationError as e:
        raise MissingPrerequisiteError(
            "deep_response actuation needs a fitted response checkpoint",
            details={"missing": ["actuation.response_checkpoint"]},
        ) from e


@click.command("eval")
@click.option("--checkpoint", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--scenario", "scenarios", multiple=True, help="Scenario file (repeatable)"
)
@click.option(
    "--actuation",
    type=click.Choice(["instant", "low_pass", "deep_response", "plant"]),
    help="Evaluate under a different actuation model than the config's",
)
@click.option(
    "--episodes",
    type=click.IntRange(min=1),
    help="Override evaluation.episodes_per_scenario",
)
@click.pass_obj
def eval_command(
    ctx: CliContext,
    checkpoint: str,
    scenarios: Tuple[str, ...],
    actuation: Optional[str],
    episodes: Optional[int],
):
    """
    Roll out the greedy policy and report goal rate, tracking error,
    smoothness and speed compliance per scenario.

    Output: <out>/eval/eval_report.json, eval_report.csv and traces/.
    """
    if episodes is not None:
        ctx.override("evaluation", episodes_per_scenario=episodes)
    config = ctx.config
    sources = list(scenarios) or config.scenario_files + config.eval_scenario_files
    loaded = load_scenarios(sources)

    spec = _actuation_override(ctx, actuation) if actuation else config.actuation
    settings = config.simulator_settings(spec)
    params = load_checkpoint(
        checkpoint, expected=network_architecture(config.train, settings)
    ).params
    out = ctx.output_dir("eval")
    ctx.echo_config()

    with console.status(f"Evaluating on {len(loaded)} scenario(s)..."):
        report = evaluate(params, loaded, settings, config.evaluation)
    report.to_json(out / "eval_report.json")
    report.to_csv(out / "eval_report.csv")
    report.write_traces(out / "traces")
    console.print(ReportFormatter.format_eval_report(report))
    console.print(f"[green]✓ Report written to {out}[/green]")
