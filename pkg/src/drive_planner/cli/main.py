"""
Command-line interface for the drive planner.

Every stage of an experiment is one subcommand sharing ``--config``,
``--seed`` and ``--out``. Exit codes: 0 success, 1 usage or validation
error, 2 runtime failure.
"""

import io
import sys
from typing import Optional, Sequence

import click

from drive_planner import __version__
from drive_planner.cli.commands.baseline import baseline_command
from drive_planner.cli.commands.dataset import gen_dataset
from drive_planner.cli.commands.evaluate import eval_command
from drive_planner.cli.commands.pretrain import pretrain_il
from drive_planner.cli.commands.response import fit_response
from drive_planner.cli.commands.scenario import scenario_check
from drive_planner.cli.commands.train import train_command
from drive_planner.cli.context import CliContext, set_verbose
from drive_planner.cli.error_recovery import from_planner_error, internal_error
from drive_planner.cli.formatters import ErrorFormatter
from drive_planner.utils.errors import PlannerError
from drive_planner.utils.logger import get_logger

# Handle internal encoding for Windows consoles
if sys.platform == "win32":
    try:
        if hasattr(sys.stdout, "reconfigure"):
            sys.stdout.reconfigure(encoding="utf-8")
        if hasattr(sys.stderr, "reconfigure"):
            sys.stderr.reconfigure(encoding="utf-8")
    except (AttributeError, io.UnsupportedOperation):
        pass

logger = get_logger(__name__)


@click.group()
@click.version_option(version=__version__)
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    help="Run configuration (YAML)",
)
@click.option("--seed", type=click.IntRange(min=0), help="Override the run seed")
@click.option("--out", type=click.Path(file_okay=False), help="Override output_dir")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.pass_context
def cli(
    ctx: click.Context,
    config_path: Optional[str],
    seed: Optional[int],
    out: Optional[str],
    verbose: bool,
):
    """Desk-scale driving planner: scenarios, experts, imitation and D-A3C."""
    if verbose:
        set_verbose()
    ctx.obj = CliContext(config_path=config_path, seed=seed, out=out, verbose=verbose)


cli.add_command(scenario_check)
cli.add_command(fit_response)
cli.add_command(gen_dataset)
cli.add_command(pretrain_il)
cli.add_command(train_command)
cli.add_command(eval_command)
cli.add_command(baseline_command)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Invoke the CLI and return its exit code instead of exiting."""
    try:
        cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except PlannerError as e:
        logger.debug("Command failed: %s", e.to_response().model_dump_json())
        recoverable = from_planner_error(e)
        ErrorFormatter.format_recoverable_error(recoverable)
        return recoverable.exit_code
    except Exception as e:  # noqa: BLE001
        logger.exception("Unhandled error")
        recoverable = internal_error(e)
        ErrorFormatter.format_recoverable_error(recoverable)
        return recoverable.exit_code
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
