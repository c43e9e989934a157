"""Rich formatters for CLI output."""

from typing import TYPE_CHECKING, Any, Dict, List, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)
from rich.table import Table

if TYPE_CHECKING:
    from drive_planner.cli.error_recovery import RecoverableError
    from drive_planner.dynamics.response_net import FitReport
    from drive_planner.environment.models import Scenario
    from drive_planner.evaluation.report import EvalReport
    from drive_planner.training.imitation import ILEpoch
    from drive_planner.training.models import TrainCurves

console = Console()


class ProgressFormatter:
    """Progress indicators for long-running operations."""

    @staticmethod
    def create_episode_progress() -> Progress:
        """Bar for episode loops (training, dataset capture, baselines)."""
        return Progress(
            SpinnerColumn(),
            TextColumn("[bold blue]{task.description}[/bold blue]"),
            BarColumn(),
            MofNCompleteColumn(),
            TextColumn("•"),
            TimeElapsedColumn(),
            console=console,
        )



class ReportFormatter:
    """Tables for scenarios, fits, curves and evaluation reports."""

    @staticmethod
    def format_scenarios(
        scenarios: Sequence["Scenario"], routes: Dict[str, List[Any]]
    ) -> Table:
        table = Table(
            title="[bold]Scenarios[/bold]",
            show_header=True,
            header_style="bold cyan",
            border_style="cyan",
        )
        table.add_column("Scenario", style="cyan", no_wrap=True)
        table.add_column("Lanes", justify="right")
        table.add_column("Routes", justify="right")
        table.add_column("Longest route (m)", justify="right")
        table.add_column("Speed limits (m/s)", justify="center")
        for scenario in scenarios:
            lanes = [scenario.lane(lane_id) for lane_id in scenario.lane_ids]
            limits = sorted({lane.speed_limit for lane in lanes})
            lengths = [length for _, length in routes.get(scenario.scenario_id, [])]
            table.add_row(
                scenario.scenario_id,
                str(len(lanes)),
                str(len(lengths)),
                f"{max(lengths):.1f}" if lengths else "-",
                ", ".join(f"{v:g}" for v in limits),
            )
        return table

    @staticmethod
    def format_fit_report(report: "FitReport", rise_times: Dict[str, float]) -> Table:
        table = Table(title="[bold]deep_response fit[/bold]", header_style="bold cyan")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        table.add_row(
            "rows (train / holdout)", f"{report.train_rows} / {report.holdout_rows}"
        )
        table.add_row("epochs", str(report.epochs))
        if report.refined_loss is not None:
            table.add_row(
                "L-BFGS refinement",
                f"{report.refine_iters} iters, loss {report.refined_loss:.3e}",
            )
        table.add_row("holdout RMSE acc", f"{report.holdout_rmse_acc:.5f}")
        table.add_row("holdout RMSE steer", f"{report.holdout_rmse_steer:.5f}")
        for name, value in rise_times.items():
            table.add_row(f"rise time {name} (s)", f"{value:.3f}")
        return table

    @staticmethod
    def format_il_curve(curve: Sequence["ILEpoch"]) -> Table:
        table = Table(
            title="[bold]Imitation pretraining[/bold]", header_style="bold cyan"
        )
        table.add_column("Epoch", justify="right")
        table.add_column("Train loss", justify="right")
        table.add_column("Holdout loss", justify="right")
        table.add_column("RMSE sa (rad)", justify="right")
        for record in curve:
            table.add_row(
                str(record.epoch),
                f"{record.train_loss:.6f}",
                "-" if record.holdout_loss is None else f"{record.holdout_loss:.6f}",
                (
                    "-"
                    if record.holdout_rmse_sa is None
                    else f"{record.holdout_rmse_sa:.4f}"
                ),
            )
        return table

    @staticmethod
    def format_curves(curves: "TrainCurves") -> Table:
        table = Table(
            title=f"[bold]Training curves ({curves.window}-episode windows)[/bold]",
            header_style="bold cyan",
        )
        table.add_column("Episode", justify="right")
        table.add_column("Success", justify="right")
        table.add_column("R_acc", justify="right")
        table.add_column("R_sa", justify="right")
        table.add_column("Version", justify="right")
        for row in curves.rows:
            color = "green" if row.window_success >= 0.9 else "yellow"
            table.add_row(
                str(row.episode),
                f"[{color}]{row.window_success:.1%}[/{color}]",
                f"{row.avg_r_acc:.3f}",
                f"{row.avg_r_sa:.3f}",
                str(row.version),
            )
        return table

    @staticmethod
    def format_eval_report(report: "EvalReport") -> Table:
        table = Table(
            title=f"[bold]Evaluation ({report.actuation} actuation)[/bold]",
            header_style="bold cyan",
            border_style="cyan",
        )
        table.add_column("Scenario", style="cyan", no_wrap=True)
        table.add_column("Episodes", justify="right")
        table.add_column("Goal", justify="right")
        table.add_column("OffRoad", justify="right")
        table.add_column("TimeOver", justify="right")
        table.add_column("mean |d| (m)", justify="right")
        table.add_column("mean |Δacc|", justify="right")
        table.add_column("Speed compliance", justify="right")
        table.add_column("Δacc > δ", justify="right")
        for s in report.scenarios:
            table.add_row(
                s.scenario_id,
                str(s.episodes),
                str(s.goal_reached),
                str(s.off_road),
                str(s.time_over),
                f"{s.mean_abs_d:.3f}",
                f"{s.mean_abs_delta_acc:.3f}",
                f"{s.speed_compliance:.1%}",
                f"{s.delta_acc_exceeded:.1%}",
            )
        return table


class ErrorFormatter:
    """Format errors with helpful context and suggestions."""

    @staticmethod
    def format_recoverable_error(error: "RecoverableError") -> None:
        """Display a RecoverableError with its recovery actions."""
        from drive_planner.cli.error_recovery import ErrorSeverity

        severity_colors = {
            ErrorSeverity.ERROR: "red",
            ErrorSeverity.FATAL: "bold red",
        }
        severity_icons = {
            ErrorSeverity.ERROR: "❌",
            ErrorSeverity.FATAL: "🔥",
        }

        color = severity_colors.get(error.severity, "red")
        icon = severity_icons.get(error.severity, "❌")

        error_panel = Panel(
            f"[{color}]{error.message}[/{color}]",
            title=(
                f"[bold {color}]{icon} "
                f"{error.error_type.replace('_', ' ').title()}[/bold {color}]"
            ),
            border_style=color,
        )
        console.print()
        console.print(error_panel)

        if error.context:
            console.print("\n[bold]Context:[/bold]")
            for key, value in error.context.items():
                if value is not None:
                    console.print(f"  • {key}: [cyan]{value}[/cyan]")

        if error.recovery_actions:
            console.print("\n[bold yellow]💡 Recovery Actions:[/bold yellow]")
            for i, action in enumerate(error.recovery_actions, 1):
                console.print(f"  {i}. {action}")

        console.print()
