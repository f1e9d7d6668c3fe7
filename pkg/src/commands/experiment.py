# src/commands/experiment.py
from typing import Optional

import typer
from pydantic import ValidationError
from rich.table import Table

from src.commands.common import err_console, fail, read_text, write_or_echo
from src.engine.experiments import ExperimentConfig, run_experiment
from src.utils.errors import InvalidInputError, ModularGroupError


def experiment(
    config: str = typer.Option(..., "--config", help="Experiment config (JSON)."),
    out: Optional[str] = typer.Option(None, "--out", help="CSV report file instead of stdout."),
    emit_plot_data: Optional[str] = typer.Option(
        None, "--emit-plot-data", help="Also write (n, frequency, stderr) triples to this CSV file."
    ),
    threads: Optional[int] = typer.Option(None, "--threads", min=1, help="joblib workers."),
    progress: bool = typer.Option(False, "--progress", help="Progress bars on stderr."),
):
    """Seeded Monte Carlo experiment; the CSV depends only on the config."""
    try:
        try:
            cfg = ExperimentConfig.from_json(read_text(config))
        except ValidationError as e:
            raise InvalidInputError(f"invalid experiment config: {e.errors()[0]['msg']}") from None
        report = run_experiment(cfg, threads=threads, progress=progress)
    except ModularGroupError as e:
        fail(e)
    write_or_echo(report.to_csv(), out)
    if emit_plot_data:
        write_or_echo(report.plot_data(), emit_plot_data)

    table = Table(title=f"{cfg.experiment.value} ({report.wall_clock:.1f}s)")
    for col in ("sampler", "n", "statistic", "estimate", "stderr", "source"):
        table.add_column(col)
    for row in report.rows:
        est = row["estimate"]
        err = row["stderr"]
        table.add_row(
            row["sampler"],
            str(row["n"]),
            row["statistic"],
            f"{est:.4g}" if isinstance(est, float) else str(est),
            "" if err is None else f"{err:.2g}",
            row["source"] or "",
        )
    err_console.print(table)


def register(app: typer.Typer) -> None:
    app.command("experiment")(experiment)
