# src/commands/oracle.py
import csv
import io
from enum import Enum
from typing import Any, Dict, List, Optional

import typer
from rich.table import Table

from src.commands.common import err_console, fail, write_or_echo
from src.engine.oracle import ExhaustiveOracle
from src.utils.config import get_settings
from src.utils.errors import ModularGroupError


class VerifyTarget(str, Enum):
    COUNTS = "counts"
    PREIMAGES = "preimages"
    UNIFORMITY = "uniformity"


def rows_to_csv(rows: List[Dict[str, Any]]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return buf.getvalue()


def _summary(title: str, rows: List[Dict[str, Any]]) -> None:
    table = Table(title=title)
    for col in rows[0]:
        table.add_column(col)
    for row in rows[:40]:
        table.add_row(*("" if v is None else str(v) for v in row.values()))
    if len(rows) > 40:
        table.caption = f"{len(rows) - 40} more row(s) in the CSV"
    err_console.print(table)


def oracle(
    verify: VerifyTarget = typer.Option(..., "--verify", help="Which exact statement to check."),
    n: int = typer.Option(..., "--n", min=1, help="Size (largest size for counts and preimages)."),
    threads: Optional[int] = typer.Option(None, "--threads", min=1, help="joblib workers."),
    full_max: int = typer.Option(7, "--full-max", min=1, help="Largest n enumerated graph by graph in counts."),
    progress: bool = typer.Option(False, "--progress", help="Progress bars on stderr."),
    quiet: bool = typer.Option(False, "--quiet", help="No summary table on stderr."),
    out: Optional[str] = typer.Option(None, "--out", help="CSV file instead of stdout."),
):
    """Exhaustive verification; exit status 0 only when every check holds exactly."""
    settings = get_settings()
    engine = ExhaustiveOracle(threads=threads, progress=progress, debug=settings.debug)
    try:
        if verify is VerifyTarget.COUNTS:
            rows = engine.verify_counts(n, full_max=full_max)
        elif verify is VerifyTarget.PREIMAGES:
            rows = engine.verify_preimages(n)
        else:
            rows = engine.verify_uniformity(n).to_rows()
    except ModularGroupError as e:
        fail(e)
    write_or_echo(rows_to_csv(rows), out)
    if rows and not quiet:
        _summary(f"oracle --verify {verify.value} --n {n}: all checks passed", rows)


def register(app: typer.Typer) -> None:
    app.command("oracle")(oracle)
