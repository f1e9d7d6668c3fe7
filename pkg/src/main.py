import os
import sys
from typing import List, Optional

# DON'T CHANGE THIS !!!
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

import click
import typer

from src.commands import check, convert, experiment, oracle, sample, silhouette, stallings
from src.utils.log import setup_logging

app = typer.Typer(
    name="modgroup",
    help="Subgroups of the modular group: Stallings graphs, silhouettes, sampling and exact checks.",
    no_args_is_help=True,
    add_completion=False,
    pretty_exceptions_enable=False,
)

stallings.register(app)
silhouette.register(app)
check.register(app)
sample.register(app)
oracle.register(app)
experiment.register(app)
convert.register(app)


@app.callback()
def _setup(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Overrides MODGROUP_LOG_LEVEL."),
):
    setup_logging(log_level)


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; 0 success, 1 domain error, 2 usage error, 3 verification failure."""
    command = typer.main.get_command(app)
    try:
        result = command.main(args=argv, prog_name="modgroup", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        return 1
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
