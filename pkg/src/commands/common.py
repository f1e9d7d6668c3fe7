# src/commands/common.py
import sys
from pathlib import Path
from typing import Any, NoReturn, Optional

import orjson
import typer
from rich.console import Console

from src.models.graph import ModularGraph
from src.utils.errors import ModularGroupError, VerificationError
from src.utils.graph_io import parse_graph

# stdout carries the product; everything for humans goes to stderr
err_console = Console(stderr=True)

EXIT_DOMAIN = 1
EXIT_VERIFICATION = 3


def emit_json(obj: Any) -> None:
    typer.echo(orjson.dumps(obj).decode())


def fail(err: ModularGroupError) -> NoReturn:
    """Report a domain error on stderr and leave with its exit status."""
    typer.echo(orjson.dumps(err.to_dict()).decode(), err=True)
    raise typer.Exit(EXIT_VERIFICATION if isinstance(err, VerificationError) else EXIT_DOMAIN)


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise typer.BadParameter(f"cannot read {path}: {e.strerror}")


def load_graph(path: str) -> ModularGraph:
    """JSON or DOT graph from a file path (``-`` for stdin)."""
    return parse_graph(read_text(path))


def write_or_echo(text: str, out: Optional[str]) -> None:
    if out is None:
        typer.echo(text, nl=not text.endswith("\n"))
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(text, encoding="utf-8")
