# src/commands/convert.py
from enum import Enum
from typing import Optional

import typer

from src.commands.common import fail, load_graph, write_or_echo
from src.utils.errors import ModularGroupError
from src.utils.graph_io import encode_str, to_dot


class GraphFormat(str, Enum):
    JSON = "json"
    DOT = "dot"


def convert(
    in_path: str = typer.Option(..., "--in", help="Graph file (JSON or DOT), - for stdin."),
    to: GraphFormat = typer.Option(..., "--to", help="Target format."),
    out: Optional[str] = typer.Option(None, "--out", help="Write to this file instead of stdout."),
):
    """Translate a graph between canonical JSON and DOT."""
    try:
        g = load_graph(in_path)
    except ModularGroupError as e:
        fail(e)
    text = to_dot(g) if to is GraphFormat.DOT else encode_str(g) + "\n"
    write_or_echo(text, out)


def register(app: typer.Typer) -> None:
    app.command("convert")(convert)
