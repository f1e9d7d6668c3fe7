# src/commands/stallings.py
from typing import Optional

import typer

from src.commands.common import emit_json, fail, write_or_echo
from src.engine.stallings import stallings_from_generators
from src.models.word import Word
from src.utils.config import get_settings
from src.utils.errors import ModularGroupError
from src.utils.graph_io import encode_str, to_dot


def stallings(
    gens: str = typer.Option(..., "--gens", help='Comma-separated generator words, e.g. "abaB,babab".'),
    dot: bool = typer.Option(False, "--dot/--json", help="Emit DOT instead of canonical JSON."),
    out: Optional[str] = typer.Option(None, "--out", help="Write to this file instead of stdout."),
):
    """Stallings graph of the subgroup generated by GENS, root labeled 1."""
    try:
        words = Word.parse_list(gens)
        g = stallings_from_generators(words, debug=get_settings().debug)
    except ModularGroupError as e:
        fail(e)
    if dot:
        write_or_echo(to_dot(g, "Stallings"), out)
    elif out is not None:
        write_or_echo(encode_str(g) + "\n", out)
    else:
        emit_json(g.to_dict())


def register(app: typer.Typer) -> None:
    app.command("stallings")(stallings)
