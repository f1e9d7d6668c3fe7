# src/commands/silhouette.py
import random
from typing import List, Optional

import orjson
import typer

from src.commands.common import emit_json, fail, load_graph, write_or_echo
from src.engine.silhouette import quasi_silhouette, rewrite_randomly, silhouette as silhouette_of
from src.models.graph import relabel_normalize
from src.models.moves import MoveRecord
from src.utils.config import get_settings
from src.utils.errors import ModularGroupError
from src.utils.seeds import split_seed


def silhouette(
    in_path: str = typer.Option(..., "--in", help="Graph file (JSON or DOT), - for stdin."),
    trace: bool = typer.Option(False, "--trace", help="Emit the applied moves as JSON lines first."),
    quasi: bool = typer.Option(False, "--quasi", help="Keep the surviving labels (no relabeling)."),
    random_order: Optional[int] = typer.Option(
        None, "--random-order", help="Apply moves in a random order drawn from this seed."
    ),
    out: Optional[str] = typer.Option(None, "--out", help="Write to this file instead of stdout."),
):
    """Silhouette of a cyclically reduced graph (rooted input is completed first)."""
    moves: List[MoveRecord] = []
    try:
        g = load_graph(in_path)
        if random_order is not None:
            seed = get_settings().master_seed(random_order)
            s = rewrite_randomly(g, random.Random(split_seed(seed)), moves)
            s = s if quasi else relabel_normalize(s)
        elif quasi:
            s = quasi_silhouette(g, moves, debug=get_settings().debug)
        else:
            s = silhouette_of(g, moves, debug=get_settings().debug)
    except ModularGroupError as e:
        fail(e)

    if trace:
        lines = [orjson.dumps(m.to_dict()).decode() for m in moves]
        lines.append(orjson.dumps({"silhouette": s.to_dict()}).decode())
        write_or_echo("\n".join(lines) + "\n", out)
    elif out is not None:
        write_or_echo(orjson.dumps(s.to_dict()).decode() + "\n", out)
    else:
        emit_json(s.to_dict())


def register(app: typer.Typer) -> None:
    app.command("silhouette")(silhouette)
