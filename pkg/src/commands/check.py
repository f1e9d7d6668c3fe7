# src/commands/check.py
from typing import Optional

import typer

from src.commands.common import emit_json, fail, load_graph
from src.engine.analysis import ALL_PROPS, SubgroupAnalyzer
from src.models.graph import GraphMode, check as check_graph, combinatorial_type
from src.utils.config import get_settings
from src.utils.errors import InvalidInputError, ModularGroupError


def check(
    in_path: str = typer.Option(..., "--in", help="Graph file (JSON or DOT), - for stdin."),
    mode: GraphMode = typer.Option(GraphMode.REDUCED, "--mode", help="Invariants to enforce."),
    props: Optional[str] = typer.Option(
        None, "--props", help=f"Comma-separated subset of {','.join(ALL_PROPS)}."
    ),
):
    """Validate a graph and optionally evaluate subgroup properties."""
    try:
        g = check_graph(load_graph(in_path), mode)
        wanted = [p.strip() for p in props.split(",") if p.strip()] if props else []
        unknown = [p for p in wanted if p not in ALL_PROPS]
        if unknown:
            raise InvalidInputError(f"unknown properties: {', '.join(unknown)}")
        if wanted:
            verdict = SubgroupAnalyzer(debug=get_settings().debug).process(g, wanted)
        else:
            verdict = {"success": True, "type": combinatorial_type(g).to_dict()}
    except ModularGroupError as e:
        fail(e)
    verdict["valid"] = True
    verdict["mode"] = mode.value
    emit_json(verdict)


def register(app: typer.Typer) -> None:
    app.command("check")(check)
