# src/commands/sample.py
from pathlib import Path
from typing import Optional

import typer

from src.commands.common import emit_json, fail
from src.engine.experiments import SAMPLER_CODES
from src.engine.sampler import GraphSampler
from src.utils.config import get_settings
from src.utils.errors import ModularGroupError
from src.utils.graph_io import write_graph


def sample(
    mode: str = typer.Option(..., "--mode", help="cyc | rooted | silh"),
    n: int = typer.Option(..., "--n", min=1, help="Graph size."),
    count: int = typer.Option(1, "--count", min=1, help="Number of graphs."),
    seed: int = typer.Option(0, "--seed", min=0, help="Master seed (MODGROUP_SEED overrides)."),
    out: Optional[str] = typer.Option(None, "--out", help="Directory for one JSON file per graph."),
):
    """Uniform random graphs; graph i is drawn from the seed key (n, mode, i)."""
    if mode not in SAMPLER_CODES:
        raise typer.BadParameter(f"unknown mode {mode!r}, expected one of {', '.join(SAMPLER_CODES)}", param_hint="--mode")
    master = get_settings().master_seed(seed)
    graphs = []
    try:
        for i in range(count):
            graphs.append(GraphSampler(master, n, SAMPLER_CODES[mode], i).sample(mode, n))
    except ModularGroupError as e:
        fail(e)
    if out is None:
        emit_json([g.to_dict() for g in graphs])
        return
    target = Path(out)
    target.mkdir(parents=True, exist_ok=True)
    width = len(str(count - 1))
    for i, g in enumerate(graphs):
        write_graph(g, target / f"{mode}-n{n}-{i:0{width}d}.json")
    emit_json({"success": True, "written": len(graphs), "dir": str(target)})


def register(app: typer.Typer) -> None:
    app.command("sample")(sample)
