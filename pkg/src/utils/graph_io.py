# src/utils/graph_io.py
import re
from pathlib import Path
from typing import Any, Dict, List, Union

import orjson

from src.models.graph import ModularGraph
from src.utils.errors import InvalidGraphError


# ===================== JSON =====================

def encode(g: ModularGraph) -> bytes:
    """Canonical JSON: keys n, alpha, beta, root (plus labels when weakly labeled)."""
    return orjson.dumps(g.to_dict())


def encode_str(g: ModularGraph) -> str:
    return encode(g).decode()


def from_dict(data: Dict[str, Any]) -> ModularGraph:
    try:
        n = int(data["n"])
        labels = data.get("labels")
        verts: Union[int, List[int]] = [int(x) for x in labels] if labels is not None else n
        if labels is not None and len(labels) != n:
            raise InvalidGraphError("well-formed", None, "labels do not match n")
        alpha = [(int(v), int(w)) for v, w in data.get("alpha", [])]
        beta = [(int(v), int(w)) for v, w in data.get("beta", [])]
        root = data.get("root")
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidGraphError("well-formed", None, f"bad graph document: {e}") from None
    seen = set()
    for v, w in alpha:
        if v in seen or (w != v and w in seen):
            raise InvalidGraphError("alpha-involution", v, "vertex on two a-edges")
        seen.update((v, w))
    return ModularGraph.from_pairs(verts, alpha, beta, int(root) if root is not None else None)


def decode(raw: Union[bytes, str]) -> ModularGraph:
    try:
        data = orjson.loads(raw)
    except orjson.JSONDecodeError as e:
        raise InvalidGraphError("well-formed", None, f"invalid JSON: {e}") from None
    if not isinstance(data, dict):
        raise InvalidGraphError("well-formed", None, "graph document must be an object")
    return from_dict(data)


def parse_graph(text: str) -> ModularGraph:
    """JSON or DOT, told apart by the leading keyword."""
    if text.lstrip().startswith("digraph"):
        return from_dot(text)
    return decode(text)


def read_graph(path: Union[str, Path]) -> ModularGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def write_graph(g: ModularGraph, path: Union[str, Path]) -> None:
    Path(path).write_bytes(encode(g) + b"\n")


# ===================== DOT =====================

def to_dot(g: ModularGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in g.vertices:
        shape = "doublecircle" if v == g.root else "circle"
        lines.append(f"  {v} [shape={shape}];")
    for v, w in g.alpha_pairs():
        lines.append(f'  {v} -> {w} [label="a", dir=none];')
    for v, w in g.beta_pairs():
        lines.append(f'  {v} -> {w} [label="b"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


_NODE_RE = re.compile(r"^\s*(\d+)\s*\[([^\]]*)\]\s*;?\s*$")
_EDGE_RE = re.compile(r'^\s*(\d+)\s*->\s*(\d+)\s*\[[^\]]*label\s*=\s*"?([ab])"?[^\]]*\]\s*;?\s*$')


def from_dot(text: str) -> ModularGraph:
    """Parse the DOT dialect written by ``to_dot``."""
    verts: List[int] = []
    alpha: List[tuple] = []
    beta: List[tuple] = []
    root = None
    for line in text.splitlines():
        m = _EDGE_RE.match(line)
        if m:
            v, w, lab = int(m.group(1)), int(m.group(2)), m.group(3)
            (alpha if lab == "a" else beta).append((v, w))
            continue
        m = _NODE_RE.match(line)
        if m:
            v = int(m.group(1))
            verts.append(v)
            if "doublecircle" in m.group(2):
                root = v
    if not verts:
        raise InvalidGraphError("well-formed", None, "no vertices in DOT input")
    return ModularGraph.from_pairs(verts, alpha, beta, root)
