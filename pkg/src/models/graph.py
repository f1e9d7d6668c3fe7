# src/models/graph.py
from collections import deque
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from src.utils.errors import InvalidGraphError


class GraphMode(str, Enum):
    REDUCED = "reduced"
    CYCLICALLY_REDUCED = "cyclically-reduced"
    SILHOUETTE = "silhouette"


class TypeDelta(NamedTuple):
    dn: int
    dk2: int
    dk3: int
    dl2: int
    dl3: int


LAMBDA_3 = TypeDelta(-1, -1, 0, 1, -1)
LAMBDA_21 = TypeDelta(-1, 0, 1, -1, 0)
LAMBDA_22 = TypeDelta(-2, -1, -1, 0, 0)
KAPPA_3 = TypeDelta(-2, -1, -1, 0, 0)
ZERO_DELTA = TypeDelta(0, 0, 0, 0, 0)


class CombinatorialType(NamedTuple):
    n: int
    k2: int
    k3: int
    l2: int
    l3: int

    def shifted(self, delta: TypeDelta) -> "CombinatorialType":
        return CombinatorialType(*(x + d for x, d in zip(self, delta)))

    def minus(self, other: "CombinatorialType") -> TypeDelta:
        return TypeDelta(*(x - y for x, y in zip(self, other)))

    @property
    def loops(self) -> int:
        return self.l2 + self.l3

    def is_consistent(self, rooted: bool = False) -> bool:
        """Counts fit on ``n`` vertices; all b-covered vertices left after
        loops and isolated edges must split into triangles (the root of a
        rooted graph may be uncovered)."""
        if min(self) < 0 or self.n < 1:
            return False
        if 2 * self.k2 + self.l2 > self.n or 2 * self.k3 + self.l3 > self.n:
            return False
        rest = self.n - 2 * self.k3 - self.l3
        if rooted:
            return rest % 3 in (0, 1)
        return rest % 3 == 0 and 2 * self.k2 + self.l2 == self.n

    def to_dict(self) -> Dict[str, int]:
        return dict(self._asdict())


class ModularGraph:
    """Vertex set with a partial a-involution, a partial b-map of order 3 and
    an optional root.

    Labels are positive integers. A graph is *labeled* when its labels are
    exactly 1..n and *weakly labeled* otherwise; weak labels appear on the
    intermediate graphs of silhouetting. Instances are treated as immutable.
    """

    __slots__ = ("vertices", "alpha", "beta", "beta_inv", "root")

    def __init__(
        self,
        vertices: Iterable[int],
        alpha: Mapping[int, int],
        beta: Mapping[int, int],
        root: Optional[int] = None,
    ):
        self.vertices: Tuple[int, ...] = tuple(sorted(set(vertices)))
        self.alpha: Dict[int, int] = dict(alpha)
        self.beta: Dict[int, int] = dict(beta)
        self.beta_inv: Dict[int, int] = {w: v for v, w in self.beta.items()}
        self.root = root

        vset = set(self.vertices)
        if not vset or min(vset) < 1:
            raise InvalidGraphError("well-formed", None, "labels must be positive integers")
        for name, mapping in (("alpha", self.alpha), ("beta", self.beta)):
            for v, w in mapping.items():
                if v not in vset or w not in vset:
                    raise InvalidGraphError("well-formed", v, f"{name} leaves the vertex set")
        if root is not None and root not in vset:
            raise InvalidGraphError("well-formed", root, "root is not a vertex")

    # -----------------
    # Constructors
    # -----------------
    @classmethod
    def from_pairs(
        cls,
        vertices: Any,
        alpha_pairs: Iterable[Sequence[int]] = (),
        beta_pairs: Iterable[Sequence[int]] = (),
        root: Optional[int] = None,
    ) -> "ModularGraph":
        """``vertices`` is either n (labels 1..n) or an iterable of labels.
        a-pairs are undirected; b-pairs are directed edges v→w."""
        verts = range(1, vertices + 1) if isinstance(vertices, int) else vertices
        alpha: Dict[int, int] = {}
        for v, w in alpha_pairs:
            alpha[v] = w
            alpha[w] = v
        beta = {v: w for v, w in beta_pairs}
        return cls(verts, alpha, beta, root)

    # -----------------
    # Accessors
    # -----------------
    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def is_rooted(self) -> bool:
        return self.root is not None

    @property
    def is_labeled(self) -> bool:
        return self.vertices[0] == 1 and self.vertices[-1] == len(self.vertices)

    @property
    def is_weakly_labeled(self) -> bool:
        return not self.is_labeled

    def a(self, v: int) -> Optional[int]:
        return self.alpha.get(v)

    def b(self, v: int) -> Optional[int]:
        return self.beta.get(v)

    def b_inv(self, v: int) -> Optional[int]:
        return self.beta_inv.get(v)

    def has_b_edge(self, v: int) -> bool:
        return v in self.beta or v in self.beta_inv

    def neighbors(self, v: int) -> List[int]:
        out = []
        for m in (self.alpha, self.beta, self.beta_inv):
            w = m.get(v)
            if w is not None:
                out.append(w)
        return out

    def alpha_pairs(self) -> List[List[int]]:
        return sorted([v, w] for v, w in self.alpha.items() if v <= w)

    def beta_pairs(self) -> List[List[int]]:
        return sorted([v, w] for v, w in self.beta.items())

    def with_root(self, root: Optional[int]) -> "ModularGraph":
        return ModularGraph(self.vertices, self.alpha, self.beta, root)

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "n": self.n,
            "alpha": self.alpha_pairs(),
            "beta": self.beta_pairs(),
            "root": self.root,
        }
        if not self.is_labeled:
            d["labels"] = list(self.vertices)
        return d

    def _key(self):
        return (self.vertices, tuple(sorted(self.alpha.items())), tuple(sorted(self.beta.items())), self.root)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModularGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (
            f"ModularGraph(n={self.n}, alpha={self.alpha_pairs()}, "
            f"beta={self.beta_pairs()}, root={self.root})"
        )


# ===================== Validation =====================

def is_connected(g: ModularGraph) -> bool:
    return len(_reachable(g, g.vertices[0])) == g.n


def _reachable(g: ModularGraph, start: int) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def first_violation(g: ModularGraph, mode: GraphMode = GraphMode.REDUCED) -> Optional[Tuple[str, Optional[int]]]:
    """First violated invariant as ``(name, vertex)``, or None."""
    mode = GraphMode(mode)
    for v in g.vertices:
        w = g.alpha.get(v)
        if w is not None and g.alpha.get(w) != v:
            return "alpha-involution", v

    if len(g.beta_inv) != len(g.beta):
        seen = set()
        for v in g.vertices:
            w = g.beta.get(v)
            if w is None:
                continue
            if w in seen:
                return "beta-injective", w
            seen.add(w)

    for v in g.vertices:
        w = g.beta.get(v)
        if w is None or w == v:
            continue
        u = g.beta.get(w)
        if u is None:
            continue
        if u == v:
            return "beta-order-3", v
        if g.beta.get(u) != v:
            return "triangle-closure", u

    reach = _reachable(g, g.vertices[0])
    if len(reach) != g.n:
        return "connected", next(v for v in g.vertices if v not in reach)

    exempt = g.root if mode is GraphMode.REDUCED else None
    for v in g.vertices:
        if v == exempt:
            continue
        if v not in g.alpha:
            return "a-coverage", v
        if not g.has_b_edge(v):
            return "b-coverage", v

    if mode is GraphMode.SILHOUETTE and not _is_silhouette_shape(g):
        return "silhouette-type", None
    return None


def _is_silhouette_shape(g: ModularGraph) -> bool:
    t = combinatorial_type(g)
    if t == CombinatorialType(1, 0, 0, 1, 1) or t == CombinatorialType(2, 1, 1, 0, 0):
        return True
    return 2 * t.k2 == t.n and t.k3 == t.l2 == t.l3 == 0


def check(g: ModularGraph, mode: GraphMode = GraphMode.REDUCED) -> ModularGraph:
    bad = first_violation(g, mode)
    if bad is not None:
        raise InvalidGraphError(bad[0], bad[1], f"mode {GraphMode(mode).value}")
    return g


def validate(g: ModularGraph, mode: GraphMode = GraphMode.REDUCED) -> bool:
    return first_violation(g, mode) is None


# ===================== Types, completion, relabeling =====================

def combinatorial_type(g: ModularGraph) -> CombinatorialType:
    k2 = l2 = k3 = l3 = 0
    for v, w in g.alpha.items():
        if v == w:
            l2 += 1
        elif v < w:
            k2 += 1
    for v, w in g.beta.items():
        if v == w:
            l3 += 1
        elif w not in g.beta and v not in g.beta_inv:
            k3 += 1
    return CombinatorialType(g.n, k2, k3, l2, l3)


def complete(g: ModularGraph) -> ModularGraph:
    """Γ°: add the loops missing at the root of a reduced graph."""
    if g.root is None:
        raise InvalidGraphError("rooted", None, "completion needs a root")
    r = g.root
    if r in g.alpha and g.has_b_edge(r):
        return g
    alpha = dict(g.alpha)
    beta = dict(g.beta)
    alpha.setdefault(r, r)
    if not g.has_b_edge(r):
        beta[r] = r
    return ModularGraph(g.vertices, alpha, beta, r)


def relabel(g: ModularGraph, mapping: Mapping[int, int]) -> ModularGraph:
    return ModularGraph(
        (mapping[v] for v in g.vertices),
        {mapping[v]: mapping[w] for v, w in g.alpha.items()},
        {mapping[v]: mapping[w] for v, w in g.beta.items()},
        mapping[g.root] if g.root is not None else None,
    )


def relabel_normalize(g: ModularGraph) -> ModularGraph:
    """Order-preserving relabeling onto 1..n."""
    if g.is_labeled:
        return g
    return relabel(g, {v: i for i, v in enumerate(g.vertices, start=1)})


def bfs_order(g: ModularGraph, start: int) -> List[int]:
    """Vertices in breadth-first order from ``start``, edges visited a < b < b⁻¹."""
    order = [start]
    seen = {start}
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for w in g.neighbors(v):
            if w not in seen:
                seen.add(w)
                order.append(w)
    return order


def _code_from(g: ModularGraph, start: int) -> Tuple[Tuple[int, int], ...]:
    order = bfs_order(g, start)
    new = {v: i for i, v in enumerate(order, start=1)}
    return tuple((new.get(g.alpha.get(v), 0), new.get(g.beta.get(v), 0)) for v in order)


def canonical_form(g: ModularGraph, rooted: bool = False) -> Tuple:
    if rooted:
        if g.root is None:
            raise InvalidGraphError("rooted", None, "rooted canonical form needs a root")
        return (g.n, _code_from(g, g.root))
    return (g.n, min(_code_from(g, v) for v in g.vertices))


def bfs_relabel(g: ModularGraph, start: Optional[int] = None) -> ModularGraph:
    """Relabel by BFS order from ``start`` (the root by default)."""
    start = g.root if start is None else start
    order = bfs_order(g, start)
    return relabel(g, {v: i for i, v in enumerate(order, start=1)})


def is_isomorphic(g1: ModularGraph, g2: ModularGraph, rooted: bool = False) -> bool:
    if g1.n != g2.n:
        return False
    if combinatorial_type(g1) != combinatorial_type(g2):
        return False
    return canonical_form(g1, rooted) == canonical_form(g2, rooted)


# ===================== Named graphs =====================

def trivial_graph() -> ModularGraph:
    """Stallings graph of the trivial subgroup."""
    return ModularGraph([1], {}, {}, root=1)


def delta_1(label: int = 1) -> ModularGraph:
    return ModularGraph([label], {label: label}, {label: label})


def delta_2(first: int = 1, second: int = 2) -> ModularGraph:
    """Δ₂; the default arguments give the preferred labeling (b from 1 to 2)."""
    return ModularGraph.from_pairs([first, second], [(first, second)], [(first, second)])


def delta_3(tail: int = 1, head: int = 2) -> ModularGraph:
    return ModularGraph.from_pairs([tail, head], [(tail, tail), (head, head)], [(tail, head)])


def delta_4() -> ModularGraph:
    return ModularGraph.from_pairs(2, [(1, 2)], [(1, 1), (2, 2)])


PREFERRED_DELTA_2 = delta_2()
