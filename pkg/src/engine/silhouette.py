# src/engine/silhouette.py
import random
from typing import Callable, Dict, Iterable, List, Optional, Set, Tuple

from src.models.graph import (
    GraphMode,
    ModularGraph,
    PREFERRED_DELTA_2,
    combinatorial_type,
    complete,
    delta_1,
    first_violation,
    relabel_normalize,
)
from src.models.moves import MoveKind, MoveRecord
from src.utils.errors import InvalidGraphError, MoveNotApplicableError
from src.utils.log import LogMixin


class WorkingGraph:
    """Mutable copy of a ModularGraph used while rewriting; labels are kept."""

    __slots__ = ("vertices", "alpha", "beta", "beta_inv")

    def __init__(self, g: ModularGraph):
        self.vertices: Set[int] = set(g.vertices)
        self.alpha: Dict[int, int] = dict(g.alpha)
        self.beta: Dict[int, int] = dict(g.beta)
        self.beta_inv: Dict[int, int] = dict(g.beta_inv)

    def freeze(self) -> ModularGraph:
        return ModularGraph(self.vertices, self.alpha, self.beta)

    # -----------------
    # Local shapes
    # -----------------
    def isolated_b_partner(self, v: int) -> Optional[int]:
        w = self.beta.get(v)
        if w is not None:
            if w != v and w not in self.beta and v not in self.beta_inv:
                return w
            return None
        u = self.beta_inv.get(v)
        if u is not None and u not in self.beta_inv:
            return u
        return None

    def b_loops(self) -> List[int]:
        return [v for v, w in self.beta.items() if v == w]

    def a_loops(self) -> List[int]:
        return [v for v, w in self.alpha.items() if v == w]

    def isolated_b_sources(self) -> List[int]:
        return [v for v, w in self.beta.items() if v != w and w not in self.beta and v not in self.beta_inv]

    # -----------------
    # Patterns: pivots when applicable, else None
    # -----------------
    def lambda3_at(self, v: int) -> Optional[Tuple[int, ...]]:
        w = self.alpha.get(v)
        if self.beta.get(v) == v and w is not None and w != v:
            return (v,)
        return None

    def lambda21_at(self, v: int) -> Optional[Tuple[int, ...]]:
        if self.alpha.get(v) != v:
            return None
        x = self.beta.get(v)
        if x is None or x == v:
            return None
        y = self.beta.get(x)
        if y is None or y == x or y == v or self.beta.get(y) != v:
            return None
        return (v,)

    def lambda22_at(self, v: int) -> Optional[Tuple[int, ...]]:
        if self.alpha.get(v) != v:
            return None
        w = self.isolated_b_partner(v)
        if w is None:
            return None
        w2 = self.alpha.get(w)
        if w2 is None or w2 == w or w2 == v:
            return None
        return (v, w)

    def kappa3_at(self, v: int) -> Optional[Tuple[int, ...]]:
        """κ₃ on the isolated b-edge leaving ``v``."""
        w = self.beta.get(v)
        if w is None or w == v or w in self.beta or v in self.beta_inv:
            return None
        v2, w2 = self.alpha.get(v), self.alpha.get(w)
        if v2 is None or w2 is None or v2 == v or w2 == w or v2 == w:
            return None
        return (v, w)

    def exceptional_target(self) -> Optional[ModularGraph]:
        """Target of the exceptional move, if the graph is a misplaced Δ₁/Δ₂ or a Δ₃."""
        n = len(self.vertices)
        if n == 1:
            (v,) = self.vertices
            if v != 1 and self.alpha.get(v) == v and self.beta.get(v) == v:
                return delta_1()
            return None
        if n != 2:
            return None
        v, w = sorted(self.vertices)
        if self.alpha.get(v) == v and self.alpha.get(w) == w and self.isolated_b_partner(v) == w:
            return delta_1()
        if self.alpha.get(v) == w and self.isolated_b_partner(v) == w:
            if (v, w) != (1, 2) or self.beta.get(1) != 2:
                return PREFERRED_DELTA_2
        return None

    # -----------------
    # Rewrites (callers check applicability)
    # -----------------
    def _drop(self, v: int) -> None:
        self.vertices.discard(v)
        self.alpha.pop(v, None)
        w = self.beta.pop(v, None)
        if w is not None:
            self.beta_inv.pop(w, None)
        u = self.beta_inv.pop(v, None)
        if u is not None:
            self.beta.pop(u, None)

    def lambda3(self, v: int) -> None:
        w = self.alpha[v]
        self._drop(v)
        self.alpha[w] = w

    def lambda21(self, v: int) -> None:
        self._drop(v)

    def lambda22(self, v: int, w: int) -> None:
        w2 = self.alpha[w]
        self._drop(v)
        self._drop(w)
        self.alpha[w2] = w2

    def kappa3(self, v: int, w: int) -> None:
        v2, w2 = self.alpha[v], self.alpha[w]
        self._drop(v)
        self._drop(w)
        self.alpha[v2] = w2
        self.alpha[w2] = v2

    def replace(self, g: ModularGraph) -> None:
        self.vertices = set(g.vertices)
        self.alpha = dict(g.alpha)
        self.beta = dict(g.beta)
        self.beta_inv = dict(g.beta_inv)


# ===================== Move listing / application =====================

_FINDERS: Dict[MoveKind, Callable[[WorkingGraph, int], Optional[Tuple[int, ...]]]] = {
    MoveKind.LAMBDA_3: WorkingGraph.lambda3_at,
    MoveKind.LAMBDA_21: WorkingGraph.lambda21_at,
    MoveKind.LAMBDA_22: WorkingGraph.lambda22_at,
    MoveKind.KAPPA_3: WorkingGraph.kappa3_at,
}

_PATTERNS = {
    MoveKind.LAMBDA_3: "b-loop at v and an a-edge from v to another vertex",
    MoveKind.LAMBDA_21: "a-loop at v and v on a b-triangle",
    MoveKind.LAMBDA_22: "a-loop at v, isolated b-edge v–w, a-edge from w to a third vertex",
    MoveKind.KAPPA_3: "isolated b-edge v→w between two isolated a-edges on four distinct vertices",
    MoveKind.EXCEPTIONAL: "weakly labeled Δ₁, Δ₂ or Δ₃",
}


def _exceptional_record(W: WorkingGraph, target: ModularGraph) -> MoveRecord:
    before = combinatorial_type(W.freeze())
    return MoveRecord(
        kind=MoveKind.EXCEPTIONAL,
        pivots=tuple(sorted(W.vertices)),
        delta=combinatorial_type(target).minus(before),
    )


def _list_moves(W: WorkingGraph) -> List[MoveRecord]:
    moves: List[MoveRecord] = []
    for v in sorted(W.vertices):
        for kind, finder in _FINDERS.items():
            pivots = finder(W, v)
            if pivots is not None:
                moves.append(MoveRecord.regular(kind, *pivots))
    target = W.exceptional_target()
    if target is not None:
        moves.append(_exceptional_record(W, target))
    return moves


def _apply(W: WorkingGraph, m: MoveRecord) -> None:
    if m.kind is MoveKind.EXCEPTIONAL:
        target = W.exceptional_target()
        if target is None or tuple(sorted(W.vertices)) != m.pivots:
            raise MoveNotApplicableError(m.kind.value, _PATTERNS[m.kind])
        W.replace(target)
        return
    v = m.pivots[0]
    if v not in W.vertices or _FINDERS[m.kind](W, v) != m.pivots:
        raise MoveNotApplicableError(m.kind.value, _PATTERNS[m.kind])
    if m.kind is MoveKind.LAMBDA_3:
        W.lambda3(v)
    elif m.kind is MoveKind.LAMBDA_21:
        W.lambda21(v)
    elif m.kind is MoveKind.LAMBDA_22:
        W.lambda22(*m.pivots)
    else:
        W.kappa3(*m.pivots)


def find_moves(g: ModularGraph) -> List[MoveRecord]:
    """Every structurally applicable move, ordered by pivot then kind."""
    return _list_moves(WorkingGraph(g))


def apply_move(g: ModularGraph, m: MoveRecord) -> ModularGraph:
    """Apply ``m``; deleted vertices leave their labels vacant."""
    W = WorkingGraph(g)
    _apply(W, m)
    return W.freeze()


# ===================== Silhouetting =====================

class SilhouetteEngine(LogMixin):
    """
    Staged rewriting: every λ₃ first, then the λ₂ moves (λ₂,₁ when the pivot
    sits on a b-triangle, λ₂,₂ otherwise), then κ₃, then the exceptional move.
    Within a stage pivots are visited in increasing label order.
    """

    _log_prefix = "[Silhouette]"

    def __init__(self, debug: bool = False):
        self.debug = debug

    # -----------------
    # Stages
    # -----------------
    @staticmethod
    def _try_lambda3(W: WorkingGraph, v: int) -> Optional[MoveRecord]:
        if W.lambda3_at(v) is None:
            return None
        W.lambda3(v)
        return MoveRecord.regular(MoveKind.LAMBDA_3, v)

    @staticmethod
    def _try_lambda2(W: WorkingGraph, v: int) -> Optional[MoveRecord]:
        if W.lambda21_at(v) is not None:
            W.lambda21(v)
            return MoveRecord.regular(MoveKind.LAMBDA_21, v)
        pivots = W.lambda22_at(v)
        if pivots is not None:
            W.lambda22(*pivots)
            return MoveRecord.regular(MoveKind.LAMBDA_22, *pivots)
        return None

    @staticmethod
    def _try_kappa3(W: WorkingGraph, v: int) -> Optional[MoveRecord]:
        pivots = W.kappa3_at(v)
        if pivots is None:
            return None
        W.kappa3(*pivots)
        return MoveRecord.regular(MoveKind.KAPPA_3, *pivots)

    def _stage(
        self,
        W: WorkingGraph,
        candidates: Callable[[WorkingGraph], Iterable[int]],
        attempt: Callable[[WorkingGraph, int], Optional[MoveRecord]],
        trace: Optional[List[MoveRecord]],
    ) -> int:
        applied = 0
        while True:
            progressed = False
            for v in sorted(candidates(W)):
                if v not in W.vertices:
                    continue
                rec = attempt(W, v)
                if rec is None:
                    continue
                progressed = True
                applied += 1
                if trace is not None:
                    trace.append(rec)
            if not progressed:
                return applied

    def run(self, g: ModularGraph, trace: Optional[List[MoveRecord]] = None) -> ModularGraph:
        W = WorkingGraph(g)
        n3 = self._stage(W, WorkingGraph.b_loops, self._try_lambda3, trace)
        n2 = self._stage(W, WorkingGraph.a_loops, self._try_lambda2, trace)
        nk = self._stage(W, WorkingGraph.isolated_b_sources, self._try_kappa3, trace)
        target = W.exceptional_target()
        if target is not None:
            if trace is not None:
                trace.append(_exceptional_record(W, target))
            W.replace(target)
        self._log(f"n={g.n}: {n3} λ₃, {n2} λ₂, {nk} κ₃ moves, {len(W.vertices)} vertices left")
        if self.debug and _list_moves(W):
            raise AssertionError("staged strategy stopped before the fixpoint")
        if self.debug and g.n - len(W.vertices) > deletion_bound(g):
            raise AssertionError(f"deleted {g.n - len(W.vertices)} vertices, bound is {deletion_bound(g)}")
        return W.freeze()


def _unrooted_input(g: ModularGraph) -> ModularGraph:
    if g.root is not None:
        g = complete(g).with_root(None)
    bad = first_violation(g, GraphMode.CYCLICALLY_REDUCED)
    if bad is not None:
        raise InvalidGraphError(bad[0], bad[1], "silhouetting needs a cyclically reduced graph")
    return g


def quasi_silhouette(g: ModularGraph, trace: Optional[List[MoveRecord]] = None, debug: bool = False) -> ModularGraph:
    """Fixpoint of the rewriting system; survivors keep their labels.
    Rooted input is completed first."""
    return SilhouetteEngine(debug=debug).run(_unrooted_input(g), trace)


def silhouette(g: ModularGraph, trace: Optional[List[MoveRecord]] = None, debug: bool = False) -> ModularGraph:
    return relabel_normalize(quasi_silhouette(g, trace, debug))


def rewrite_randomly(g: ModularGraph, rng: random.Random, trace: Optional[List[MoveRecord]] = None) -> ModularGraph:
    """Apply uniformly chosen applicable moves until none is left."""
    W = WorkingGraph(_unrooted_input(g))
    while True:
        moves = _list_moves(W)
        if not moves:
            return W.freeze()
        m = moves[rng.randrange(len(moves))]
        _apply(W, m)
        if trace is not None:
            trace.append(m)


def deletion_bound(g: ModularGraph) -> int:
    """Upper bound on the number of vertices silhouetting deletes."""
    t = combinatorial_type(g)
    return 2 * t.k3 + 4 * t.l2 + 5 * t.l3 + 1


def silhouette_trace(g: ModularGraph, debug: bool = False) -> Tuple[ModularGraph, List[MoveRecord]]:
    """Silhouette together with the moves the staged strategy applied."""
    moves: List[MoveRecord] = []
    return silhouette(g, moves, debug), moves
