# src/engine/analysis.py
from collections import deque
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from src.models.graph import GraphMode, ModularGraph, check, combinatorial_type, first_violation
from src.models.word import Letter, Word
from src.utils.errors import InvalidInputError
from src.utils.log import LogMixin


# ===================== Type-based properties =====================

def is_free(g: ModularGraph) -> bool:
    t = combinatorial_type(g)
    return t.l2 == 0 and t.l3 == 0


def is_finite_index(g: ModularGraph) -> Optional[int]:
    """The index n when g is cyclically reduced without isolated b-edges."""
    if first_violation(g, GraphMode.CYCLICALLY_REDUCED) is not None:
        return None
    return g.n if combinatorial_type(g).k3 == 0 else None


# ===================== ab-cycles =====================

def phi_map(g: ModularGraph) -> Dict[int, int]:
    """φ(v) = beta(alpha(v)), defined where both steps exist."""
    out = {}
    for v, w in g.alpha.items():
        u = g.beta.get(w)
        if u is not None:
            out[v] = u
    return out


def ab_cycles(g: ModularGraph) -> List[List[int]]:
    """φ-orbits that close up, each listed from its smallest vertex."""
    phi = phi_map(g)
    seen = set()
    cycles = []
    for v in sorted(phi):
        if v in seen:
            continue
        path = [v]
        seen.add(v)
        w = phi.get(v)
        # φ is injective, so a walk can only close up at its start
        while w is not None and w not in seen:
            seen.add(w)
            path.append(w)
            w = phi.get(w)
        if w == v:
            cycles.append(path)
    return cycles


def ab_cycle_spectrum(g: ModularGraph) -> List[int]:
    return sorted(len(c) for c in ab_cycles(g))


def _b_component(g: ModularGraph, v: int) -> int:
    comp = v
    w = g.beta.get(v)
    for _ in range(2):
        if w is None or w == v:
            break
        comp = min(comp, w)
        w = g.beta.get(w)
    u = g.beta_inv.get(v)
    if u is not None:
        comp = min(comp, u)
    return comp


def is_simple_cycle(g: ModularGraph, cycle: Sequence[int]) -> bool:
    comps = [_b_component(g, v) for v in cycle]
    return len(set(comps)) == len(comps)


def simple_ab_cycles(g: ModularGraph) -> List[int]:
    """Sorted sizes of the ab-cycles visiting each b-component at most once."""
    return sorted(len(c) for c in ab_cycles(g) if is_simple_cycle(g, c))


def is_parabolic(g: ModularGraph) -> bool:
    return bool(ab_cycles(g))


# ===================== Almost malnormality =====================

class MalnormalityVerdict(BaseModel):
    almost_malnormal: bool
    witness: Optional[str] = None
    p: Optional[int] = None
    q: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


class ProductDigraph:
    """
    Off-diagonal alternating square of a graph. States are (p, q, phase) with
    p ≠ q; phase 0 expects an a-step and phase 1 a b- or b⁻¹-step. State index
    is phase·n² + p·n + q over 0-based positions of the sorted labels.
    """

    def __init__(self, g: ModularGraph, debug: bool = False):
        self.g = g
        self.labels = np.asarray(g.vertices, dtype=np.int64)
        n = self.n = g.n
        pos = {v: i for i, v in enumerate(g.vertices)}
        self.alpha = self._array(g.alpha, pos)
        self.beta = self._array(g.beta, pos)
        self.beta_inv = self._array(g.beta_inv, pos)

        p = np.repeat(np.arange(n, dtype=np.int64), n)
        q = np.tile(np.arange(n, dtype=np.int64), n)
        off = p != q
        p, q = p[off], q[off]
        nn = n * n
        src, dst = [], []
        for step, phase_from, phase_to in (
            (self.alpha, 0, 1),
            (self.beta, 1, 0),
            (self.beta_inv, 1, 0),
        ):
            ok = (step[p] >= 0) & (step[q] >= 0)
            sp, sq = p[ok], q[ok]
            tp, tq = step[sp], step[sq]
            if debug and np.any(tp == tq):
                raise AssertionError("product digraph reached the diagonal")
            src.append(phase_from * nn + sp * n + sq)
            dst.append(phase_to * nn + tp * n + tq)
        src_all = np.concatenate(src) if src else np.empty(0, dtype=np.int64)
        dst_all = np.concatenate(dst) if dst else np.empty(0, dtype=np.int64)
        size = 2 * nn
        self.matrix = csr_matrix(
            (np.ones(len(src_all), dtype=np.int8), (src_all, dst_all)), shape=(size, size)
        )

    @staticmethod
    def _array(mapping: Dict[int, int], pos: Dict[int, int]) -> np.ndarray:
        arr = np.full(len(pos), -1, dtype=np.int64)
        for v, w in mapping.items():
            arr[pos[v]] = pos[w]
        return arr

    def decode(self, state: int) -> Tuple[int, int, int]:
        nn = self.n * self.n
        phase, rest = divmod(state, nn)
        p, q = divmod(rest, self.n)
        return phase, p, q

    def successors(self, state: int) -> List[Tuple[int, Letter]]:
        phase, p, q = self.decode(state)
        nn = self.n * self.n
        out = []
        if phase == 0:
            steps = ((self.alpha, Letter.A, 1),)
        else:
            steps = ((self.beta, Letter.B, 0), (self.beta_inv, Letter.BINV, 0))
        for step, letter, nxt in steps:
            tp, tq = int(step[p]), int(step[q])
            if tp >= 0 and tq >= 0:
                out.append((nxt * nn + tp * self.n + tq, letter))
        return out

    def cyclic_component(self) -> Optional[np.ndarray]:
        """States of some strongly connected component carrying a cycle."""
        if self.matrix.nnz == 0:
            return None
        _, comp = connected_components(self.matrix, directed=True, connection="strong")
        sizes = np.bincount(comp)
        big = np.flatnonzero(sizes >= 2)
        if len(big) == 0:
            return None
        return np.flatnonzero(comp == big[0])

    def cycle_through(self, start: int, members: Iterable[int]) -> List[Letter]:
        """Letters of a cycle at ``start`` staying inside ``members``."""
        allowed = set(int(x) for x in members)
        parent: Dict[int, Tuple[int, Letter]] = {}
        queue = deque([start])
        seen = {start}
        while queue:
            s = queue.popleft()
            for t, letter in self.successors(s):
                if t not in allowed:
                    continue
                if t == start:
                    letters = [letter]
                    while s != start:
                        s, x = parent[s]
                        letters.append(x)
                    return letters[::-1]
                if t not in seen:
                    seen.add(t)
                    parent[t] = (s, letter)
                    queue.append(t)
        raise AssertionError("component without a cycle through its state")


def is_almost_malnormal(g: ModularGraph, debug: bool = False) -> MalnormalityVerdict:
    prod = ProductDigraph(g, debug=debug)
    members = prod.cyclic_component()
    if members is None:
        return MalnormalityVerdict(almost_malnormal=True)
    start = int(members[0])
    letters = prod.cycle_through(start, members)
    _, p, q = prod.decode(start)
    return MalnormalityVerdict(
        almost_malnormal=False,
        witness=str(Word(letters)),
        p=int(prod.labels[p]),
        q=int(prod.labels[q]),
    )


# ===================== Batch verdicts =====================

ALL_PROPS = ("free", "index", "parabolic", "malnormal")


class SubgroupAnalyzer(LogMixin):
    """Evaluates a list of properties on one Stallings graph."""

    _log_prefix = "[Analyzer]"

    def __init__(self, debug: bool = False):
        self.debug = debug

    def process(self, g: ModularGraph, props: Sequence[str] = ALL_PROPS) -> Dict[str, Any]:
        unknown = [p for p in props if p not in ALL_PROPS]
        if unknown:
            raise InvalidInputError(f"unknown properties: {', '.join(unknown)}")
        check(g, GraphMode.REDUCED)
        out: Dict[str, Any] = {"success": True, "type": combinatorial_type(g).to_dict()}
        for prop in props:
            self._log("evaluating", prop)
            if prop == "free":
                out["free"] = is_free(g)
            elif prop == "index":
                out["index"] = is_finite_index(g)
            elif prop == "parabolic":
                out["parabolic"] = is_parabolic(g)
                out["ab_cycle_spectrum"] = ab_cycle_spectrum(g)
            else:
                out["malnormal"] = is_almost_malnormal(g, debug=self.debug).to_dict()
        return out
