# src/engine/stallings.py
from collections import deque
from typing import Deque, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from networkx.utils import UnionFind

from src.models.graph import ModularGraph, bfs_relabel, trivial_graph
from src.models.word import Letter, Word, normalize
from src.utils.log import LogMixin


class StallingsBuilder(LogMixin):
    """
    Folds a wedge of cycles labeled by generator words into the Stallings
    graph of the subgroup they generate:
      - a-edges are symmetric, so each vertex keeps at most one a-neighbour;
      - b-edges are folded forwards and backwards;
      - every b²-path u→v→w is closed by the edge w→u;
    merges and closures alternate from a work queue until nothing changes.
    """

    _log_prefix = "[Stallings]"

    def __init__(self, debug: bool = False):
        self.debug = debug
        self._reset()

    def _reset(self) -> None:
        self.uf = UnionFind()
        self.a_nbr: Dict[int, int] = {}
        self.b_out: Dict[int, int] = {}
        self.b_in: Dict[int, int] = {}
        self.merges: Deque[Tuple[int, int]] = deque()
        self.suspects: Deque[int] = deque()
        self.next_vertex = 0

    # -----------------
    # Low-level edits
    # -----------------
    def _new_vertex(self) -> int:
        self.next_vertex += 1
        v = self.next_vertex
        self.uf[v]
        return v

    def _find(self, v: Optional[int]) -> Optional[int]:
        return None if v is None else self.uf[v]

    def _set_partner(self, table: Dict[int, int], v: int, w: int) -> None:
        cur = self._find(table.get(v))
        if cur is not None and cur != w:
            self.merges.append((cur, w))
        else:
            table[v] = w

    def add_a(self, v: int, w: int) -> None:
        v, w = self.uf[v], self.uf[w]
        self._set_partner(self.a_nbr, v, w)
        self._set_partner(self.a_nbr, w, v)

    def add_b(self, v: int, w: int) -> None:
        v, w = self.uf[v], self.uf[w]
        self._set_partner(self.b_out, v, w)
        self._set_partner(self.b_in, w, v)
        self.suspects.extend((v, w))
        u = self._find(self.b_in.get(v))
        if u is not None:
            self.suspects.append(u)

    def _merge(self, x: int, y: int) -> None:
        x, y = self.uf[x], self.uf[y]
        if x == y:
            return
        self.uf.union(x, y)
        r = self.uf[x]
        other = y if r == x else x
        for table in (self.a_nbr, self.b_out, self.b_in):
            tr = table.get(r)
            to = table.pop(other, None)
            if to is None:
                continue
            if tr is None:
                table[r] = to
            elif self.uf[tr] != self.uf[to]:
                self.merges.append((tr, to))
        # an a-edge between the two merged classes becomes an a-loop
        for table in (self.a_nbr, self.b_out, self.b_in):
            if r in table:
                table[r] = self.uf[table[r]]
        # r may now sit at any position of a b²-path
        self.suspects.append(r)
        u = self._find(self.b_in.get(r))
        if u is not None:
            self.suspects.append(u)
            s = self._find(self.b_in.get(u))
            if s is not None:
                self.suspects.append(s)

    def _close_triangle(self, s: int) -> None:
        s = self.uf[s]
        q = self._find(self.b_out.get(s))
        if q is None or q == s:
            return
        r = self._find(self.b_out.get(q))
        if r is None:
            return
        t = self._find(self.b_out.get(r))
        if t is None:
            self.add_b(r, s)
        elif t != s:
            self.merges.append((t, s))

    def _run(self) -> None:
        while self.merges or self.suspects:
            while self.merges:
                self._merge(*self.merges.popleft())
            if self.suspects:
                self._close_triangle(self.suspects.popleft())

    # -----------------
    # Public API
    # -----------------
    def add_cycle(self, root: int, w: Word) -> None:
        """Glue a cycle labeled ``w`` at ``root``."""
        cur = root
        for i, x in enumerate(w.letters):
            nxt = root if i == len(w) - 1 else self._new_vertex()
            if x is Letter.A:
                self.add_a(cur, nxt)
            elif x is Letter.B:
                self.add_b(cur, nxt)
            else:
                self.add_b(nxt, cur)
            cur = nxt

    def build(self, gens: Sequence[Word]) -> ModularGraph:
        self._reset()
        words = [normalize(w) for w in gens]
        words = [w for w in words if len(w) > 0]
        if not words:
            self._log("no non-trivial generator, returning the trivial graph")
            return trivial_graph()

        root = self._new_vertex()
        for w in words:
            self.add_cycle(root, w)
            self._run()
        self._run()

        classes = sorted({self.uf[v] for v in range(1, self.next_vertex + 1)})
        alpha = {v: self.uf[self.a_nbr[v]] for v in classes if v in self.a_nbr}
        beta = {v: self.uf[self.b_out[v]] for v in classes if v in self.b_out}
        g = ModularGraph(classes, alpha, beta, root=self.uf[root])
        self._log(f"{len(words)} generator(s) folded into {g.n} vertices")
        return bfs_relabel(g)


def stallings_from_generators(gens: Iterable[Union[Word, str]], debug: bool = False) -> ModularGraph:
    """Rooted Stallings graph of ⟨gens⟩, labeled in BFS order from the root (root = 1)."""
    words = [Word.parse(w) if isinstance(w, str) else w for w in gens]
    return StallingsBuilder(debug=debug).build(words)


# ===================== Path reading =====================

def trace(g: ModularGraph, start: int, w: Word) -> Optional[int]:
    """Endpoint of the w-labeled path from ``start``, or None if a step is undefined."""
    v: Optional[int] = start
    for x in w.letters:
        if x is Letter.A:
            v = g.alpha.get(v)
        elif x is Letter.B:
            v = g.beta.get(v)
        else:
            v = g.beta_inv.get(v)
        if v is None:
            return None
    return v


def member(g: ModularGraph, w: Union[Word, str]) -> bool:
    if isinstance(w, str):
        w = Word.parse(w)
    if g.root is None:
        raise ValueError("membership needs a rooted graph")
    return trace(g, g.root, normalize(w)) == g.root


def trace_path(g: ModularGraph, start: int, w: Word) -> List[int]:
    """Vertices visited along ``w`` (stops early when a step is undefined)."""
    path = [start]
    for i in range(1, len(w) + 1):
        v = trace(g, path[-1], w[i - 1:i])
        if v is None:
            break
        path.append(v)
    return path
