# src/engine/sampler.py
import random
from functools import lru_cache
from math import comb
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from src.models.graph import GraphMode, ModularGraph, combinatorial_type
from src.utils.config import get_settings
from src.utils.errors import InvalidInputError
from src.utils.log import LogMixin
from src.utils.seeds import make_generators


# ===================== Count tables =====================

class CountTables:
    """
    A(n): involutions of [n];  B(n): b-structures of [n] (loops, directed
    isolated edges, directed triangles). Exact big integers up to
    ``exact_max``; above it the samplers use long double ratio tables
    ra[m] = A(m-1)/A(m) and rb[m] = B(m-1)/B(m).
    """

    def __init__(self, exact_max: Optional[int] = None):
        self.exact_max = exact_max if exact_max is not None else get_settings().exact_table_max
        self.A: List[int] = [1, 1]
        self.B: List[int] = [1, 1]
        self._ra = np.ones(2, dtype=np.longdouble)
        self._rb = np.ones(2, dtype=np.longdouble)
        self._connected: List[int] = [0]

    def is_exact(self, n: int) -> bool:
        return n <= self.exact_max

    def ensure(self, n: int) -> None:
        top = min(n, self.exact_max)
        A, B = self.A, self.B
        for m in range(len(A), top + 1):
            A.append(A[m - 1] + (m - 1) * A[m - 2])
        for m in range(len(B), top + 1):
            b3 = B[m - 3] if m >= 3 else 0
            B.append(B[m - 1] + 2 * (m - 1) * B[m - 2] + (m - 1) * (m - 2) * b3)

    def involutions(self, n: int) -> int:
        if n > self.exact_max:
            raise InvalidInputError(f"A({n}) is above the exact table limit {self.exact_max}")
        self.ensure(n)
        return self.A[n]

    def b_structures(self, n: int) -> int:
        if n > self.exact_max:
            raise InvalidInputError(f"B({n}) is above the exact table limit {self.exact_max}")
        self.ensure(n)
        return self.B[n]

    def ratios(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        old = len(self._ra)
        if n >= old:
            ra = np.concatenate([self._ra, np.empty(n + 1 - old, dtype=np.longdouble)])
            rb = np.concatenate([self._rb, np.empty(n + 1 - old, dtype=np.longdouble)])
            one = np.longdouble(1)
            for m in range(old, n + 1):
                ra[m] = one / (one + (m - 1) * ra[m - 1])
                rb[m] = one / (one + 2 * (m - 1) * rb[m - 1] + (m - 1) * (m - 2) * rb[m - 1] * rb[m - 2])
            self._ra, self._rb = ra, rb
        return self._ra, self._rb

    def connected(self, n: int) -> int:
        """Connected (alpha, beta) pairs on [n], by the exponential formula
        T(n) = Σ_k C(n-1, k-1)·C(k)·T(n-k) with T(n) = A(n)·B(n)."""
        self.ensure(n)
        C = self._connected
        for m in range(len(C), n + 1):
            total = self.A[m] * self.B[m]
            rest = sum(comb(m - 1, k - 1) * C[k] * self.A[m - k] * self.B[m - k] for k in range(1, m))
            C.append(total - rest)
        return C[n]


@lru_cache(maxsize=1)
def shared_tables() -> CountTables:
    return CountTables()


def connected_count(n: int) -> int:
    return shared_tables().connected(n)


def involution_count(n: int) -> int:
    return shared_tables().involutions(n)


def b_structure_count(n: int) -> int:
    return shared_tables().b_structures(n)


# ===================== Array helpers =====================

def arrays_connected(alpha: np.ndarray, beta: np.ndarray) -> bool:
    """Connectivity of the union of a- and b-edges (0-based arrays, -1 = none)."""
    n = len(alpha)
    if n <= 1:
        return True
    idx = np.arange(n)
    ok_a = alpha >= 0
    ok_b = beta >= 0
    rows = np.concatenate([idx[ok_a], idx[ok_b]])
    cols = np.concatenate([alpha[ok_a], beta[ok_b]])
    m = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    ncomp, _ = connected_components(m, directed=True, connection="weak")
    return ncomp == 1


def graph_from_arrays(alpha: np.ndarray, beta: np.ndarray, root: Optional[int] = None) -> ModularGraph:
    a = {i + 1: int(w) + 1 for i, w in enumerate(alpha.tolist()) if w >= 0}
    b = {i + 1: int(w) + 1 for i, w in enumerate(beta.tolist()) if w >= 0}
    return ModularGraph(range(1, len(alpha) + 1), a, b, root)


# ===================== Sampler =====================

class GraphSampler(LogMixin):
    """
    Uniform generators for labeled graphs, seeded from (master seed, key path).

    Structures are grown by the recursive method: the largest remaining
    point becomes a loop, an edge or a triangle with probability proportional
    to the corresponding recurrence term. Connectivity is then enforced by
    rejection.
    """

    _log_prefix = "[Sampler]"

    def __init__(self, seed: int, *key: int, tables: Optional[CountTables] = None, debug: bool = False):
        self.debug = debug
        self.np_rng, self.rand = make_generators(seed, *key)
        self.tables = tables if tables is not None else shared_tables()
        self.approximate = False
        self.rejections = 0

    # -----------------
    # Raw structures
    # -----------------
    def draw_involution(self, n: int) -> np.ndarray:
        exact = self.tables.is_exact(n)
        if exact:
            self.tables.ensure(n)
            A = self.tables.A
        else:
            self.approximate = True
            ra, _ = self.tables.ratios(n)
        rand = self.rand
        out = np.full(n, -1, dtype=np.int64)
        rest = list(range(n))
        while rest:
            m = len(rest)
            x = rest.pop()
            fixed = rand.randrange(A[m]) < A[m - 1] if exact else rand.random() < ra[m]
            if fixed:
                out[x] = x
                continue
            j = rand.randrange(m - 1)
            y = rest[j]
            rest[j] = rest[-1]
            rest.pop()
            out[x], out[y] = y, x
        return out

    def draw_b_structure(self, n: int) -> np.ndarray:
        exact = self.tables.is_exact(n)
        if exact:
            self.tables.ensure(n)
            B = self.tables.B
        else:
            self.approximate = True
            _, rb = self.tables.ratios(n)
        rand = self.rand
        out = np.full(n, -1, dtype=np.int64)
        rest = list(range(n))
        while rest:
            m = len(rest)
            x = rest.pop()
            if exact:
                r = rand.randrange(B[m])
                loop_w = B[m - 1]
                edge_w = 2 * (m - 1) * B[m - 2] if m >= 2 else 0
            else:
                r = rand.random()
                loop_w = rb[m]
                edge_w = 2 * (m - 1) * rb[m] * rb[m - 1] if m >= 2 else 0
            if r < loop_w:
                out[x] = x
                continue
            j = rand.randrange(m - 1)
            y = rest[j]
            rest[j] = rest[-1]
            rest.pop()
            if r < loop_w + edge_w or m < 3:
                if rand.random() < 0.5:
                    out[x] = y
                else:
                    out[y] = x
                continue
            k = rand.randrange(m - 2)
            z = rest[k]
            rest[k] = rest[-1]
            rest.pop()
            out[x], out[y], out[z] = y, z, x
        return out

    def draw_fixpoint_free_involution(self, n: int) -> np.ndarray:
        perm = self.np_rng.permutation(n)
        out = np.empty(n, dtype=np.int64)
        x, y = perm[0::2], perm[1::2]
        out[x], out[y] = y, x
        return out

    def draw_triangle_structure(self, n: int) -> np.ndarray:
        t = self.np_rng.permutation(n).reshape(-1, 3)
        out = np.empty(n, dtype=np.int64)
        out[t[:, 0]], out[t[:, 1]], out[t[:, 2]] = t[:, 1], t[:, 2], t[:, 0]
        return out

    # -----------------
    # Samplers
    # -----------------
    def sample_cyclically_reduced(self, n: int) -> ModularGraph:
        if n < 1:
            raise InvalidInputError("graph size must be positive")
        while True:
            alpha = self.draw_involution(n)
            beta = self.draw_b_structure(n)
            if arrays_connected(alpha, beta):
                return graph_from_arrays(alpha, beta)
            self.rejections += 1

    def sample_reduced_rooted(self, n: int) -> ModularGraph:
        """Uniform rooted reduced graph of size ``n`` (the trivial graph excluded)."""
        if n < 2:
            raise InvalidInputError("rooted sampling needs n ≥ 2")
        rand = self.rand
        while True:
            g = self.sample_cyclically_reduced(n)
            a_loops = sorted(v for v, w in g.alpha.items() if v == w)
            b_loops = sorted(v for v, w in g.beta.items() if v == w)
            variants = n + len(a_loops) + len(b_loops)
            if rand.randrange(2 * n) >= variants:
                self.rejections += 1
                continue
            i = rand.randrange(variants)
            if i < n:
                return g.with_root(g.vertices[i])
            i -= n
            alpha, beta = dict(g.alpha), dict(g.beta)
            if i < len(a_loops):
                v = a_loops[i]
                del alpha[v]
            else:
                v = b_loops[i - len(a_loops)]
                del beta[v]
            return ModularGraph(g.vertices, alpha, beta, root=v)

    def sample_silhouette_pair(self, n: int) -> Tuple[np.ndarray, np.ndarray, bool]:
        """One (σ₂, σ₃) draw and whether its union is connected."""
        if n <= 0 or n % 6:
            raise InvalidInputError(f"silhouette size must be a positive multiple of 6, got {n}")
        alpha = self.draw_fixpoint_free_involution(n)
        beta = self.draw_triangle_structure(n)
        return alpha, beta, arrays_connected(alpha, beta)

    def sample_silhouette(self, n: int) -> ModularGraph:
        while True:
            alpha, beta, ok = self.sample_silhouette_pair(n)
            if ok:
                return graph_from_arrays(alpha, beta)
            self.rejections += 1

    def sample(self, mode: str, n: int) -> ModularGraph:
        if mode in ("cyc", GraphMode.CYCLICALLY_REDUCED.value):
            return self.sample_cyclically_reduced(n)
        if mode in ("rooted", "reduced-rooted"):
            return self.sample_reduced_rooted(n)
        if mode in ("silh", GraphMode.SILHOUETTE.value):
            return self.sample_silhouette(n)
        raise InvalidInputError(f"unknown sampling mode {mode!r}")


def sample_cyclically_reduced(n: int, seed: int) -> ModularGraph:
    return GraphSampler(seed).sample_cyclically_reduced(n)


def sample_reduced_rooted(n: int, seed: int) -> ModularGraph:
    return GraphSampler(seed).sample_reduced_rooted(n)


def sample_silhouette(n: int, seed: int) -> ModularGraph:
    return GraphSampler(seed).sample_silhouette(n)


def loop_count(g: ModularGraph) -> int:
    return combinatorial_type(g).loops
