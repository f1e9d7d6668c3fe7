# src/engine/oracle.py
from collections import Counter, defaultdict
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import orjson
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from src.engine.sampler import CountTables, shared_tables
from src.engine.silhouette import apply_move, find_moves, silhouette
from src.models.graph import (
    CombinatorialType,
    ModularGraph,
    PREFERRED_DELTA_2,
    combinatorial_type,
    complete,
    delta_1,
    relabel_normalize,
)
from src.models.moves import MoveKind, REGULAR_KINDS
from src.utils.config import get_settings
from src.utils.errors import InvalidInputError, OracleLimitError, PreconditionError, VerificationError
from src.utils.graph_io import encode
from src.utils.log import LogMixin

Fragment = Tuple[int, ...]


class EnumMode(str, Enum):
    CYCLICALLY_REDUCED = "cyclically-reduced"
    REDUCED_ROOTED = "reduced-rooted"
    SILHOUETTE = "silhouette"


# ===================== Fragments =====================
# 0-based arrays: alpha[i] = partner (i for an a-loop), beta[i] = image,
# -1 where undefined. At most one "gap" (uncovered point) in rooted mode.

def involutions(n: int, fixed_point_free: bool = False, allow_gap: bool = False) -> List[Fragment]:
    out: List[Fragment] = []
    cur = [-2] * n

    def rec(gap_used: bool) -> None:
        try:
            i = cur.index(-2)
        except ValueError:
            out.append(tuple(cur))
            return
        if not fixed_point_free:
            cur[i] = i
            rec(gap_used)
        for j in range(i + 1, n):
            if cur[j] == -2:
                cur[i], cur[j] = j, i
                rec(gap_used)
                cur[j] = -2
        if allow_gap and not gap_used:
            cur[i] = -1
            rec(True)
        cur[i] = -2

    rec(False)
    return out


def b_structures(n: int, triangles_only: bool = False, allow_gap: bool = False) -> List[Fragment]:
    out: List[Fragment] = []
    cur = [-1] * n
    done = [False] * n

    def rec(gap_used: bool) -> None:
        try:
            i = done.index(False)
        except ValueError:
            out.append(tuple(cur))
            return
        done[i] = True
        if not triangles_only:
            cur[i] = i
            rec(gap_used)
            cur[i] = -1
        free = [j for j in range(i + 1, n) if not done[j]]
        for j in free:
            done[j] = True
            if not triangles_only:
                cur[i] = j
                rec(gap_used)
                cur[i] = -1
                cur[j] = i
                rec(gap_used)
                cur[j] = -1
            for k in free:
                if k == j:
                    continue
                done[k] = True
                cur[i], cur[j], cur[k] = j, k, i
                rec(gap_used)
                cur[i] = cur[j] = cur[k] = -1
                done[k] = False
            done[j] = False
        if allow_gap and not gap_used:
            rec(True)
        done[i] = False

    rec(False)
    return out


def _alpha_key(a: Fragment) -> bytes:
    return orjson.dumps(sorted([v + 1, w + 1] for v, w in enumerate(a) if w >= v))


def _beta_key(b: Fragment) -> bytes:
    return orjson.dumps(sorted([v + 1, w + 1] for v, w in enumerate(b) if w >= 0))


def _gap(f: Fragment, beta: bool = False) -> Optional[int]:
    """The uncovered point of a fragment, if any."""
    if not beta:
        return f.index(-1) if -1 in f else None
    covered = set(i for i, w in enumerate(f) if w >= 0) | set(w for w in f if w >= 0)
    missing = [i for i in range(len(f)) if i not in covered]
    return missing[0] if missing else None


def fragments_connected(a: Fragment, b: Fragment) -> bool:
    n = len(a)
    adj: List[List[int]] = [[] for _ in range(n)]
    for v in range(n):
        for w in (a[v], b[v]):
            if w >= 0 and w != v:
                adj[v].append(w)
                adj[w].append(v)
    seen = [False] * n
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == n


def _graph(a: Fragment, b: Fragment, root: Optional[int] = None) -> ModularGraph:
    n = len(a)
    return ModularGraph(
        range(1, n + 1),
        {v + 1: w + 1 for v, w in enumerate(a) if w >= 0},
        {v + 1: w + 1 for v, w in enumerate(b) if w >= 0},
        None if root is None else root + 1,
    )


def ordered_fragments(n: int, mode: EnumMode) -> Tuple[List[Fragment], List[Fragment]]:
    """Alpha and beta fragments, each sorted by its JSON rendering; balanced
    JSON lists are never prefixes of one another, so the nested product runs
    in lexicographic order of the canonical graph encoding."""
    mode = EnumMode(mode)
    if mode is EnumMode.SILHOUETTE:
        alphas = involutions(n, fixed_point_free=True)
        betas = b_structures(n, triangles_only=True)
    else:
        gap = mode is EnumMode.REDUCED_ROOTED
        alphas = involutions(n, allow_gap=gap)
        betas = b_structures(n, allow_gap=gap)
    return sorted(alphas, key=_alpha_key), sorted(betas, key=_beta_key)


def iter_graphs(n: int, mode: EnumMode, alphas: Sequence[Fragment], betas: Sequence[Fragment]) -> Iterator[ModularGraph]:
    mode = EnumMode(mode)
    rooted = mode is EnumMode.REDUCED_ROOTED
    beta_gaps = [_gap(b, beta=True) for b in betas] if rooted else None
    for a in alphas:
        ga = _gap(a) if rooted else None
        for bi, b in enumerate(betas):
            if rooted:
                gb = beta_gaps[bi]
                if ga is not None and gb is not None and ga != gb:
                    continue
                if n == 1 and ga is not None and gb is not None:
                    continue  # the trivial graph
            if not fragments_connected(a, b):
                continue
            if not rooted:
                yield _graph(a, b)
                continue
            gap = ga if ga is not None else gb
            roots = [gap] if gap is not None else range(n)
            for r in sorted(roots, key=lambda x: str(x + 1)):
                yield _graph(a, b, r)


# ===================== Workers (top level for joblib) =====================

def _count_worker(n: int, mode: str, betas, alphas) -> int:
    return sum(1 for _ in iter_graphs(n, EnumMode(mode), alphas, betas))


def _uniformity_worker(n: int, mode: str, betas, alphas) -> Dict[Tuple, Counter]:
    tallies: Dict[Tuple, Counter] = defaultdict(Counter)
    rooted = EnumMode(mode) is EnumMode.REDUCED_ROOTED
    for g in iter_graphs(n, EnumMode(mode), alphas, betas):
        s = silhouette(g)
        if rooted:
            cls: Tuple = (n, combinatorial_type(complete(g)).loops, s.n)
        else:
            cls = (tuple(combinatorial_type(g)), s.n)
        tallies[cls][encode(s)] += 1
    return dict(tallies)


def _preimage_worker(n: int, betas, alphas) -> Tuple[Counter, set]:
    pairs: Counter = Counter()
    types = set()
    for g in iter_graphs(n, EnumMode.CYCLICALLY_REDUCED, alphas, betas):
        tau = tuple(combinatorial_type(g))
        types.add(tau)
        for m in find_moves(g):
            if m.kind is MoveKind.EXCEPTIONAL:
                continue
            pairs[(m.kind.value, tau, encode(relabel_normalize(apply_move(g, m))))] += 1
    return pairs, types


# ===================== Preimage formulas =====================

class PreimageCount(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: MoveKind
    tau: Tuple[int, int, int, int, int]
    pairs: int
    graphs: int
    divisor: int
    value: Fraction
    expected: Fraction

    @property
    def ok(self) -> bool:
        return self.value == self.expected

    def to_row(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "tau": "(" + ",".join(map(str, self.tau)) + ")",
            "pairs": self.pairs,
            "graphs": self.graphs,
            "divisor": self.divisor,
            "value": str(self.value),
            "expected": str(self.expected),
            "ok": self.ok,
        }


def preimage_precondition(kind: MoveKind, tau: CombinatorialType) -> Optional[str]:
    """The violated condition of the preimage statement, or None."""
    n, k2, k3, l2, l3 = tau
    if kind is MoveKind.LAMBDA_3:
        return None if n >= 2 and l3 > 0 else "n ≥ 2 and ℓ₃ > 0"
    if kind in (MoveKind.LAMBDA_21, MoveKind.LAMBDA_22):
        return None if n >= 3 and l2 > 0 else "n ≥ 3 and ℓ₂ > 0"
    if kind is MoveKind.KAPPA_3:
        return None if n >= 4 and l2 == 0 and k3 > 0 else "n ≥ 4, ℓ₂ = 0 and k₃ > 0"
    return "regular move kind"


def preimage_formula(kind: MoveKind, tau: CombinatorialType) -> Tuple[Fraction, int]:
    """(expected number of preimages, moves of the kind carried by each preimage)."""
    n, k2, k3, l2, l3 = tau
    if kind is MoveKind.LAMBDA_3:
        return Fraction(n * (l2 + 1), l3), l3
    if kind is MoveKind.LAMBDA_21:
        return Fraction(n * (k3 + 1), l2), l2
    if kind is MoveKind.LAMBDA_22:
        return Fraction(2 * n * (n - 1)), l2
    return Fraction(2 * n * (n - 1) * (k2 - 1), k3), k3


# ===================== Oracle =====================

class UniformityRow(BaseModel):
    mode: str
    n: int
    cls: str
    s: int
    fibers: int
    fiber_size: int


class UniformityReport(BaseModel):
    n: int
    rows: List[UniformityRow]

    def to_rows(self) -> List[Dict[str, Any]]:
        return [r.model_dump() for r in self.rows]


class ExhaustiveOracle(LogMixin):
    """
    Brute-force ground truth over all labeled graphs of a size. Work is split
    by alpha fragment (the first structural choice) across joblib workers and
    partial tallies are merged.
    """

    _log_prefix = "[Oracle]"

    def __init__(
        self,
        threads: Optional[int] = None,
        progress: bool = False,
        tables: Optional[CountTables] = None,
        debug: bool = False,
    ):
        settings = get_settings()
        self.threads = threads or settings.threads
        self.progress = progress
        self.debug = debug
        self.tables = tables or shared_tables()
        self.limits = {
            EnumMode.CYCLICALLY_REDUCED: settings.oracle_max_cyc,
            EnumMode.REDUCED_ROOTED: settings.oracle_max_rooted,
            EnumMode.SILHOUETTE: settings.oracle_max_silh,
        }
        self._by_type: Dict[int, Dict[Tuple, List[ModularGraph]]] = {}
        self._support: Dict[int, List[bytes]] = {}

    # -----------------
    # Limits and fan-out
    # -----------------
    def _estimate(self, n: int, mode: EnumMode) -> int:
        if mode is EnumMode.SILHOUETTE:
            fpf = 1
            for k in range(n - 1, 0, -2):
                fpf *= k
            return fpf
        a, b = self.tables.involutions(n), self.tables.b_structures(n)
        if mode is EnumMode.REDUCED_ROOTED:
            return (a + n * self.tables.involutions(n - 1)) * (b + n * self.tables.b_structures(n - 1))
        return a * b

    def check_limit(self, n: int, mode: EnumMode) -> None:
        mode = EnumMode(mode)
        if n < 1:
            raise InvalidInputError("graph size must be positive")
        if n > self.limits[mode]:
            raise OracleLimitError(n, self.limits[mode], self._estimate(n, mode))

    def _fan_out(self, worker: Callable, n: int, alphas: List[Fragment], *args) -> List[Any]:
        if not alphas:
            return []
        chunks = max(1, min(len(alphas), self.threads * 4))
        size = -(-len(alphas) // chunks)
        parts = [alphas[i:i + size] for i in range(0, len(alphas), size)]
        if self.threads > 1:
            jobs = Parallel(n_jobs=self.threads, return_as="generator")(
                delayed(worker)(n, *args, part) for part in parts
            )
        else:
            jobs = (worker(n, *args, part) for part in parts)
        return list(tqdm(jobs, total=len(parts), disable=not self.progress, desc=f"n={n}"))

    # -----------------
    # Enumeration
    # -----------------
    def enumerate_graphs(self, n: int, mode: EnumMode = EnumMode.CYCLICALLY_REDUCED) -> Iterator[ModularGraph]:
        """Every valid labeled graph of the mode once, in canonical JSON order."""
        mode = EnumMode(mode)
        self.check_limit(n, mode)
        if mode is EnumMode.SILHOUETTE:
            if n == 1:
                yield delta_1()
                return
            if n == 2:
                yield PREFERRED_DELTA_2
                return
            if n % 6:
                return
        alphas, betas = ordered_fragments(n, mode)
        yield from iter_graphs(n, mode, alphas, betas)

    def count_graphs(self, n: int, mode: EnumMode = EnumMode.CYCLICALLY_REDUCED) -> int:
        mode = EnumMode(mode)
        self.check_limit(n, mode)
        if mode is EnumMode.SILHOUETTE and (n <= 2 or n % 6):
            return sum(1 for _ in self.enumerate_graphs(n, mode))
        alphas, betas = ordered_fragments(n, mode)
        return sum(self._fan_out(_count_worker, n, alphas, mode.value, betas))

    def graphs_by_type(self, n: int) -> Dict[Tuple, List[ModularGraph]]:
        if n not in self._by_type:
            groups: Dict[Tuple, List[ModularGraph]] = defaultdict(list)
            for g in self.enumerate_graphs(n):
                groups[tuple(combinatorial_type(g))].append(g)
            self._by_type[n] = dict(groups)
        return self._by_type[n]

    # -----------------
    # Preimages
    # -----------------
    def count_move_preimages(self, delta_graph: ModularGraph, kind: MoveKind, tau: CombinatorialType) -> PreimageCount:
        kind = MoveKind(kind)
        tau = CombinatorialType(*tau)
        bad = preimage_precondition(kind, tau)
        if bad is not None:
            raise PreconditionError(bad)
        if tuple(combinatorial_type(delta_graph)) != tuple(tau.shifted(kind.delta)):
            raise PreconditionError("delta_graph has combinatorial type tau + delta(kind)")
        if not delta_graph.is_labeled:
            raise PreconditionError("delta_graph is labeled")
        target = encode(delta_graph.with_root(None))
        pairs = 0
        graphs = set()
        for g in self.graphs_by_type(tau.n).get(tuple(tau), []):
            for m in find_moves(g):
                if m.kind is kind and encode(relabel_normalize(apply_move(g, m))) == target:
                    pairs += 1
                    graphs.add(encode(g))
        expected, divisor = preimage_formula(kind, tau)
        return PreimageCount(
            kind=kind,
            tau=tuple(tau),
            pairs=pairs,
            graphs=len(graphs),
            divisor=divisor,
            value=Fraction(pairs, divisor),
            expected=expected,
        )

    def verify_preimages(self, n_max: int) -> List[Dict[str, Any]]:
        """Check every admissible (kind, τ, Δ) with τ.n ≤ n_max; one row per (kind, τ).

        Pairs (kind, τ) whose target type has no graph of that size are left out.
        """
        rows: List[Dict[str, Any]] = []
        failures: List[Dict[str, Any]] = []
        skipped = 0
        for n in range(2, n_max + 1):
            self.check_limit(n, EnumMode.CYCLICALLY_REDUCED)
            alphas, betas = ordered_fragments(n, EnumMode.CYCLICALLY_REDUCED)
            pairs: Counter = Counter()
            types: set = set()
            for part_pairs, part_types in self._fan_out(_preimage_worker, n, alphas, betas):
                pairs.update(part_pairs)
                types |= part_types
            for kind in REGULAR_KINDS:
                for tau in sorted(types):
                    ctau = CombinatorialType(*tau)
                    if preimage_precondition(kind, ctau) is not None:
                        continue
                    target_type = tuple(ctau.shifted(kind.delta))
                    deltas = self.graphs_by_type(n + kind.delta.dn).get(target_type, [])
                    if not deltas:
                        # target type not realized at this size
                        skipped += 1
                        continue
                    expected, divisor = preimage_formula(kind, ctau)
                    counts = [pairs.get((kind.value, tau, encode(d)), 0) for d in deltas]
                    bad = [c for c in counts if Fraction(c, divisor) != expected]
                    row = {
                        "kind": kind.value,
                        "tau": "(" + ",".join(map(str, tau)) + ")",
                        "delta_graphs": len(deltas),
                        "pairs": counts[0],
                        "divisor": divisor,
                        "expected": str(expected),
                        "ok": not bad,
                    }
                    rows.append(row)
                    if bad:
                        failures.append(row)
            self._log(f"preimages n={n}: {len(rows)} rows so far, {skipped} unrealized target type(s) skipped")
        if failures:
            raise VerificationError(
                f"{len(failures)} preimage count(s) differ from the formula", failures[0]
            )
        return rows

    # -----------------
    # Counts
    # -----------------
    def verify_counts(self, n_max: int, full_max: Optional[int] = None) -> List[Dict[str, Any]]:
        """A(n), B(n) against brute force; graph counts against the exponential
        formula (cyclically reduced) and against Σ (n + L) (rooted)."""
        full_max = min(n_max, full_max if full_max is not None else 7)
        rows: List[Dict[str, Any]] = []
        failures = []
        for n in range(1, n_max + 1):
            inv = len(involutions(n))
            bst = len(b_structures(n))
            row: Dict[str, Any] = {
                "n": n,
                "A": self.tables.involutions(n),
                "A_enumerated": inv,
                "B": self.tables.b_structures(n),
                "B_enumerated": bst,
                "connected": self.tables.connected(n),
                "cyclic_enumerated": None,
                "rooted_expected": None,
                "rooted_enumerated": None,
            }
            ok = row["A"] == inv and row["B"] == bst
            if n <= full_max:
                cyc = list(self.enumerate_graphs(n))
                row["cyclic_enumerated"] = len(cyc)
                ok = ok and len(cyc) == row["connected"]
                if n <= self.limits[EnumMode.REDUCED_ROOTED]:
                    expected = sum(n + combinatorial_type(g).loops for g in cyc)
                    row["rooted_expected"] = expected
                    row["rooted_enumerated"] = self.count_graphs(n, EnumMode.REDUCED_ROOTED)
                    ok = ok and expected == row["rooted_enumerated"]
            row["ok"] = ok
            rows.append(row)
            if not ok:
                failures.append(row)
        if failures:
            raise VerificationError("enumeration counts disagree with the count tables", failures[0])
        return rows

    # -----------------
    # Uniformity
    # -----------------
    def _uniformity_rows(self, n: int, mode: EnumMode, tallies: Dict[Tuple, Counter]) -> List[UniformityRow]:
        rows = []
        for cls in sorted(tallies):
            s = cls[-1]
            fibers = tallies[cls]
            if s not in self._support:
                self._support[s] = [encode(d) for d in self.enumerate_graphs(s, EnumMode.SILHOUETTE)]
            support = self._support[s]
            sizes = {key: fibers.get(key, 0) for key in support}
            stray = set(fibers) - set(sizes)
            if stray:
                raise VerificationError(f"silhouette outside the size-{s} silhouette set in class {cls}")
            distinct = sorted(set(sizes.values()))
            if len(distinct) > 1:
                lo = next(k for k, v in sizes.items() if v == distinct[0])
                hi = next(k for k, v in sizes.items() if v == distinct[-1])
                raise VerificationError(
                    f"unequal fibers in class {cls}: {distinct[0]} vs {distinct[-1]}",
                    {"delta": lo.decode(), "delta_prime": hi.decode()},
                )
            label = f"ell={cls[1]}" if mode is EnumMode.REDUCED_ROOTED else "tau=(" + ",".join(map(str, cls[0])) + ")"
            rows.append(
                UniformityRow(mode=mode.value, n=n, cls=label, s=s, fibers=len(support), fiber_size=distinct[0])
            )
        return rows

    def verify_uniformity(self, n: int, rooted: bool = True) -> UniformityReport:
        rows: List[UniformityRow] = []
        modes = [EnumMode.CYCLICALLY_REDUCED]
        if rooted and n <= self.limits[EnumMode.REDUCED_ROOTED]:
            modes.append(EnumMode.REDUCED_ROOTED)
        for mode in modes:
            self.check_limit(n, mode)
            alphas, betas = ordered_fragments(n, mode)
            tallies: Dict[Tuple, Counter] = defaultdict(Counter)
            for part in self._fan_out(_uniformity_worker, n, alphas, mode.value, betas):
                for cls, counter in part.items():
                    tallies[cls].update(counter)
            rows.extend(self._uniformity_rows(n, mode, tallies))
        return UniformityReport(n=n, rows=rows)


# ===================== Module-level shortcuts =====================

def enumerate_graphs(n: int, mode: EnumMode = EnumMode.CYCLICALLY_REDUCED) -> Iterator[ModularGraph]:
    return ExhaustiveOracle().enumerate_graphs(n, mode)


def count_move_preimages(delta_graph: ModularGraph, kind: MoveKind, tau: CombinatorialType) -> PreimageCount:
    return ExhaustiveOracle().count_move_preimages(delta_graph, kind, tau)


def verify_uniformity(n: int, rooted: bool = True) -> UniformityReport:
    return ExhaustiveOracle().verify_uniformity(n, rooted)
