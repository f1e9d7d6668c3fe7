# tests/test_silhouette.py
import random

import pytest
from hypothesis import given, settings, strategies as st

from src.engine.sampler import GraphSampler
from src.engine.silhouette import (
    apply_move,
    deletion_bound,
    find_moves,
    quasi_silhouette,
    rewrite_randomly,
    silhouette,
    silhouette_trace,
)
from src.engine.stallings import stallings_from_generators
from src.models.graph import (
    GraphMode,
    ModularGraph,
    PREFERRED_DELTA_2,
    combinatorial_type,
    delta_1,
    delta_2,
    delta_3,
    delta_4,
    is_isomorphic,
    relabel,
    relabel_normalize,
    validate,
)
from src.models.moves import MoveKind, MoveRecord
from src.utils.errors import InvalidGraphError, MoveNotApplicableError


class TestFigureGraphs:
    def test_k_collapses_to_preferred_delta_2(self, graph_k):
        assert silhouette(graph_k) == PREFERRED_DELTA_2

    def test_l_quasi_silhouette(self, graph_l, quasi_silhouette_l):
        assert quasi_silhouette(graph_l) == quasi_silhouette_l

    def test_l_silhouette(self, graph_l, silhouette_l):
        assert silhouette(graph_l) == silhouette_l

    def test_l_trace(self, graph_l):
        s, moves = silhouette_trace(graph_l)
        assert [(m.kind, m.pivots) for m in moves] == [
            (MoveKind.LAMBDA_3, (7,)),
            (MoveKind.LAMBDA_21, (1,)),
            (MoveKind.LAMBDA_21, (6,)),
            (MoveKind.KAPPA_3, (2, 11)),
            (MoveKind.KAPPA_3, (5, 8)),
        ]
        t = combinatorial_type(graph_l)
        for m in moves:
            t = t.shifted(m.delta)
        assert t == combinatorial_type(s)

    def test_silhouette_graph_is_a_fixpoint(self, graph_h):
        g = graph_h.with_root(None)
        assert find_moves(g) == []
        assert silhouette(g) == g

    def test_stallings_input(self):
        s = silhouette(stallings_from_generators(["a", "bababab", "baBabaBab", "baBaBabaBaBab"]))
        assert validate(s, GraphMode.SILHOUETTE)
        assert s.n == 6


class TestExceptionalMoves:
    def test_misplaced_delta_1(self):
        _, moves = silhouette_trace(delta_1(5))
        assert silhouette(delta_1(5)) == delta_1()
        assert moves[-1].kind is MoveKind.EXCEPTIONAL

    def test_delta_3(self):
        assert silhouette(delta_3()) == delta_1()
        assert silhouette(delta_3(2, 1)) == delta_1()

    def test_other_delta_2_labeling(self):
        s, moves = silhouette_trace(delta_2(2, 1))
        assert s == PREFERRED_DELTA_2
        assert [m.kind for m in moves] == [MoveKind.EXCEPTIONAL]
        assert tuple(moves[0].delta) == (0, 0, 0, 0, 0)

    def test_preferred_delta_2_is_fixed(self):
        assert find_moves(PREFERRED_DELTA_2) == []

    def test_delta_4(self):
        s, moves = silhouette_trace(delta_4())
        assert s == delta_1()
        assert [m.kind for m in moves] == [MoveKind.LAMBDA_3, MoveKind.EXCEPTIONAL]


class TestMoves:
    def test_lambda_3_on_k(self, graph_k):
        g = graph_k.with_root(None)
        lambda_3 = [m for m in find_moves(g) if m.kind is MoveKind.LAMBDA_3]
        assert lambda_3 == [MoveRecord.regular(MoveKind.LAMBDA_3, 6)]
        out = apply_move(g, lambda_3[0])
        # b-loop at 6 gone, a-loop left at 2
        assert out == ModularGraph.from_pairs(
            [1, 2, 3, 4, 5], [(1, 4), (5, 3), (2, 2)], [(1, 2), (2, 3), (3, 1), (4, 5)]
        )
        assert tuple(combinatorial_type(out)) == (5, 2, 1, 1, 0)

    def test_kappa_3_on_alternating_octagon(self):
        # a-edges and isolated b-edges alternate around one 8-cycle
        g = ModularGraph.from_pairs(8, [(1, 2), (3, 4), (5, 6), (7, 8)], [(1, 3), (2, 5), (4, 7), (6, 8)])
        assert tuple(combinatorial_type(g)) == (8, 4, 4, 0, 0)
        assert [(m.kind, m.pivots) for m in find_moves(g)] == [
            (MoveKind.KAPPA_3, (1, 3)),
            (MoveKind.KAPPA_3, (2, 5)),
            (MoveKind.KAPPA_3, (4, 7)),
            (MoveKind.KAPPA_3, (6, 8)),
        ]
        out = apply_move(g, MoveRecord.regular(MoveKind.KAPPA_3, 1, 3))
        assert out == ModularGraph.from_pairs(
            [2, 4, 5, 6, 7, 8], [(2, 4), (5, 6), (7, 8)], [(2, 5), (4, 7), (6, 8)]
        )
        assert tuple(combinatorial_type(out)) == (6, 3, 3, 0, 0)
        assert validate(relabel_normalize(out), GraphMode.CYCLICALLY_REDUCED)

    def test_lambda_22(self):
        # a-loop at 1, isolated b-edge 1→2, a-edge 2–3, b-loop at 3
        g = ModularGraph.from_pairs(3, [(1, 1), (2, 3)], [(1, 2), (3, 3)])
        kinds = {m.kind for m in find_moves(g)}
        assert MoveKind.LAMBDA_22 in kinds
        out = apply_move(g, MoveRecord.regular(MoveKind.LAMBDA_22, 1, 2))
        assert out == delta_1(3)

    def test_not_applicable(self, graph_k):
        with pytest.raises(MoveNotApplicableError):
            apply_move(graph_k.with_root(None), MoveRecord.regular(MoveKind.LAMBDA_3, 1))
        with pytest.raises(MoveNotApplicableError):
            apply_move(graph_k.with_root(None), MoveRecord.regular(MoveKind.KAPPA_3, 5, 4))

    def test_record_checks_delta(self):
        with pytest.raises(ValueError):
            MoveRecord(kind=MoveKind.LAMBDA_3, pivots=(1,), delta=(0, 0, 0, 0, 0))
        with pytest.raises(ValueError):
            MoveRecord.regular(MoveKind.KAPPA_3, 1)

    def test_rejects_non_reduced_input(self):
        g = ModularGraph.from_pairs(3, [(1, 1), (2, 2), (3, 3)], [(1, 2), (2, 3)])
        with pytest.raises(InvalidGraphError):
            silhouette(g)


def _sampled(n: int, i: int) -> ModularGraph:
    return GraphSampler(7, n, 0, i).sample_cyclically_reduced(n)


class TestConfluence:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(6, 30), st.integers(0, 10**6), st.integers(0, 10**6))
    def test_random_orders_agree(self, n, i, order_seed):
        g = _sampled(n, i)
        expected = silhouette(g)
        got = relabel_normalize(rewrite_randomly(g, random.Random(order_seed)))
        assert got == expected

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 40), st.integers(0, 10**6))
    def test_size_and_shape(self, n, i):
        g = _sampled(n, i)
        s = silhouette(g, debug=True)
        assert validate(s, GraphMode.SILHOUETTE)
        assert s.n in (1, 2) or s.n % 6 == 0
        assert g.n - s.n <= deletion_bound(g)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 12), st.integers(0, 10**6))
    def test_rooted_graphs_are_completed(self, n, i):
        g = GraphSampler(11, n, 1, i).sample_reduced_rooted(n)
        s = silhouette(g)
        assert validate(s, GraphMode.SILHOUETTE)

    @pytest.mark.slow
    def test_full_grid(self):
        for n in range(6, 31):
            for i in range(100):
                g = _sampled(n, i)
                expected = silhouette(g)
                for k in range(10):
                    rng = random.Random(n * 10**6 + i * 10 + k)
                    assert relabel_normalize(rewrite_randomly(g, rng)) == expected


class TestRelabeledInput:
    def test_silhouette_follows_the_relabeling(self, graph_l, silhouette_l):
        perm = {v: 14 - v for v in graph_l.vertices}
        other = silhouette(relabel(graph_l, perm))
        assert is_isomorphic(other, silhouette_l)
