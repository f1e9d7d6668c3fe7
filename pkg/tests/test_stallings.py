# tests/test_stallings.py
import pytest
from hypothesis import given, settings, strategies as st

from src.engine.stallings import StallingsBuilder, member, stallings_from_generators, trace, trace_path
from src.models.graph import GraphMode, combinatorial_type, is_isomorphic, trivial_graph, validate
from src.models.word import Word

H_GENS = ["abaB", "babab"]
K_GENS = ["abab", "babaB"]
L_GENS = ["a", "bababab", "baBabaBab", "baBaBabaBaBab"]
generator_lists = st.lists(st.text(alphabet="abB", min_size=1, max_size=12), min_size=1, max_size=3)


class TestFigureGraphs:
    def test_h(self, graph_h):
        g = stallings_from_generators(H_GENS)
        assert g.n == 6
        assert g.root == 1
        assert combinatorial_type(g) == (6, 3, 0, 0, 0)
        assert is_isomorphic(g, graph_h, rooted=True)

    def test_k(self, graph_k):
        g = stallings_from_generators(K_GENS)
        assert combinatorial_type(g) == (6, 3, 1, 0, 1)
        assert is_isomorphic(g, graph_k, rooted=True)

    def test_l(self, graph_l):
        g = stallings_from_generators(L_GENS)
        assert g.n == 13
        t = combinatorial_type(g)
        assert (t.l2, t.l3) == (1, 1)
        assert is_isomorphic(g, graph_l, rooted=True)

    def test_generators_are_members(self, graph_h, graph_k, graph_l):
        for g, gens in ((graph_h, H_GENS), (graph_k, K_GENS), (graph_l, L_GENS)):
            for w in gens:
                assert member(g, w)

    def test_non_members(self, graph_h):
        assert not member(graph_h, "a")
        assert not member(graph_h, "b")


class TestDegenerate:
    @pytest.mark.parametrize("gens", [[""], ["aa"], ["bbb", "bB"], []])
    def test_trivial_subgroup(self, gens):
        assert stallings_from_generators(gens) == trivial_graph()

    def test_whole_group(self):
        g = stallings_from_generators(["a", "b"])
        assert g.n == 1
        assert g.alpha == {1: 1} and g.beta == {1: 1}

    def test_order_two_subgroup(self):
        g = stallings_from_generators(["a"])
        assert g.n == 1 and g.alpha == {1: 1} and g.beta == {}
        assert validate(g, GraphMode.REDUCED)

    def test_unnormalized_generators(self):
        assert stallings_from_generators(["abbba" + "ab"]) == stallings_from_generators(["ab"])

    def test_builder_is_reusable(self):
        builder = StallingsBuilder()
        first = builder.build([Word.parse("ab")])
        builder.build([Word.parse("babab")])
        assert builder.build([Word.parse("ab")]) == first


class TestPaths:
    def test_trace(self, graph_k):
        assert trace(graph_k, 1, Word.parse("abab")) == 1
        assert trace(graph_k, 4, Word.parse("a")) == 1
        assert trace(graph_k, 4, Word.parse("B")) is None

    def test_trace_path_stops_early(self, graph_k):
        assert trace_path(graph_k, 1, Word.parse("abB")) == [1, 4, 5, 4]
        assert trace_path(graph_k, 4, Word.parse("Bab")) == [4]


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(generator_lists)
    def test_output_is_reduced_and_contains_generators(self, raw):
        g = stallings_from_generators(raw)
        assert validate(g, GraphMode.REDUCED)
        assert g.root == 1
        for w in raw:
            assert member(g, w)
            assert member(g, ~Word.parse(w))

    @settings(max_examples=40, deadline=None)
    @given(generator_lists)
    def test_closed_under_products(self, raw):
        g = stallings_from_generators(raw)
        words = [Word.parse(w) for w in raw]
        for u in words:
            for v in words:
                assert member(g, u * v)

    @settings(max_examples=40, deadline=None)
    @given(generator_lists, st.permutations(range(3)))
    def test_generator_order_does_not_matter(self, raw, perm):
        shuffled = [raw[i] for i in perm if i < len(raw)]
        assert is_isomorphic(
            stallings_from_generators(raw), stallings_from_generators(shuffled), rooted=True
        )
