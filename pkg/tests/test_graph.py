# tests/test_graph.py
import pytest

from src.models.graph import (
    CombinatorialType,
    GraphMode,
    ModularGraph,
    PREFERRED_DELTA_2,
    bfs_relabel,
    canonical_form,
    check,
    combinatorial_type,
    complete,
    delta_1,
    delta_2,
    delta_3,
    delta_4,
    first_violation,
    is_isomorphic,
    relabel,
    relabel_normalize,
    trivial_graph,
    validate,
)
from src.utils.errors import InvalidGraphError


class TestConstruction:
    def test_labels_must_be_positive(self):
        with pytest.raises(InvalidGraphError):
            ModularGraph([0, 1], {}, {})

    def test_edges_stay_inside(self):
        with pytest.raises(InvalidGraphError) as exc:
            ModularGraph.from_pairs(2, [(1, 3)], [])
        assert exc.value.invariant == "well-formed"

    def test_root_is_a_vertex(self):
        with pytest.raises(InvalidGraphError):
            ModularGraph.from_pairs(2, [(1, 2)], [(1, 2)], root=5)

    def test_labeled_flags(self, quasi_silhouette_l, silhouette_l):
        assert silhouette_l.is_labeled
        assert quasi_silhouette_l.is_weakly_labeled
        assert "labels" in quasi_silhouette_l.to_dict()
        assert "labels" not in silhouette_l.to_dict()

    def test_canonical_dict(self, graph_k):
        assert graph_k.to_dict() == {
            "n": 6,
            "alpha": [[1, 4], [2, 6], [3, 5]],
            "beta": [[1, 2], [2, 3], [3, 1], [4, 5], [6, 6]],
            "root": 1,
        }


class TestInvariants:
    def test_two_chain_beta(self):
        g = ModularGraph.from_pairs(3, [(1, 1), (2, 2), (3, 3)], [(1, 2), (2, 3)])
        assert first_violation(g, GraphMode.CYCLICALLY_REDUCED) == ("triangle-closure", 3)
        with pytest.raises(InvalidGraphError) as exc:
            check(g)
        assert exc.value.to_dict()["invariant"] == "triangle-closure"

    def test_beta_of_order_two(self):
        g = ModularGraph.from_pairs(2, [(1, 2)], [(1, 2), (2, 1)])
        assert first_violation(g)[0] == "beta-order-3"

    def test_beta_not_injective(self):
        g = ModularGraph([1, 2, 3], {1: 2, 2: 1, 3: 3}, {1: 3, 2: 3})
        assert first_violation(g)[0] == "beta-injective"

    def test_alpha_not_involution(self):
        g = ModularGraph([1, 2], {1: 2}, {1: 2})
        assert first_violation(g) == ("alpha-involution", 1)

    def test_disconnected(self):
        g = ModularGraph.from_pairs(2, [(1, 1), (2, 2)], [(1, 1), (2, 2)])
        assert first_violation(g)[0] == "connected"

    def test_root_is_exempt_only_when_reduced(self):
        g = ModularGraph.from_pairs(2, [(1, 2)], [(2, 2)], root=1)
        assert validate(g, GraphMode.REDUCED)
        assert first_violation(g, GraphMode.CYCLICALLY_REDUCED) == ("b-coverage", 1)
        assert first_violation(g.with_root(2), GraphMode.REDUCED) == ("b-coverage", 1)

    def test_trivial_graph_is_reduced(self):
        assert validate(trivial_graph(), GraphMode.REDUCED)
        assert not validate(trivial_graph(), GraphMode.CYCLICALLY_REDUCED)

    def test_silhouette_shapes(self, graph_h, graph_k):
        for g in (delta_1(), PREFERRED_DELTA_2, graph_h.with_root(None)):
            assert validate(g, GraphMode.SILHOUETTE)
        assert first_violation(graph_k.with_root(None), GraphMode.SILHOUETTE) == ("silhouette-type", None)
        assert first_violation(delta_4(), GraphMode.SILHOUETTE) == ("silhouette-type", None)
        assert first_violation(delta_3(), GraphMode.SILHOUETTE) == ("silhouette-type", None)


class TestCombinatorialType:
    def test_figure_graphs(self, graph_h, graph_k, graph_l):
        assert combinatorial_type(graph_h) == (6, 3, 0, 0, 0)
        assert combinatorial_type(graph_k) == (6, 3, 1, 0, 1)
        assert combinatorial_type(graph_l) == (13, 6, 0, 1, 1)

    def test_small_graphs(self):
        assert combinatorial_type(delta_1()) == (1, 0, 0, 1, 1)
        assert combinatorial_type(PREFERRED_DELTA_2) == (2, 1, 1, 0, 0)
        assert combinatorial_type(delta_3()) == (2, 0, 1, 2, 0)
        assert combinatorial_type(delta_4()) == (2, 1, 0, 0, 2)

    def test_consistency(self):
        assert CombinatorialType(6, 3, 0, 0, 0).is_consistent()
        assert not CombinatorialType(6, 3, 1, 0, 0).is_consistent()
        assert CombinatorialType(2, 1, 0, 0, 1).is_consistent(rooted=True)
        assert not CombinatorialType(2, 1, 0, 0, 1).is_consistent()
        assert not CombinatorialType(3, 2, 0, 0, 0).is_consistent()

    def test_shift(self):
        t = CombinatorialType(3, 1, 1, 1, 1)
        assert t.shifted(CombinatorialType(1, 0, 0, 1, 1).minus(t)) == (1, 0, 0, 1, 1)
        assert t.loops == 2


class TestCompletion:
    def test_adds_missing_loops(self):
        g = trivial_graph()
        c = complete(g)
        assert c == delta_1().with_root(1)
        assert combinatorial_type(c).loops == 2

    def test_covered_root_is_unchanged(self, graph_h):
        assert complete(graph_h) is graph_h

    def test_needs_root(self):
        with pytest.raises(InvalidGraphError):
            complete(delta_1())


class TestRelabeling:
    def test_normalize_is_order_preserving(self, quasi_silhouette_l, silhouette_l):
        assert relabel_normalize(quasi_silhouette_l) == silhouette_l

    def test_isomorphism_ignores_labels(self, graph_l):
        perm = {v: 14 - v for v in graph_l.vertices}
        moved = relabel(graph_l, perm)
        assert moved != graph_l
        assert is_isomorphic(moved, graph_l, rooted=True)
        assert canonical_form(moved) == canonical_form(graph_l)

    def test_unrooted_isomorphism(self):
        assert delta_2(2, 1) != PREFERRED_DELTA_2
        assert is_isomorphic(delta_2(2, 1), PREFERRED_DELTA_2)
        assert not is_isomorphic(delta_3(), delta_4())

    def test_bfs_relabel_puts_root_first(self, graph_k):
        g = bfs_relabel(graph_k.with_root(6))
        assert g.root == 1
        assert is_isomorphic(g, graph_k.with_root(6), rooted=True)
