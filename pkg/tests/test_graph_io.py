# tests/test_graph_io.py
import pytest

from src.utils.errors import InvalidGraphError
from src.utils.graph_io import decode, encode, encode_str, from_dot, parse_graph, read_graph, to_dot, write_graph


class TestJson:
    def test_canonical_bytes(self, graph_h):
        assert encode_str(graph_h) == (
            '{"n":6,"alpha":[[1,4],[2,3],[5,6]],'
            '"beta":[[1,5],[2,1],[3,4],[4,6],[5,2],[6,3]],"root":1}'
        )

    def test_decode_keeps_weak_labels(self, quasi_silhouette_l):
        back = decode(encode(quasi_silhouette_l))
        assert back == quasi_silhouette_l
        assert back.vertices == (3, 4, 9, 10, 12, 13)

    def test_file_roundtrip(self, tmp_path, graph_l):
        path = tmp_path / "l.json"
        write_graph(graph_l, path)
        assert read_graph(path) == graph_l

    @pytest.mark.parametrize(
        "raw",
        [
            b"not json",
            b"[1, 2]",
            b'{"alpha": []}',
            b'{"n": 2, "alpha": [[1, 2], [2, 2]], "beta": []}',
            b'{"n": 2, "labels": [1], "alpha": [], "beta": []}',
        ],
    )
    def test_malformed(self, raw):
        with pytest.raises(InvalidGraphError):
            decode(raw)


class TestDot:
    def test_export_styles(self, graph_k):
        text = to_dot(graph_k)
        assert "1 [shape=doublecircle];" in text
        assert '1 -> 4 [label="a", dir=none];' in text
        assert '6 -> 6 [label="b"];' in text

    def test_import_what_we_export(self, graph_k, quasi_silhouette_l):
        assert from_dot(to_dot(graph_k)) == graph_k
        assert parse_graph(to_dot(quasi_silhouette_l)) == quasi_silhouette_l

    def test_empty_dot(self):
        with pytest.raises(InvalidGraphError):
            from_dot("digraph G {\n}\n")
