# tests/test_cli.py
import orjson
import pytest
from typer.testing import CliRunner

from src.main import app, dispatch
from src.models.graph import PREFERRED_DELTA_2, GraphMode, validate
from src.utils.config import get_settings
from src.utils.graph_io import decode, read_graph, write_graph

runner = CliRunner()


@pytest.fixture
def k_file(tmp_path, graph_k):
    path = tmp_path / "k.json"
    write_graph(graph_k, path)
    return str(path)


class TestStallings:
    def test_json(self):
        result = runner.invoke(app, ["stallings", "--gens", "abaB,babab"])
        assert result.exit_code == 0
        out = orjson.loads(result.stdout)
        assert out["n"] == 6
        assert out["root"] == 1

    def test_dot_to_file(self, tmp_path):
        target = tmp_path / "h.dot"
        result = runner.invoke(app, ["stallings", "--gens", "abab,babaB", "--dot", "--out", str(target)])
        assert result.exit_code == 0
        assert target.read_text().startswith("digraph")

    def test_bad_word(self):
        result = runner.invoke(app, ["stallings", "--gens", "abc"])
        assert result.exit_code == 1
        assert orjson.loads(result.stderr)["success"] is False


class TestCheck:
    def test_valid_with_properties(self, k_file):
        result = runner.invoke(app, ["check", "--in", k_file, "--props", "free,parabolic"])
        assert result.exit_code == 0
        out = orjson.loads(result.stdout)
        assert out["valid"] is True
        assert out["free"] is False
        assert out["parabolic"] is True

    def test_broken_triangle(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 2, "alpha": [[1, 2]], "beta": [[1, 2], [2, 1]], "root": 1}')
        result = runner.invoke(app, ["check", "--in", str(path)])
        assert result.exit_code == 1
        err = orjson.loads(result.stderr)
        assert err["kind"] == "InvalidGraphError"
        assert err["invariant"] == "beta-order-3"

    def test_root_exemption_from_stdin(self):
        # vertex 1 carries no b-edge
        doc = '{"n": 2, "alpha": [[1, 2]], "beta": [[2, 2]], "root": 1}'
        assert runner.invoke(app, ["check", "--in", "-"], input=doc).exit_code == 0
        strict = runner.invoke(app, ["check", "--in", "-", "--mode", "cyclically-reduced"], input=doc)
        assert strict.exit_code == 1

    def test_unknown_flag(self):
        assert dispatch(["check", "--bogus"]) == 2


class TestSilhouette:
    def test_trace(self, k_file):
        result = runner.invoke(app, ["silhouette", "--in", k_file, "--trace"])
        assert result.exit_code == 0
        lines = [orjson.loads(line) for line in result.stdout.splitlines()]
        assert all("kind" in line for line in lines[:-1])
        assert lines[-1] == {"silhouette": PREFERRED_DELTA_2.to_dict()}

    def test_random_order_agrees(self, k_file):
        plain = runner.invoke(app, ["silhouette", "--in", k_file])
        shuffled = runner.invoke(app, ["silhouette", "--in", k_file, "--random-order", "17"])
        assert plain.stdout == shuffled.stdout

    def test_quasi(self, tmp_path, graph_l, quasi_silhouette_l):
        path = tmp_path / "l.json"
        write_graph(graph_l, path)
        result = runner.invoke(app, ["silhouette", "--in", str(path), "--quasi"])
        assert decode(result.stdout) == quasi_silhouette_l


class TestSample:
    def test_array_on_stdout(self):
        first = runner.invoke(app, ["sample", "--mode", "cyc", "--n", "5", "--count", "3", "--seed", "4"])
        again = runner.invoke(app, ["sample", "--mode", "cyc", "--n", "5", "--count", "3", "--seed", "4"])
        assert first.exit_code == 0
        graphs = orjson.loads(first.stdout)
        assert len(graphs) == 3
        assert first.stdout == again.stdout

    def test_directory(self, tmp_path):
        result = runner.invoke(
            app, ["sample", "--mode", "silh", "--n", "12", "--count", "2", "--out", str(tmp_path / "s")]
        )
        assert result.exit_code == 0
        files = sorted((tmp_path / "s").glob("*.json"))
        assert [f.name for f in files] == ["silh-n12-0.json", "silh-n12-1.json"]
        assert all(validate(read_graph(f), GraphMode.SILHOUETTE) for f in files)

    def test_environment_seed(self, monkeypatch):
        base = runner.invoke(app, ["sample", "--mode", "rooted", "--n", "8", "--seed", "99"])
        monkeypatch.setenv("MODGROUP_SEED", "99")
        get_settings.cache_clear()
        env = runner.invoke(app, ["sample", "--mode", "rooted", "--n", "8", "--seed", "1"])
        assert base.stdout == env.stdout

    def test_bad_sizes_and_modes(self):
        assert runner.invoke(app, ["sample", "--mode", "silh", "--n", "4"]).exit_code == 1
        assert runner.invoke(app, ["sample", "--mode", "free", "--n", "4"]).exit_code == 2


class TestOracle:
    def test_counts(self):
        result = runner.invoke(app, ["oracle", "--verify", "counts", "--n", "4", "--quiet"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0].startswith("n,A,A_enumerated,B,B_enumerated,connected")
        assert len(lines) == 5

    def test_limit(self):
        result = runner.invoke(app, ["oracle", "--verify", "uniformity", "--n", "10"])
        assert result.exit_code == 1
        assert orjson.loads(result.stderr)["kind"] == "OracleLimitError"


class TestConvert:
    def test_round_trip(self, k_file, graph_k):
        dot = runner.invoke(app, ["convert", "--in", k_file, "--to", "dot"])
        assert dot.stdout.startswith("digraph")
        back = runner.invoke(app, ["convert", "--in", "-", "--to", "json"], input=dot.stdout)
        assert decode(back.stdout) == graph_k


class TestExperiment:
    def test_report_files(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"experiment": "connectivity", "sizes": [6, 12], "samples-per-size": 100, "master-seed": 5}')
        report, plot = tmp_path / "out.csv", tmp_path / "plot.csv"
        args = ["experiment", "--config", str(cfg), "--out", str(report), "--emit-plot-data", str(plot)]
        assert runner.invoke(app, args).exit_code == 0
        first = report.read_bytes()
        assert runner.invoke(app, args).exit_code == 0
        assert report.read_bytes() == first
        assert len(plot.read_text().splitlines()) == 3

    def test_invalid_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"experiment": "connectivity", "sizes": [12, 6]}')
        result = runner.invoke(app, ["experiment", "--config", str(cfg)])
        assert result.exit_code == 1
        assert orjson.loads(result.stderr)["kind"] == "InvalidInputError"
