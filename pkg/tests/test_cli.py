"""Command-line interface: JSON output, exit codes, golden results."""

import json

import pytest

from pfdim.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def structure_file(tmp_path):
    path = tmp_path / "cycle.json"
    path.write_text(json.dumps({
        "sorts": [{"name": "S", "size": 5}],
        "relations": [{"name": "E", "sorts": ["S", "S"],
                       "tuples": [[i, (i + 1) % 5] for i in range(5)]}],
    }))
    return str(path)


class TestCount:
    def test_exact_count(self, capsys, structure_file):
        code, out, _ = run(capsys, "count", "--structure", structure_file,
                           "--formula", "E(x, y)", "--count-vars", "x,y")
        assert code == 0
        assert json.loads(out)["count"] == "5"

    def test_fixed_parameter(self, capsys, structure_file):
        code, out, _ = run(capsys, "count", "--structure", structure_file,
                           "--formula", "E(x, y)", "--count-vars", "x",
                           "--fix", "y=1")
        assert code == 0
        assert json.loads(out)["count"] == "1"

    def test_parse_error_exits_one(self, capsys, structure_file):
        code, _, err = run(capsys, "count", "--structure", structure_file,
                           "--formula", "E(x", "--count-vars", "x")
        assert code == 1
        assert err.strip()

    def test_missing_file_exits_one(self, capsys):
        code, _, err = run(capsys, "count", "--structure", "/nonexistent",
                           "--formula", "E(x, y)", "--count-vars", "x,y")
        assert code == 1
        assert err.strip()


class TestFamily:
    def test_count_with_selector(self, capsys):
        code, out, _ = run(capsys, "family", "--name", "stablenonattainability",
                           "--index", "8", "--formula", "E(x, y)",
                           "--selector", "class-rank-1")
        assert code == 0
        assert json.loads(out)["count"] == str(8 ** 7)

    def test_unknown_family_exits_one(self, capsys):
        code, _, err = run(capsys, "family", "--name", "bogus", "--index", "3",
                           "--formula", "E(x, y)")
        assert code == 1
        assert err.strip()


class TestDimension:
    def test_dim_compare_greater(self, capsys):
        code, out, _ = run(capsys, "dim-compare", "--family",
                           "stablenonattainability",
                           "--formula-x", "E(x, y)", "--selector-x",
                           "class-rank-1",
                           "--formula-y", "E(x, y)", "--selector-y",
                           "class-rank-2",
                           "--indices", "8,16,32,64")
        assert code == 0
        assert json.loads(out)["classification"] == "greater"

    def test_chain(self, capsys):
        code, out, _ = run(capsys, "chain", "--family", "convsupersimple",
                           "--step", "P1(x)", "--step", "P2(x)",
                           "--step", "P3(x)", "--step", "P4(x)",
                           "--indices", "8,16,32,64")
        assert code == 0
        assert json.loads(out)["dropLength"] == 4

    def test_spectrum_csv(self, capsys, tmp_path):
        csv_path = tmp_path / "spectrum.csv"
        code, out, _ = run(capsys, "spectrum", "--family", "findelta",
                           "--formula", "E(x, y)", "--indices", "4,6,8",
                           "--csv", str(csv_path))
        assert code == 0
        data = json.loads(out)
        assert data["unbounded"] is True
        assert csv_path.exists()


class TestOracles:
    def test_abelian_count(self, capsys):
        code, out, _ = run(capsys, "abelian-count", "--p", "2", "--n", "2",
                           "--m", "1", "--r", "1", "--s", "1",
                           "--formula", "2*x1 + 1*y1 = 0", "--param", "2")
        assert code == 0
        assert json.loads(out)["count"] == "2"

    def test_abelian_symbolic(self, capsys):
        code, out, _ = run(capsys, "abelian-count", "--p", "2", "--n", "1",
                           "--m", "1", "--r", "1", "--s", "0",
                           "--formula", "1*x1 = 0", "--symbolic")
        assert code == 0
        assert json.loads(out)["cases"]

    def test_vs_count(self, capsys):
        code, out, _ = run(capsys, "vs-count", "--q", "2", "--dim", "3",
                           "--w", "1", "--wprime", "")
        assert code == 0
        data = json.loads(out)
        assert data["count"] == "7"
        assert data["firstDisjunct"]["count"] == "6"

    def test_word_image(self, capsys):
        code, out, _ = run(capsys, "word-image", "--group", "A5",
                           "--word", "x*x", "--triple")
        assert code == 0
        data = json.loads(out)
        assert data["imageSize"] == 45
        assert data["tripleProductCovers"] is True


class TestMeasureCommands:
    def test_kcap_witness(self, capsys, tmp_path):
        path = tmp_path / "space.json"
        path.write_text(json.dumps({
            "weights": ["1/4", "1/4", "1/4", "1/4"],
            "events": [[0, 1], [1, 2], [2, 3], [0, 3], [0, 2], [1, 3]],
        }))
        code, out, _ = run(capsys, "measure-kcap", "--space", str(path),
                           "--k", "2")
        assert code == 0
        data = json.loads(out)
        assert len(data["indices"]) == 2

    def test_pairwise_check(self, capsys, tmp_path):
        path = tmp_path / "space.json"
        path.write_text(json.dumps({
            "weights": ["1/3", "1/3", "1/3"],
            "events": [[i % 3] for i in range(9)],
        }))
        code, out, _ = run(capsys, "pairwise-check", "--space", str(path),
                           "--eps", "1/3")
        assert code == 0
        assert len(json.loads(out)["pair"]) == 2

    def test_hypothesis_failure_exits_one(self, capsys, tmp_path):
        path = tmp_path / "space.json"
        path.write_text(json.dumps({
            "weights": ["1/2", "1/2"],
            "events": [[0]],
        }))
        code, _, err = run(capsys, "pairwise-check", "--space", str(path),
                           "--eps", "1/2")
        assert code == 1
        assert err.strip()


class TestArgHandling:
    def test_no_command_exits_one(self, capsys):
        assert main([]) == 1

    def test_unknown_command_exits_one(self, capsys):
        assert main(["frobnicate"]) == 1
