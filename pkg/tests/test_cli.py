import os

import pytest

from imbandit.cli import main


def graph_file(tmp_path, text="0 1 0.0\n1 2 0.0\n2 3 0.0\n"):
    path = tmp_path / "g.txt"
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestGenGraph:
    def test_star_to_stdout(self, capsys):
        assert main(["gen-graph", "star", "--leaves", "2", "--p", "0.5"]) == 0
        out = capsys.readouterr().out
        assert out == "0 1 0.5\n0 2 0.5\n"

    def test_line_to_file(self, tmp_path):
        target = tmp_path / "line.txt"
        assert main(["gen-graph", "line", "--n", "3", "--p", "1.0", "--out", str(target)]) == 0
        assert target.read_text() == "0 1 1.0\n1 2 1.0\n"

    def test_scale_free_reproducible(self, capsys):
        main(["gen-graph", "scale-free", "--n", "12", "--attach", "2", "--seed", "4"])
        first = capsys.readouterr().out
        main(["gen-graph", "scale-free", "--n", "12", "--attach", "2", "--seed", "4"])
        assert capsys.readouterr().out == first


class TestRun:
    def test_end_to_end(self, tmp_path, capsys):
        out = tmp_path / "results"
        code = main([
            "run", "--graph", graph_file(tmp_path), "--k", "2",
            "--horizons", "50", "--algos", "lofa,etcg", "--reps", "2",
            "--seed", "7", "--samples", "30", "--out", str(out),
        ])
        assert code == 0
        names = sorted(os.listdir(out))
        assert "summary.csv" in names and "aggregate.csv" in names and "manifest.txt" in names
        assert sum(n.startswith("rounds_") for n in names) == 4
        manifest = (out / "manifest.txt").read_text()
        assert "m_T50=" in manifest and "base_seed=7" in manifest
        summary = (out / "summary.csv").read_text().splitlines()
        assert len(summary) == 5

    def test_k_exceeding_n_is_usage_error(self, tmp_path, capsys):
        code = main(["run", "--graph", graph_file(tmp_path), "--k", "9",
                     "--horizons", "50", "--out", str(tmp_path / "o")])
        assert code == 2
        assert "usage error" in capsys.readouterr().err

    def test_unknown_algo_is_usage_error(self, tmp_path, capsys):
        code = main(["run", "--graph", graph_file(tmp_path), "--k", "1",
                     "--horizons", "50", "--algos", "dart", "--out", str(tmp_path / "o")])
        assert code == 2

    def test_unknown_flag_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--graph", graph_file(tmp_path), "--k", "1", "--frobnicate"])
        assert exc.value.code == 2

    def test_missing_graph_file_is_error(self, tmp_path, capsys):
        code = main(["run", "--graph", str(tmp_path / "nope.txt"), "--k", "1",
                     "--horizons", "50", "--out", str(tmp_path / "o")])
        assert code == 1


class TestOracle:
    def test_cache_append_and_reuse(self, tmp_path, capsys):
        graph = graph_file(tmp_path)
        assert main(["oracle", "--graph", graph, "--k", "2", "--samples", "30"]) == 0
        first = capsys.readouterr().out
        assert "cached to" in first
        cache = graph + ".bench"
        line = open(cache).read().strip()
        assert line.startswith("2 file ")
        assert main(["oracle", "--graph", graph, "--k", "2", "--samples", "30"]) == 0
        assert "cached greedy benchmark" in capsys.readouterr().out
        assert open(cache).read().strip() == line

    def test_optimal_flag(self, tmp_path, capsys):
        assert main(["oracle", "--graph", graph_file(tmp_path), "--k", "1",
                     "--samples", "20", "--optimal"]) == 0
        assert "optimal (exhaustive)" in capsys.readouterr().out


class TestSimulate:
    def test_prints_counts_and_summary(self, tmp_path, capsys):
        code = main(["simulate", "--graph", graph_file(tmp_path), "--seeds", "0,2",
                     "--count", "5"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[:5] == ["2"] * 5  # all-zero probs: only the seeds activate
        assert lines[5].startswith("# mean=2.0")
