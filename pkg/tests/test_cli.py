import json

import numpy as np
import pytest

from pairspace import load_subspace
from pairspace.cli import (
    EXIT_FORMAT,
    EXIT_IO,
    EXIT_OK,
    EXIT_PRECONDITION,
    main,
    parse_config_text,
)


def write_planted_workspace(root, n_pairs=6, dim=3):
    """Tiny axis-0 separated embeddings + pairs + a matching task file."""
    rng = np.random.default_rng(0)
    lines = [f"{2 * n_pairs} {dim}"]
    pair_lines = []
    for i in range(n_pairs):
        scale = 1.0 + 0.1 * i
        tail = rng.normal(scale=0.05, size=dim - 1)
        pos = " ".join(repr(float(v)) for v in [scale, *tail])
        neg = " ".join(repr(float(v)) for v in [-scale, *tail])
        lines.append(f"p{i} {pos}")
        lines.append(f"n{i} {neg}")
        pair_lines.append(f"p{i}\tn{i}")
    (root / "embeddings.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (root / "pairs.tsv").write_text("\n".join(pair_lines) + "\n", encoding="utf-8")

    records = []
    for i in range(10):
        sign = 1.0 if i % 2 == 0 else -1.0
        vec = [sign * 2.0] + rng.normal(scale=0.05, size=dim - 1).tolist()
        records.append(
            json.dumps(
                {
                    "id": f"t{i}",
                    "label": "profane" if sign > 0 else "neutral",
                    "vec": vec,
                }
            )
        )
    (root / "task.jsonl").write_text("\n".join(records) + "\n", encoding="utf-8")


class TestConfigParsing:
    def test_key_value_lines(self):
        parsed = parse_config_text("# comment\nSizes = 10,20\n\nk-folds=5\n")
        assert parsed == {"sizes": "10,20", "k_folds": "5"}

    def test_syntax_error_reports_line(self):
        with pytest.raises(Exception) as err:
            parse_config_text("just words\n")
        assert getattr(err.value, "line", None) == 1

    def test_flag_beats_env_beats_config(self, tmp_path, monkeypatch, capsys):
        write_planted_workspace(tmp_path)
        config = tmp_path / "learn.cfg"
        config.write_text(
            f"embeddings = {tmp_path / 'embeddings.txt'}\n"
            f"pairs = {tmp_path / 'pairs.tsv'}\n"
            "mode = norm\n"
            "components = 2\n"
            f"out = {tmp_path / 'space.txt'}\n",
            encoding="utf-8",
        )
        monkeypatch.setenv("PAIRSPACE_COMPONENTS", "3")
        assert main(["learn", "--config", str(config)]) == EXIT_OK
        assert load_subspace(tmp_path / "space.txt").c == 3  # env beat config
        assert (
            main(["learn", "--config", str(config), "--components", "1"]) == EXIT_OK
        )
        assert load_subspace(tmp_path / "space.txt").c == 1  # flag beat env
        capsys.readouterr()


class TestLearn:
    def test_learn_writes_axis_subspace(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        out = tmp_path / "space.txt"
        code = main(
            [
                "learn",
                "--embeddings", str(tmp_path / "embeddings.txt"),
                "--pairs", str(tmp_path / "pairs.tsv"),
                "--mode", "norm",
                "--components", "1",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        space = load_subspace(out)
        assert abs(space.components[0][0]) == pytest.approx(1.0, abs=1e-6)
        assert "c=1" in capsys.readouterr().out

    def test_missing_pair_file_is_io_error(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        code = main(
            [
                "learn",
                "--embeddings", str(tmp_path / "embeddings.txt"),
                "--pairs", str(tmp_path / "nope.tsv"),
                "--mode", "raw",
                "--components", "1",
                "--out", str(tmp_path / "space.txt"),
            ]
        )
        assert code == EXIT_IO
        assert "nope.tsv" in capsys.readouterr().err

    def test_component_count_out_of_range(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        code = main(
            [
                "learn",
                "--embeddings", str(tmp_path / "embeddings.txt"),
                "--pairs", str(tmp_path / "pairs.tsv"),
                "--mode", "raw",
                "--components", "99",
                "--out", str(tmp_path / "space.txt"),
            ]
        )
        assert code == EXIT_PRECONDITION
        capsys.readouterr()

    def test_malformed_embeddings_is_format_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a header\n", encoding="utf-8")
        (tmp_path / "pairs.tsv").write_text("a\tb\n", encoding="utf-8")
        code = main(
            [
                "learn",
                "--embeddings", str(bad),
                "--pairs", str(tmp_path / "pairs.tsv"),
                "--mode", "raw",
                "--components", "1",
                "--out", str(tmp_path / "space.txt"),
            ]
        )
        assert code == EXIT_FORMAT
        capsys.readouterr()


class TestSelect:
    def test_curve_peaks_at_one_and_reruns_identical(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        out = tmp_path / "curve.tsv"
        argv = [
            "select",
            "--embeddings", str(tmp_path / "embeddings.txt"),
            "--pairs", str(tmp_path / "pairs.tsv"),
            "--mode", "raw",
            "--k-folds", "3",
            "--c-grid", "1,2,3",
            "--seed", "5",
            "--out", str(out),
        ]
        assert main(argv) == EXIT_OK
        first = out.read_bytes()
        assert main(argv) == EXIT_OK
        assert out.read_bytes() == first
        rows = [line.split("\t") for line in first.decode().splitlines()[1:]]
        means = {int(c): float(mean) for c, mean, _ in rows}
        assert means[1] == 1.0
        assert "chosen c=1" in capsys.readouterr().out

    def test_more_folds_than_pairs(self, tmp_path, capsys):
        write_planted_workspace(tmp_path, n_pairs=4)
        code = main(
            [
                "select",
                "--embeddings", str(tmp_path / "embeddings.txt"),
                "--pairs", str(tmp_path / "pairs.tsv"),
                "--k-folds", "5",
                "--out", str(tmp_path / "curve.tsv"),
            ]
        )
        assert code == EXIT_PRECONDITION
        capsys.readouterr()


class TestTransfer:
    def transfer_argv(self, tmp_path, out_name="report.tsv", extra=()):
        return [
            "transfer",
            "--embeddings", str(tmp_path / "embeddings.txt"),
            "--pairs", str(tmp_path / "pairs.tsv"),
            "--tasks", f"toy={tmp_path / 'task.jsonl'}",
            "--sizes", "4",
            "--kinds", "base,pca_raw",
            "--seeds", "1,2",
            "--k-folds", "2",
            "--out", str(tmp_path / out_name),
            *extra,
        ]

    def test_single_config_produces_report(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        assert main(self.transfer_argv(tmp_path)) == EXIT_OK
        lines = (tmp_path / "report.tsv").read_text().splitlines()
        assert lines[0].startswith("kind\tn_pairs\ttask")
        assert len(lines) == 3  # header + base + pca_raw
        assert "toy" in capsys.readouterr().out

    def test_reruns_and_threads_byte_identical(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        assert main(self.transfer_argv(tmp_path, "a.tsv")) == EXIT_OK
        assert main(self.transfer_argv(tmp_path, "b.tsv")) == EXIT_OK
        assert (
            main(self.transfer_argv(tmp_path, "c.tsv", ("--threads", "4"))) == EXIT_OK
        )
        a = (tmp_path / "a.tsv").read_bytes()
        assert a == (tmp_path / "b.tsv").read_bytes()
        assert a == (tmp_path / "c.tsv").read_bytes()
        capsys.readouterr()

    def test_task_dimension_mismatch(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        record = json.dumps({"id": "t0", "label": "neutral", "vec": [1.0, 2.0]})
        (tmp_path / "short.jsonl").write_text(record + "\n", encoding="utf-8")
        argv = self.transfer_argv(tmp_path)
        argv[argv.index("--tasks") + 1] = f"toy={tmp_path / 'short.jsonl'}"
        assert main(argv) == EXIT_PRECONDITION
        capsys.readouterr()

    def test_fixed_c_mode(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        argv = self.transfer_argv(tmp_path, extra=("--fixed-c", "1"))
        assert main(argv) == EXIT_OK
        report = (tmp_path / "report.tsv").read_text()
        assert "\t1,1\t" in report  # chosen_c column shows the fixed value
        capsys.readouterr()


class TestSentenceLevelInputs:
    def test_pairs_of_record_ids_resolve_against_jsonl(self, tmp_path, capsys):
        """Sentence-level flow: pair file holds record ids, vectors come from jsonl."""
        rng = np.random.default_rng(2)
        records, pair_lines = [], []
        for i in range(6):
            tail = rng.normal(scale=0.05, size=2).tolist()
            records.append(json.dumps(
                {"id": f"s{i}.bad", "label": "profane", "vec": [1.0 + 0.1 * i, *tail]}
            ))
            records.append(json.dumps(
                {"id": f"s{i}.ok", "label": "neutral", "vec": [-1.0 - 0.1 * i, *tail]}
            ))
            pair_lines.append(f"s{i}.bad\ts{i}.ok")
        (tmp_path / "sentences.jsonl").write_text("\n".join(records) + "\n", encoding="utf-8")
        (tmp_path / "pairs.tsv").write_text("\n".join(pair_lines) + "\n", encoding="utf-8")
        out = tmp_path / "space.txt"
        code = main(
            [
                "learn",
                "--embeddings", str(tmp_path / "sentences.jsonl"),
                "--embeddings-format", "jsonl",
                "--pairs", str(tmp_path / "pairs.tsv"),
                "--mode", "norm",
                "--components", "1",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        assert abs(load_subspace(out).components[0][0]) == pytest.approx(1.0, abs=1e-4)
        capsys.readouterr()

    def test_select_norm_flavor(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        out = tmp_path / "curve.tsv"
        code = main(
            [
                "select",
                "--embeddings", str(tmp_path / "embeddings.txt"),
                "--pairs", str(tmp_path / "pairs.tsv"),
                "--mode", "norm",
                "--k-folds", "3",
                "--c-grid", "1,2",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        assert out.exists()
        capsys.readouterr()


class TestGenBench:
    def test_generates_replayable_benchmark(self, tmp_path, capsys):
        bench_dir = tmp_path / "bench"
        code = main(
            [
                "gen-bench",
                "--dim", "8",
                "--n-pairs", "8",
                "--n-task", "12",
                "--seed", "3",
                "--topic-shift", "5",
                "--noise-scale", "0.2",
                "--out-dir", str(bench_dir),
            ]
        )
        assert code == EXIT_OK
        assert (bench_dir / "embeddings.txt").exists()
        assert (bench_dir / "pairs.tsv").exists()
        assert (bench_dir / "task.jsonl").exists()
        report = tmp_path / "report.tsv"
        code = main(
            [
                "transfer",
                "--embeddings", str(bench_dir / "embeddings.txt"),
                "--pairs", str(bench_dir / "pairs.tsv"),
                "--tasks", f"bench={bench_dir / 'task.jsonl'}",
                "--sizes", "4",
                "--kinds", "base",
                "--seeds", "1",
                "--out", str(report),
            ]
        )
        assert code == EXIT_OK
        assert report.exists()
        capsys.readouterr()

    def test_bad_dimension(self, tmp_path, capsys):
        code = main(
            [
                "gen-bench",
                "--dim", "2",
                "--n-pairs", "8",
                "--n-task", "12",
                "--out-dir", str(tmp_path / "bench"),
            ]
        )
        assert code == EXIT_PRECONDITION
        capsys.readouterr()

    def test_replayed_benchmark_shows_transfer_gap(self, tmp_path, capsys):
        bench_dir = tmp_path / "bench"
        assert main(
            [
                "gen-bench",
                "--dim", "32",
                "--n-pairs", "60",
                "--n-task", "200",
                "--seed", "5",
                "--topic-shift", "6",
                "--noise-scale", "0.3",
                "--out-dir", str(bench_dir),
            ]
        ) == EXIT_OK
        report = tmp_path / "report.tsv"
        assert main(
            [
                "transfer",
                "--embeddings", str(bench_dir / "embeddings.txt"),
                "--pairs", str(bench_dir / "pairs.tsv"),
                "--tasks", f"shifted={bench_dir / 'task.jsonl'}",
                "--sizes", "30",
                "--kinds", "base,pca_raw",
                "--runs", "3",
                "--seed", "0",
                "--out", str(report),
            ]
        ) == EXIT_OK
        means = {}
        for line in report.read_text().splitlines()[1:]:
            kind, _, _, mean, *_ = line.split("\t")
            means[kind] = float(mean)
        assert means["pca_raw"] >= means["base"] + 0.1
        capsys.readouterr()


class TestErrorMapping:
    def test_pair_token_missing_from_embeddings(self, tmp_path, capsys):
        write_planted_workspace(tmp_path)
        (tmp_path / "pairs.tsv").write_text("p0\tghost\n", encoding="utf-8")
        code = main(
            [
                "learn",
                "--embeddings", str(tmp_path / "embeddings.txt"),
                "--pairs", str(tmp_path / "pairs.tsv"),
                "--mode", "raw",
                "--components", "1",
                "--out", str(tmp_path / "space.txt"),
            ]
        )
        assert code == EXIT_PRECONDITION
        assert "ghost" in capsys.readouterr().err

    def test_config_syntax_error(self, tmp_path, capsys):
        config = tmp_path / "broken.cfg"
        config.write_text("this line has no equals sign\n", encoding="utf-8")
        code = main(["learn", "--config", str(config)])
        assert code == EXIT_FORMAT
        capsys.readouterr()

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["learn", "--config", str(tmp_path / "absent.cfg")])
        assert code == EXIT_IO
        capsys.readouterr()


class TestSubstitute:
    def write_vocab(self, tmp_path):
        lines = [
            "4 2",
            "prof 1.0 1.0",
            "profvariant 1.0 0.9",
            "calm 0.0 1.0",
            "cool 0.0 0.8",
        ]
        (tmp_path / "vocab.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        space_lines = [
            "pairspace-subspace 1",
            "mode norm",
            "c 1",
            "dim 2",
            "explained_variance_ratio 1",
            "explained_variance 1",
            "mean 0 0",
            "component 1 0",
        ]
        (tmp_path / "space.txt").write_text("\n".join(space_lines) + "\n", encoding="utf-8")

    def test_batch_with_unknown_word_continues(self, tmp_path, capsys):
        self.write_vocab(tmp_path)
        (tmp_path / "words.txt").write_text("prof\nmissing\n", encoding="utf-8")
        out = tmp_path / "subs.tsv"
        code = main(
            [
                "substitute",
                "--embeddings", str(tmp_path / "vocab.txt"),
                "--subspace", str(tmp_path / "space.txt"),
                "--words", str(tmp_path / "words.txt"),
                "--k", "2",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0].split("\t") == ["prof", "1", "calm", "1"]
        assert lines[1].split("\t") == ["prof", "2", "cool", "1"]
        assert lines[2] == "missing\t-\t<unknown-token>\t-"
        assert "1 failed" in capsys.readouterr().out

    def test_empty_input_list(self, tmp_path, capsys):
        self.write_vocab(tmp_path)
        (tmp_path / "words.txt").write_text("", encoding="utf-8")
        out = tmp_path / "subs.tsv"
        code = main(
            [
                "substitute",
                "--embeddings", str(tmp_path / "vocab.txt"),
                "--subspace", str(tmp_path / "space.txt"),
                "--words", str(tmp_path / "words.txt"),
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        assert out.read_text() == ""
        capsys.readouterr()
