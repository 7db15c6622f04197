import json
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

from retdecide.cli import main


def fx(fixtures_dir, name: str) -> str:
    return str(fixtures_dir / name)


def decide_args(fixtures_dir, config: str, candidate: str = "tas", out: str | None = None):
    args = [
        "decide",
        "--config", fx(fixtures_dir, config),
        "--run", f"bm25={fx(fixtures_dir, 'bm25.run')}",
        "--run", f"{candidate}={fx(fixtures_dir, candidate + '.run')}",
        "--qrels", fx(fixtures_dir, "qrels.txt"),
        "--costs", fx(fixtures_dir, "costs.json"),
        "--queries", fx(fixtures_dir, "queries.tsv"),
        "--collection", fx(fixtures_dir, "collection.tsv"),
    ]
    if out:
        args += ["--out", out]
    return args


class TestEvaluate:
    def test_mean_line_and_tsv(self, fixtures_dir, tmp_path, capsys):
        out = tmp_path / "scores.tsv"
        code = main(["evaluate", "--run", fx(fixtures_dir, "tas.run"), "--qrels", fx(fixtures_dir, "qrels.txt"),
                     "--metric", "ndcg@10", "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "mean=" in stdout and "n=240" in stdout
        lines = out.read_text().splitlines()
        assert len(lines) == 240
        assert lines[0].startswith("q000\t")

    def test_metric_grammar(self, fixtures_dir, capsys):
        assert main(["evaluate", "--run", fx(fixtures_dir, "tas.run"), "--qrels", fx(fixtures_dir, "qrels.txt"),
                     "--metric", "mrr@10"]) == 0
        assert "mrr@10" in capsys.readouterr().out

    def test_malformed_run_exits_2(self, tmp_path, fixtures_dir, capsys):
        bad = tmp_path / "bad.run"
        bad.write_text("1 Q0 d1 1 notanumber tag\n")
        code = main(["evaluate", "--run", str(bad), "--qrels", fx(fixtures_dir, "qrels.txt")])
        assert code == 2
        assert ":1:" in capsys.readouterr().err

    def test_output_insensitive_to_input_permutation(self, fixtures_dir, tmp_path):
        original = Path(fx(fixtures_dir, "tas.run")).read_text().splitlines()
        shuffled = tmp_path / "shuffled.run"
        shuffled.write_text("\n".join(reversed(original)) + "\n")
        out_a, out_b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        main(["evaluate", "--run", fx(fixtures_dir, "tas.run"), "--qrels", fx(fixtures_dir, "qrels.txt"),
              "--out", str(out_a)])
        main(["evaluate", "--run", str(shuffled), "--qrels", fx(fixtures_dir, "qrels.txt"), "--out", str(out_b)])
        assert out_a.read_bytes() == out_b.read_bytes()


class TestCompare:
    def test_identical_runs_tie(self, fixtures_dir, capsys):
        code = main(["compare", "--baseline", fx(fixtures_dir, "bm25.run"),
                     "--candidate", fx(fixtures_dir, "bm25.run"), "--qrels", fx(fixtures_dir, "qrels.txt")])
        assert code == 0
        out = capsys.readouterr().out
        assert "≈" in out and "p=1" in out

    def test_planted_improvement_wins(self, fixtures_dir, tmp_path, capsys):
        out = tmp_path / "cmp.json"
        main(["compare", "--baseline", fx(fixtures_dir, "bm25.run"), "--candidate", fx(fixtures_dir, "tas.run"),
              "--qrels", fx(fixtures_dir, "qrels.txt"), "--margin", "0.01", "--out", str(out)])
        doc = json.loads(out.read_text())
        assert doc["comparison"]["outcome"]["label"] == "win"
        assert doc["comparison"]["p_value"] < 0.05

    def test_swapped_arguments_mirror(self, fixtures_dir, tmp_path):
        out_fwd, out_rev = tmp_path / "f.json", tmp_path / "r.json"
        main(["compare", "--baseline", fx(fixtures_dir, "bm25.run"), "--candidate", fx(fixtures_dir, "tas.run"),
              "--qrels", fx(fixtures_dir, "qrels.txt"), "--margin", "0.01", "--out", str(out_fwd)])
        main(["compare", "--baseline", fx(fixtures_dir, "tas.run"), "--candidate", fx(fixtures_dir, "bm25.run"),
              "--qrels", fx(fixtures_dir, "qrels.txt"), "--margin", "0.01", "--out", str(out_rev)])
        fwd = json.loads(out_fwd.read_text())["comparison"]
        rev = json.loads(out_rev.read_text())["comparison"]
        assert fwd["outcome"]["label"] == "win" and rev["outcome"]["label"] == "loss"
        assert fwd["p_value"] == rev["p_value"]


class TestGuardrailCommands:
    def test_length_bins_table(self, fixtures_dir, capsys):
        code = main(["guardrail", "length", "--baseline", fx(fixtures_dir, "bm25.run"),
                     "--candidate", fx(fixtures_dir, "tas.run"), "--qrels", fx(fixtures_dir, "qrels.txt"),
                     "--queries", fx(fixtures_dir, "queries.tsv"), "--bins", "0:5,4:8,7:inf"])
        assert code == 0
        out = capsys.readouterr().out
        assert out.count("length(") == 3
        assert "✗" not in out

    def test_flawed_candidate_fails_length_bin(self, fixtures_dir, capsys):
        code = main(["guardrail", "length", "--baseline", fx(fixtures_dir, "bm25.run"),
                     "--candidate", fx(fixtures_dir, "tasflaw.run"), "--qrels", fx(fixtures_dir, "qrels.txt"),
                     "--queries", fx(fixtures_dir, "queries.tsv"), "--bins", "7:inf"])
        assert code == 1
        assert "✗" in capsys.readouterr().out

    def test_lexical_reports_slice(self, fixtures_dir, capsys):
        code = main(["guardrail", "lexical", "--baseline", fx(fixtures_dir, "bm25.run"),
                     "--candidate", fx(fixtures_dir, "tas.run"), "--qrels", fx(fixtures_dir, "qrels.txt"),
                     "--queries", fx(fixtures_dir, "queries.tsv"), "--collection", fx(fixtures_dir, "collection.tsv"),
                     "--max-overlap", "0", "--depth", "1"])
        assert code == 0
        assert "lexical_overlap" in capsys.readouterr().out

    def test_margin_pass_and_regressed_export(self, fixtures_dir, tmp_path, capsys):
        regressed = tmp_path / "regressed.txt"
        code = main(["guardrail", "margin", "--baseline", fx(fixtures_dir, "bm25.run"),
                     "--candidate", fx(fixtures_dir, "tas.run"), "--qrels", fx(fixtures_dir, "qrels.txt"),
                     "--metric", "mrr@10", "--delta", "1.0", "--threshold", "0.01",
                     "--regressed-out", str(regressed)])
        assert code == 0
        assert "1/240" in capsys.readouterr().out
        assert len(regressed.read_text().splitlines()) == 1

    def test_file_slice(self, fixtures_dir, tmp_path, capsys):
        listed = tmp_path / "hard.txt"
        listed.write_text("q000\nq001\nq002\n" + "\n".join(f"q{i:03d}" for i in range(10, 40)))
        code = main(["guardrail", "file", "--baseline", fx(fixtures_dir, "bm25.run"),
                     "--candidate", fx(fixtures_dir, "tas.run"), "--qrels", fx(fixtures_dir, "qrels.txt"),
                     "--queries", fx(fixtures_dir, "queries.tsv"), "--slice-file", str(listed)])
        assert code == 0

    def test_memory_slice(self, fixtures_dir, capsys):
        code = main(["guardrail", "memory", "--baseline", fx(fixtures_dir, "bm25.run"),
                     "--candidate", fx(fixtures_dir, "tas.run"), "--qrels", fx(fixtures_dir, "qrels.txt"),
                     "--queries", fx(fixtures_dir, "queries.tsv"),
                     "--train-queries", fx(fixtures_dir, "train_queries.tsv"), "--epsilon", "0.7"])
        assert code == 0


class TestDecide:
    def test_scenario1_deploys_exit_0(self, fixtures_dir, tmp_path, capsys):
        out = tmp_path / "bundle.json"
        code = main(decide_args(fixtures_dir, "scenario1.json", out=str(out)))
        assert code == 0
        assert "DEPLOY" in capsys.readouterr().out
        assert json.loads(out.read_text())["verdicts"][0]["decision"] == "deploy"

    def test_scenario2_rejects_exit_1(self, fixtures_dir, tmp_path, capsys):
        code = main(decide_args(fixtures_dir, "scenario2.json"))
        assert code == 1
        assert "C-Efficient" in capsys.readouterr().out

    def test_planted_failure_exit_1(self, fixtures_dir, capsys):
        code = main(decide_args(fixtures_dir, "planted.json", candidate="tasflaw"))
        assert code == 1

    def test_missing_cost_factor_exit_2(self, fixtures_dir, tmp_path, capsys):
        crippled = json.loads((fixtures_dir / "costs.json").read_text())
        del crippled["systems"]["tas"]["storage"]
        path = tmp_path / "costs.json"
        path.write_text(json.dumps(crippled))
        args = decide_args(fixtures_dir, "scenario1.json")
        args[args.index("--costs") + 1] = str(path)
        assert main(args) == 2

    def test_scenario_fragment_flips_verdict(self, fixtures_dir, tmp_path):
        fragment = tmp_path / "fragment.json"
        fragment.write_text(json.dumps({"cost_cap": {"mode": "anchor"}}))
        assert main(decide_args(fixtures_dir, "scenario1.json") + ["--scenario", str(fragment)]) == 1

    def test_env_var_config(self, fixtures_dir, monkeypatch):
        monkeypatch.setenv("RETDECIDE_CONFIG", fx(fixtures_dir, "scenario1.json"))
        args = decide_args(fixtures_dir, "scenario1.json")
        i = args.index("--config")
        del args[i : i + 2]
        assert main(args) == 0

    def test_report_written(self, fixtures_dir, tmp_path):
        report = tmp_path / "report.md"
        main(decide_args(fixtures_dir, "scenario1.json") + ["--report", str(report)])
        assert "## Criteria" in report.read_text()

    def test_bundle_bytes_deterministic(self, fixtures_dir, tmp_path):
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        main(decide_args(fixtures_dir, "scenario1.json", out=str(out_a)))
        main(decide_args(fixtures_dir, "scenario1.json", out=str(out_b)))
        assert out_a.read_bytes() == out_b.read_bytes()


class TestServe:
    def test_serves_bundle_json(self, fixtures_dir, tmp_path):
        bundle = tmp_path / "bundle.json"
        assert main(decide_args(fixtures_dir, "scenario1.json", out=str(bundle))) == 0
        proc = subprocess.Popen(
            [sys.executable, "-m", "retdecide.cli", "serve", "--bundle", str(bundle), "--port", "0", "--no-open"],
            stdout=subprocess.PIPE,
            text=True,
        )
        try:
            line = proc.stdout.readline()
            url = line.strip().split()[-1]
            for _ in range(50):
                try:
                    body = urllib.request.urlopen(url, timeout=2).read()
                    break
                except OSError:
                    time.sleep(0.1)
            assert body == bundle.read_bytes()
        finally:
            proc.terminate()
            proc.wait(timeout=5)

    def test_missing_bundle_exit_2(self, tmp_path):
        assert main(["serve", "--bundle", str(tmp_path / "nope.json"), "--no-open"]) == 2
