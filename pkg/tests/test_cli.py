"""CLI tests: subcommands, exit codes, manifests, reproducibility."""

import json
import os
import subprocess
import sys

import pytest

from satlab.cli import main
from satlab.cnf import CnfFormula, emit_dimacs
from satlab.generator import read_dataset
from satlab.harness import read_records


def run_cli(*argv) -> int:
    return main(list(argv))


@pytest.fixture
def small_dataset(tmp_path):
    out = tmp_path / "ds"
    code = run_cli(
        "generate", "--grid", "n=5:2.0,5.0", "--per-alpha", "25",
        "--seed", "11", "--out", str(out),
    )
    assert code == 0
    return out / "dataset.jsonl"


class TestGenerate:
    def test_row_grid_n3_gives_eleven_cells(self, tmp_path):
        out = tmp_path / "ds"
        assert run_cli("generate", "--grid", "n=3", "--per-alpha", "1", "--seed", "1", "--out", str(out)) == 0
        assert len(read_dataset(out / "dataset.jsonl")) == 11

    def test_outputs_and_manifest(self, small_dataset):
        out_dir = small_dataset.parent
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["command"] == "generate"
        assert manifest["config"]["seed"] == 11
        assert set(manifest["outputs"]) == {"dataset.jsonl", "stats.json"}
        stats = json.loads((out_dir / "stats.json").read_text())
        assert stats["total"] == 50
        instances = read_dataset(small_dataset)
        assert all(inst.model_count is not None for inst in instances)

    def test_byte_identical_reruns(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        for out in (first, second):
            assert run_cli(
                "generate", "--grid", "n=6:2.0,4.5", "--per-alpha", "20",
                "--seed", "3", "--out", str(out),
            ) == 0
        assert (first / "dataset.jsonl").read_bytes() == (second / "dataset.jsonl").read_bytes()
        assert (first / "stats.json").read_bytes() == (second / "stats.json").read_bytes()
        manifests = []
        for out in (first, second):
            manifest = json.loads((out / "manifest.json").read_text())
            manifest["config"].pop("out")
            manifests.append(manifest)
        assert manifests[0] == manifests[1]

    def test_missing_grid_is_config_error(self, tmp_path):
        assert run_cli("generate", "--out", str(tmp_path / "x")) == 2

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "generate": {"grid": ["n=4:2.0"], "per_alpha": 10, "seed": 5, "out": str(tmp_path / "from_config")}
        }))
        out = tmp_path / "flag_wins"
        assert run_cli("generate", "--config", str(config), "--out", str(out)) == 0
        assert (out / "dataset.jsonl").exists()
        assert len(read_dataset(out / "dataset.jsonl")) == 10


class TestPhase:
    def test_outputs(self, tmp_path):
        out = tmp_path / "phase"
        code = run_cli(
            "phase", "--n", "12", "--alphas", "2.0,4.4,7.0", "--per-alpha", "40",
            "--seed", "2", "--out", str(out),
        )
        assert code == 0
        csv_text = (out / "profile.csv").read_text()
        assert csv_text.startswith("n,alpha,p_sat,mean_decisions,support")
        svg = (out / "phase.svg").read_text()
        assert "critical 4.267" in svg

    def test_byte_identical_reruns(self, tmp_path):
        outs = [tmp_path / "p1", tmp_path / "p2"]
        for out in outs:
            assert run_cli(
                "phase", "--n", "10", "--alphas", "2.0:4.0:1.0", "--per-alpha", "20",
                "--seed", "9", "--out", str(out),
            ) == 0
        assert (outs[0] / "profile.csv").read_bytes() == (outs[1] / "profile.csv").read_bytes()
        assert (outs[0] / "phase.svg").read_bytes() == (outs[1] / "phase.svg").read_bytes()


class TestSolveCount:
    def test_solve_sat_prints_witness(self, tmp_path, capsys):
        path = tmp_path / "f.cnf"
        path.write_text(emit_dimacs(CnfFormula(3, [[1, -2], [2, 3]])))
        assert run_cli("solve", "--dimacs", str(path)) == 0
        out = capsys.readouterr().out
        assert out.startswith("SAT\nv ")

    def test_solve_unsat(self, tmp_path, capsys):
        path = tmp_path / "f.cnf"
        path.write_text("p cnf 1 2\n1 0\n-1 0\n")
        assert run_cli("solve", "--dimacs", str(path)) == 0
        assert capsys.readouterr().out.startswith("UNSAT")

    def test_count(self, tmp_path, capsys):
        path = tmp_path / "f.cnf"
        path.write_text("p cnf 3 1\n1 2 3 0\n")
        assert run_cli("count", "--dimacs", str(path)) == 0
        out = capsys.readouterr().out
        assert "model_count 7" in out

    def test_malformed_dimacs_is_io_error(self, tmp_path):
        path = tmp_path / "bad.cnf"
        path.write_text("p cnf 2 9\n1 0\n")
        assert run_cli("solve", "--dimacs", str(path)) == 3

    def test_missing_file_is_io_error(self, tmp_path):
        assert run_cli("solve", "--dimacs", str(tmp_path / "nope.cnf")) == 3


class TestEncode:
    def test_encode_menu(self, small_dataset, tmp_path):
        out = tmp_path / "renders.jsonl"
        code = run_cli(
            "encode", "--dataset", str(small_dataset), "--format", "sat-menu",
            "--variant", "search", "--vocab-seed", "4", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 50
        record = json.loads(lines[0])
        assert record["format"] == "sat-menu"
        assert record["mapping"] is not None
        assert "Preferences:" in record["prompt_text"]


class TestEvaluate:
    def test_oracle_run_and_records(self, small_dataset, tmp_path):
        out = tmp_path / "records.jsonl"
        code = run_cli(
            "evaluate", "--dataset", str(small_dataset), "--adapter", "scripted_oracle",
            "--format", "sat-translate", "--variant", "search", "--out", str(out),
        )
        assert code == 0
        records = read_records(out)
        assert len(records) == 50
        assert all(r.verdict == "correct" for r in records)

    def test_noisy_adapter_config(self, small_dataset, tmp_path):
        out = tmp_path / "records.jsonl"
        code = run_cli(
            "evaluate", "--dataset", str(small_dataset), "--adapter", "scripted_noisy",
            "--adapter-config", '{"p": 0.5, "seed": 7}', "--format", "sat-cnf",
            "--variant", "decision", "--out", str(out),
        )
        assert code == 0

    def test_http_without_credential_is_config_error(self, small_dataset, tmp_path, monkeypatch):
        monkeypatch.delenv("SATLAB_API_KEY", raising=False)
        code = run_cli(
            "evaluate", "--dataset", str(small_dataset), "--adapter", "http_chat",
            "--adapter-config", '{"endpoint": "http://127.0.0.1:1/x", "model": "m"}',
            "--format", "sat-cnf", "--variant", "decision", "--out", str(tmp_path / "r.jsonl"),
        )
        assert code == 2

    def test_bad_adapter_config_json(self, small_dataset, tmp_path):
        code = run_cli(
            "evaluate", "--dataset", str(small_dataset), "--adapter", "scripted_noisy",
            "--adapter-config", "{not json", "--out", str(tmp_path / "r.jsonl"),
        )
        assert code == 2


class TestReport:
    def test_full_report_flow(self, small_dataset, tmp_path):
        records = tmp_path / "records.jsonl"
        for variant in ("search", "decision"):
            assert run_cli(
                "evaluate", "--dataset", str(small_dataset), "--adapter", "scripted_oracle",
                "--format", "sat-menu", "--variant", variant, "--out", str(records),
            ) == 0
        out = tmp_path / "report"
        assert run_cli(
            "report", "--records", str(records), "--dataset", str(small_dataset),
            "--out", str(out),
        ) == 0
        names = sorted(os.listdir(out))
        assert any(name.endswith("accuracy-vs-alpha.csv") for name in names)
        assert any(name.endswith("accuracy-vs-alpha.svg") for name in names)
        assert any(name.endswith("confusion.csv") for name in names)
        assert any("accuracy_vs_ratio" in name for name in names)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "report"

    def test_report_byte_identical(self, small_dataset, tmp_path):
        records = tmp_path / "records.jsonl"
        assert run_cli(
            "evaluate", "--dataset", str(small_dataset), "--adapter", "scripted_oracle",
            "--format", "sat-cnf", "--variant", "search", "--out", str(records),
        ) == 0
        outs = [tmp_path / "r1", tmp_path / "r2"]
        for out in outs:
            assert run_cli(
                "report", "--records", str(records), "--dataset", str(small_dataset),
                "--out", str(out),
            ) == 0
        for name in os.listdir(outs[0]):
            if name == "manifest.json":  # embeds the differing --out path
                continue
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name


def test_module_entry_point_smoke(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "satlab", "generate", "--grid", "n=4:2.0",
         "--per-alpha", "5", "--seed", "1", "--out", str(tmp_path / "ds")],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    assert "wrote 5 instances" in result.stdout


def test_unknown_command_is_config_error():
    assert run_cli("frobnicate") == 2
