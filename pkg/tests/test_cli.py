"""Тесты CLI: подкоманды, коды выхода, файлы результатов."""

import json
import math

import numpy as np
import pytest

import main
from results import load_manifest, read_json, read_replicate_csv, write_replicate_csv

SMALL = """\
experiment.name=small
experiment.lambda_grid=100,200
experiment.replicates=3
experiment.statistics=volume,surface,skeleton
shape.kind=ball
shape.center=0,0
shape.radius=0.25
experiment.margin_multiple=2
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.env"
    path.write_text(SMALL)
    return path


def simulate(config_path, out, *extra):
    return main.main(["simulate", "--config", str(config_path), "--out", str(out), "--log-level", "WARNING",
                      *extra])


class TestSimulate:
    def test_writes_outputs(self, small_config, tmp_path):
        out = tmp_path / "out"
        assert simulate(small_config, out) == 0
        digest, table = read_replicate_csv(out / "small.csv")
        assert len(table) == 6
        assert {r["lam"] for r in table} == {100.0, 200.0}
        summary = read_json(out / "small.summary.json")
        assert summary["config_hash"] == digest
        assert not summary["tainted"]
        manifest = load_manifest(out / "small.manifest.json")
        assert manifest.config_hash == digest
        assert manifest.missing_or_unhashed() == []
        assert (out / "small.env").read_text().startswith(f"# config_hash={digest}")

    def test_deterministic_across_threads(self, small_config, tmp_path):
        assert simulate(small_config, tmp_path / "one", "--threads", "1") == 0
        assert simulate(small_config, tmp_path / "two", "--threads", "2") == 0
        assert (tmp_path / "one" / "small.csv").read_text() == (tmp_path / "two" / "small.csv").read_text()

    def test_seed_override_changes_samples(self, small_config, tmp_path):
        simulate(small_config, tmp_path / "a")
        simulate(small_config, tmp_path / "b", "--seed", "0xother")
        _, a = read_replicate_csv(tmp_path / "a" / "small.csv")
        _, b = read_replicate_csv(tmp_path / "b" / "small.csv")
        assert [r["n_points"] for r in a] != [r["n_points"] for r in b]

    def test_tainted_run(self, tmp_path):
        path = tmp_path / "coarse.env"
        path.write_text(SMALL.replace("100,200", "5,6").replace("replicates=3", "replicates=10")
                        .replace("margin_multiple=2", "margin_multiple=0"))
        assert simulate(path, tmp_path / "out") == 3
        assert read_json(tmp_path / "out" / "small.summary.json")["tainted"]


class TestExitCodes:
    def test_missing_config(self, tmp_path):
        assert main.main(["simulate", "--out", str(tmp_path)]) == 1

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.env"
        path.write_text(SMALL + "shape.radus=0.3\n")
        assert simulate(path, tmp_path) == 1

    def test_margin_violation(self, small_config, tmp_path):
        assert simulate(small_config, tmp_path, "--lambda-grid", "10,20") == 1

    def test_report_without_tables(self, tmp_path):
        assert main.main(["report", "--out", str(tmp_path)]) == 2


class TestFitAndReport:
    @pytest.fixture
    def power_csv(self, tmp_path, seed):
        rng = seed.rng()
        rows = []
        for lam in (250.0, 500.0, 1000.0, 2000.0):
            for r, noise in enumerate(rng.standard_normal(100)):
                rows.append({"lam": lam, "replicate": r, "iteration": 1,
                             "symdiff_volume": 0.4 * lam ** -0.5 * (1 + 0.05 * noise),
                             "surface": 1.6 + 0.01 * noise, "boundary_touch_flag": False})
        columns = ["lam", "replicate", "iteration", "symdiff_volume", "surface", "boundary_touch_flag"]
        return write_replicate_csv(tmp_path / "power.csv", rows, columns, "cd" * 32)

    def test_fit_command(self, power_csv, tmp_path, capsys):
        assert main.main(["fit", "--csv", str(power_csv), "--statistic", "symdiff_volume",
                          "--log-level", "WARNING"]) == 0
        fit = json.loads(capsys.readouterr().out)
        assert fit["slope"] == pytest.approx(-0.5, abs=0.02)
        stored = read_json(tmp_path / "power.fit.symdiff_volume.mean.json")
        assert stored["config_hash"] == "cd" * 32
        svg = tmp_path / "power.fit.symdiff_volume.mean.svg"
        assert "cd" * 32 in svg.read_text()

    def test_report_command(self, power_csv, tmp_path):
        assert main.main(["report", "--out", str(tmp_path), "--log-level", "WARNING"]) == 0
        report = read_json(tmp_path / "report.json")["power.csv"]
        assert report["fits"]["symdiff_volume:mean"]["slope"] == pytest.approx(-0.5, abs=0.02)
        assert report["surface_level"]["stable"]
        assert len(report["clt"]["reports"]) == 4


class TestConstants:
    def test_writes_estimates(self, tmp_path):
        code = main.main(["constants", "--d", "2", "--L", "8", "--h", "6", "--replicates", "3",
                          "--score", "surface,face_count_1", "--no-convergence", "--threads", "1",
                          "--seed", "0xtest", "--out", str(tmp_path), "--log-level", "WARNING"])
        assert code == 0
        data = read_json(tmp_path / "constants-d2.json")
        assert set(data["estimates"]) == {"surface", "face_count_1"}
        assert data["estimates"]["surface"]["value"] >= 1.0
        assert len(data["config_hash"]) == 64


class TestSelftest:
    @pytest.mark.slow
    def test_all_checks_pass(self, capsys):
        assert main.main(["selftest", "--log-level", "WARNING"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines
        assert all(line.startswith("[ok]") for line in lines)
