"""Тесты файлов результатов и манифеста."""

import math

import pytest

from errors import DataError
from results import (
    RunManifest,
    load_manifest,
    now_iso,
    read_json,
    read_replicate_csv,
    summarize,
    write_json,
    write_manifest,
    write_replicate_csv,
)

COLUMNS = ["lam", "replicate", "iteration", "surface", "zone_complexity", "boundary_touch_flag"]
HASH = "ab" * 32


def rows():
    return [
        {"lam": 100.0, "replicate": 0, "iteration": 1, "surface": 1.5, "zone_complexity": math.nan,
         "boundary_touch_flag": False},
        {"lam": 100.0, "replicate": 1, "iteration": 1, "surface": 1.7, "zone_complexity": math.nan,
         "boundary_touch_flag": True},
        {"lam": 200.0, "replicate": 0, "iteration": 1, "surface": 1.6, "zone_complexity": 12,
         "boundary_touch_flag": False},
    ]


class TestCSV:
    def test_header_and_values(self, tmp_path):
        path = write_replicate_csv(tmp_path / "run.csv", rows(), COLUMNS, HASH)
        lines = path.read_text().splitlines()
        assert lines[0] == f"# config_hash={HASH}"
        assert lines[1] == ",".join(COLUMNS)
        digest, table = read_replicate_csv(path)
        assert digest == HASH
        assert table[1]["boundary_touch_flag"] is True
        assert table[0]["surface"] == 1.5
        assert math.isnan(table[0]["zone_complexity"])
        assert table[2]["zone_complexity"] == 12.0

    def test_missing_columns_are_nan(self, tmp_path):
        path = write_replicate_csv(tmp_path / "run.csv", [{"lam": 1.0}], ["lam", "surface"], HASH)
        _, table = read_replicate_csv(path)
        assert math.isnan(table[0]["surface"])

    def test_missing_hash_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("lam,surface\n1,2\n")
        with pytest.raises(DataError):
            read_replicate_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            read_replicate_csv(tmp_path / "absent.csv")


class TestSummary:
    def test_groups(self):
        summary = summarize(rows(), COLUMNS)
        first, second = summary["groups"]
        assert (first["lam"], first["replicates"]) == (100.0, 2)
        assert first["statistics"]["surface"]["mean"] == pytest.approx(1.6)
        assert first["statistics"]["surface"]["variance"] == pytest.approx(0.02)
        assert "zone_complexity" not in first["statistics"]
        assert math.isnan(second["statistics"]["surface"]["variance"])

    def test_json_round_trip(self, tmp_path):
        path = write_json(tmp_path / "s.json", {"config_hash": HASH, **summarize(rows(), COLUMNS)})
        assert read_json(path)["groups"][0]["replicates"] == 2


class TestManifest:
    def test_lists_hashed_outputs(self, tmp_path):
        manifest = RunManifest(config_hash=HASH, seed_root="0xtest")
        manifest.add_output(write_replicate_csv(tmp_path / "run.csv", rows(), COLUMNS, HASH))
        manifest.add_output(write_json(tmp_path / "s.json", {"config_hash": HASH}))
        path = write_manifest(tmp_path / "run.manifest.json", manifest)
        loaded = load_manifest(path)
        assert loaded.outputs == manifest.outputs
        assert loaded.finished
        assert loaded.missing_or_unhashed() == []

    def test_detects_unhashed(self, tmp_path):
        stray = tmp_path / "stray.json"
        stray.write_text("{}")
        manifest = RunManifest(config_hash=HASH, seed_root="0xtest")
        manifest.add_output(stray)
        manifest.add_output(tmp_path / "gone.csv")
        assert manifest.missing_or_unhashed() == [str(stray), str(tmp_path / "gone.csv")]

    def test_timestamps_carry_offset(self):
        stamp = now_iso()
        assert stamp[-6] in "+-"
