"""
Файлы результатов: CSV реплик (первая строка — хэш конфигурации), JSON сводок,
подгонок и констант, манифест запуска с метками времени.
"""

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np
import pytz

import config
from errors import DataError

logger = logging.getLogger(__name__)

HASH_PREFIX = "# config_hash="


def now_iso() -> str:
    return datetime.now(pytz.timezone(config.TIMEZONE)).isoformat(timespec="seconds")


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "nan" if math.isnan(value) else repr(float(value))
    return str(value)


def _parse(text: str):
    if text in ("true", "false"):
        return text == "true"
    try:
        return float(text)
    except ValueError:
        return text


# ======================== CSV ========================

def write_replicate_csv(path, rows: list[dict], columns: list[str], config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{HASH_PREFIX}{config_hash}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(row.get(c, math.nan)) for c in columns])
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def read_replicate_csv(path) -> tuple[str, list[dict]]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"Replicate table not found: {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith(HASH_PREFIX):
            raise DataError(f"{path}: first line must be '{HASH_PREFIX}<sha256>'")
        reader = csv.DictReader(fh)
        rows = [{k: _parse(v) for k, v in r.items()} for r in reader]
    return first[len(HASH_PREFIX):], rows


# ======================== JSON ========================

def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "to_json"):
        return value.to_json()
    raise TypeError(f"Not JSON serializable: {type(value).__name__}")


def write_json(path, data: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
    return path


def read_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise DataError(f"JSON file not found: {path}")
    return json.loads(path.read_text(encoding="utf-8"))


def summarize(rows: list[dict], columns: list[str]) -> dict:
    """Средние, дисперсии и стандартные ошибки каждой числовой колонки по λ (и итерации)."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((float(row["lam"]), int(row.get("iteration", 1))), []).append(row)
    skip = {"lam", "replicate", "iteration"}
    out = []
    for (lam, iteration), members in sorted(groups.items()):
        entry = {"lam": lam, "iteration": iteration, "replicates": len(members), "statistics": {}}
        for col in columns:
            if col in skip:
                continue
            values = np.array([float(m[col]) for m in members], dtype=float)
            values = values[~np.isnan(values)]
            if len(values) == 0:
                continue
            entry["statistics"][col] = {
                "mean": float(values.mean()),
                "variance": float(values.var(ddof=1)) if len(values) > 1 else math.nan,
                "std_error": float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else math.nan,
            }
        out.append(entry)
    return {"groups": out}


# ======================== Манифест ========================

@dataclass
class RunManifest:
    config_hash: str
    seed_root: str
    code_version: str = config.CODE_VERSION
    started: str = field(default_factory=now_iso)
    finished: str = ""
    experiments: list[dict] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)

    def add_output(self, path):
        self.outputs.append(str(path))

    def finish(self):
        self.finished = now_iso()

    def to_json(self) -> dict:
        return asdict(self)

    def missing_or_unhashed(self) -> list[str]:
        """Файлы из списка, которых нет или в которых нет хэша конфигурации."""
        bad = []
        for name in self.outputs:
            path = Path(name)
            if not path.exists() or self.config_hash not in path.read_text(encoding="utf-8", errors="replace"):
                bad.append(name)
        return bad


def write_manifest(path, manifest: RunManifest) -> Path:
    manifest.finish()
    bad = manifest.missing_or_unhashed()
    if bad:
        logger.warning(f"Manifest lists files without the config hash: {bad}")
    return write_json(path, manifest.to_json())


def load_manifest(path) -> RunManifest:
    return RunManifest(**read_json(path))
