"""
Файл конфигурации эксперимента: строки KEY=value (формат python-dotenv),
секции — точечные префиксы experiment.*, shape.*, kappa.*, zone.*, fit.*.
"""

import difflib
import hashlib
import io
import logging
from pathlib import Path

from dotenv import dotenv_values

import config
from approximation import ALL_STATISTICS
from errors import ConfigError
from experiments.runner import ExperimentConfig

logger = logging.getLogger(__name__)

SHAPE_PARAMS = ("center", "radius", "lower", "upper", "centers", "radii", "r0", "harmonics",
                "u0", "v0", "width", "top", "slope", "curvature")
KAPPA_PARAMS = ("value", "base", "gradient")

VALID_KEYS = (
    ["experiment.name", "experiment.d", "experiment.lambda_grid", "experiment.replicates",
     "experiment.statistics", "experiment.iterations", "experiment.seed_root", "experiment.out_dir",
     "experiment.margin_multiple", "shape.kind"]
    + [f"shape.{p}" for p in SHAPE_PARAMS]
    + ["kappa.kind"] + [f"kappa.{p}" for p in KAPPA_PARAMS]
    + ["zone.subset", "zone.tolerance", "zone.epsilon", "fit.statistics", "fit.centering"]
)
REQUIRED_KEYS = ("experiment.lambda_grid", "shape.kind")


# ======================== Значения ========================

def _numbers(text: str):
    """'0.25' -> float, '0,0' -> [float], '0,0;0.1,0' -> [[float]]; завершающий разделитель допустим."""
    text = text.strip()
    if ";" in text:
        return [_floats(part) for part in text.split(";") if part.strip()]
    if "," in text:
        return _floats(text)
    return float(text)


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _emit_number(value) -> str:
    if isinstance(value, (list, tuple)) and value and isinstance(value[0], (list, tuple)):
        return ";".join(_emit_number(list(v)) for v in value) + (";" if len(value) == 1 else "")
    if isinstance(value, (list, tuple)):
        return ",".join(repr(float(v)) for v in value) + ("," if len(value) == 1 else "")
    return repr(float(value))


def _parse_subset(text: str):
    parts = text.strip().split(":")
    kind = parts[0]
    if kind == "whole" and len(parts) == 1:
        return None
    if kind in ("angular", "parameter") and len(parts) == 3:
        return {"kind": kind, "start": float(parts[1]), "stop": float(parts[2])}
    if kind == "side" and len(parts) == 2:
        return {"kind": "side", "side": int(parts[1])}
    raise ValueError(f"bad boundary subset {text!r} (whole | angular:a:b | parameter:a:b | side:k)")


def _emit_subset(subset) -> str:
    if subset is None:
        return "whole"
    if subset["kind"] == "side":
        return f"side:{int(subset['side'])}"
    return f"{subset['kind']}:{float(subset['start'])!r}:{float(subset['stop'])!r}"


def _strings(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


# ======================== Разбор ========================

def _line_numbers(text: str) -> dict[str, int]:
    """Номер строки каждого ключа; строка без '=' — ошибка разбора."""
    lines = {}
    for number, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"Expected KEY=value, got {stripped!r}", line=number)
        key = stripped.split("=", 1)[0].strip()
        if key.startswith("export "):
            key = key[len("export "):].strip()
        lines.setdefault(key, number)
    return lines


def parse_config(text: str) -> ExperimentConfig:
    lines = _line_numbers(text)
    values = dotenv_values(stream=io.StringIO(text))

    # python-dotenv пропускает непонятные строки с предупреждением
    for key, number in lines.items():
        if key not in values or values[key] is None:
            raise ConfigError(f"Cannot parse statement for {key!r}", line=number, key=key)

    for key in values:
        if key not in VALID_KEYS:
            close = difflib.get_close_matches(key, VALID_KEYS, n=1)
            hint = f"; did you mean {close[0]!r}?" if close else ""
            raise ConfigError(f"Unknown key {key!r}{hint}", line=lines.get(key), key=key)
    for key in REQUIRED_KEYS:
        if not values.get(key):
            raise ConfigError(f"Missing required key {key!r}", key=key)

    def get(key, convert, default=None):
        raw = values.get(key)
        if raw is None or raw == "":
            return default
        try:
            return convert(raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Bad value for {key}: {e}", line=lines.get(key), key=key) from e

    shape = {"kind": values["shape.kind"].strip()}
    for p in SHAPE_PARAMS:
        v = get(f"shape.{p}", _numbers)
        if v is not None:
            shape[p] = v
    kappa = {"kind": get("kappa.kind", str.strip, "constant")}
    for p in KAPPA_PARAMS:
        v = get(f"kappa.{p}", _numbers)
        if v is not None:
            kappa[p] = v
    if kappa == {"kind": "constant"}:
        kappa["value"] = 1.0

    zone = None
    if any(k.startswith("zone.") for k in values):
        zone = {
            "subset": get("zone.subset", _parse_subset),
            "tolerance": get("zone.tolerance", float, 1e-4),
            "epsilon": get("zone.epsilon", float, config.ZONE_EPSILON),
        }

    cfg = ExperimentConfig(
        shape=shape,
        lambda_grid=get("experiment.lambda_grid", _floats),
        d=get("experiment.d", int, 2),
        name=get("experiment.name", str.strip, "experiment"),
        kappa=kappa,
        replicates=get("experiment.replicates", int, 100),
        statistics=tuple(get("experiment.statistics", _strings, list(ALL_STATISTICS))),
        zone=zone,
        iterations=get("experiment.iterations", int, 1),
        seed_root=get("experiment.seed_root", str.strip, config.DEFAULT_SEED_ROOT),
        out_dir=get("experiment.out_dir", str.strip, config.OUT_DIR),
        margin_multiple=get("experiment.margin_multiple", float, config.MARGIN_MULTIPLE),
        fit=get("fit.statistics", _strings, []),
        centering=get("fit.centering", str.strip, "none"),
    )
    try:
        cfg.validate()
    except ConfigError as e:
        if e.key and e.line is None and e.key in lines:
            raise ConfigError(str(e), line=lines[e.key], key=e.key) from e
        raise
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    cfg = parse_config(path.read_text(encoding="utf-8"))
    logger.info(f"Loaded config {path} ({cfg.name}, hash {config_hash(cfg)[:12]})")
    return cfg


# ======================== Вывод ========================

def emit_config(cfg: ExperimentConfig) -> str:
    """Каноническая форма: parse_config(emit_config(c)) == c."""
    out = [
        f"experiment.name={cfg.name}",
        f"experiment.d={int(cfg.d)}",
        f"experiment.lambda_grid={','.join(repr(float(v)) for v in cfg.lambda_grid)}",
        f"experiment.replicates={int(cfg.replicates)}",
        f"experiment.statistics={','.join(cfg.statistics)}",
        f"experiment.iterations={int(cfg.iterations)}",
        f"experiment.seed_root={cfg.seed_root}",
        f"experiment.out_dir={cfg.out_dir}",
        f"experiment.margin_multiple={float(cfg.margin_multiple)!r}",
        f"shape.kind={cfg.shape['kind']}",
    ]
    out += [f"shape.{p}={_emit_number(cfg.shape[p])}" for p in SHAPE_PARAMS if p in cfg.shape]
    out.append(f"kappa.kind={cfg.kappa.get('kind', 'constant')}")
    out += [f"kappa.{p}={_emit_number(cfg.kappa[p])}" for p in KAPPA_PARAMS if p in cfg.kappa]
    if cfg.zone is not None:
        out += [
            f"zone.subset={_emit_subset(cfg.zone.get('subset'))}",
            f"zone.tolerance={float(cfg.zone.get('tolerance', 1e-4))!r}",
            f"zone.epsilon={float(cfg.zone.get('epsilon', config.ZONE_EPSILON))!r}",
        ]
    if cfg.fit:
        out.append(f"fit.statistics={','.join(cfg.fit)}")
    out.append(f"fit.centering={cfg.centering}")
    return "\n".join(out) + "\n"


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(emit_config(cfg).encode("utf-8")).hexdigest()
