"""
Запуск серии реплик по сетке λ: выборка, диаграмма, статистики.
Вывод детерминирован при фиксированном корне seed, независимо от числа потоков.
"""

import logging
from dataclasses import dataclass, field

import config
from approximation import ALL_STATISTICS, StatisticVector, compute_statistics, csv_columns, empty_statistics, iterate_pv
from errors import ConfigError
from geometry import build_voronoi
from pointprocess import SeedPath, as_seed, derive_seed, intensity_from_spec, sample_poisson_cube
from shapes import get_shape
from workers import run_tasks

logger = logging.getLogger(__name__)


@dataclass
class ExperimentConfig:
    shape: dict
    lambda_grid: list[float]
    d: int = 2
    name: str = "experiment"
    kappa: dict = field(default_factory=lambda: {"kind": "constant", "value": 1.0})
    replicates: int = 100
    statistics: tuple[str, ...] = ALL_STATISTICS
    zone: dict | None = None            # {"subset": dict | None, "tolerance": float, "epsilon": float}
    iterations: int = 1
    seed_root: str = config.DEFAULT_SEED_ROOT
    out_dir: str = config.OUT_DIR
    margin_multiple: float = config.MARGIN_MULTIPLE
    fit: list[str] = field(default_factory=list)      # "statistic:mean" | "statistic:variance"
    centering: str = "none"

    def validate(self):
        if self.d not in (2, 3):
            raise ConfigError(f"Unsupported dimension d={self.d}", key="experiment.d")
        grid = [float(v) for v in self.lambda_grid]
        if not grid or any(v <= 0 for v in grid):
            raise ConfigError("lambda_grid must contain positive values", key="experiment.lambda_grid")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("lambda_grid must be strictly increasing", key="experiment.lambda_grid")
        if self.fit and len(grid) < config.MIN_FIT_POINTS:
            raise ConfigError(f"Exponent fits need at least {config.MIN_FIT_POINTS} lambda values, "
                              f"got {len(grid)}", key="fit.statistics")
        if self.replicates < 1 or self.iterations < 1:
            raise ConfigError("replicates and iterations must be >= 1", key="experiment.replicates")
        unknown = set(self.statistics) - set(ALL_STATISTICS)
        if unknown:
            raise ConfigError(f"Unknown statistics: {sorted(unknown)}", key="experiment.statistics")
        if self.centering not in ("none", "subtract-known-limit"):
            raise ConfigError(f"Unknown centering: {self.centering}", key="fit.centering")
        for item in self.fit:
            if item.rsplit(":", 1)[-1] not in ("mean", "variance"):
                raise ConfigError(f"Fit entry {item!r} must end with :mean or :variance", key="fit.statistics")

    def build_shape(self):
        return get_shape({**self.shape, "d": self.d})

    def build_kappa(self, shape=None):
        return intensity_from_spec(self.kappa, shape or self.build_shape())


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[StatisticVector]
    taint_fraction: float
    tainted: bool

    @property
    def columns(self) -> list[str]:
        return csv_columns(self.config.d)

    def table(self) -> list[dict]:
        return [r.to_dict() for r in self.rows]


def replicate_seed(seed_root, lam: float, replicate: int) -> SeedPath:
    return derive_seed(derive_seed(as_seed(seed_root), f"lam{lam:g}"), f"rep{replicate}")


def zone_patch(cfg: ExperimentConfig, shape, kappa, lam: float):
    zone = cfg.zone or {}
    epsilon = float(zone.get("epsilon", config.ZONE_EPSILON))
    intensity = lam * kappa.sup_bound
    # запас 1/2, чтобы шаг гарантированно прошёл проверку зоны
    max_spacing = 0.5 * epsilon * intensity ** (-1.0 / cfg.d)
    patch = shape.boundary_patch(zone.get("subset"), float(zone.get("tolerance", 1e-4)), max_spacing)
    return patch, intensity


def run_replicate(task) -> list[StatisticVector]:
    cfg, lam, replicate = task
    shape = cfg.build_shape()
    kappa = cfg.build_kappa(shape)
    seed = replicate_seed(cfg.seed_root, lam, replicate)
    if cfg.iterations > 1:
        stats = tuple(s for s in cfg.statistics if s != "zone")
        return iterate_pv(shape, lam, cfg.iterations, kappa, cfg.d, seed, stats, replicate)

    sample = sample_poisson_cube(lam, kappa, cfg.d, seed)
    if sample.n == 0:
        return [empty_statistics(shape, lam, cfg.d, replicate)]
    diagram = build_voronoi(sample)
    patch, intensity = (None, None)
    if "zone" in cfg.statistics:
        patch, intensity = zone_patch(cfg, shape, kappa, lam)
    row = compute_statistics(diagram, shape, lam, replicate, 1, cfg.statistics, patch,
                             seed_path=seed, intensity=intensity)
    logger.debug(f"lambda={lam:g} replicate {replicate}: n={sample.n}, surface={row.surface:.5f}")
    return [row]


def check_margin(cfg: ExperimentConfig, shape) -> float:
    """Отказ от запуска, если A ближе к ∂Q, чем margin_multiple · λ_min^{-1/d}."""
    required = cfg.margin_multiple * min(cfg.lambda_grid) ** (-1.0 / cfg.d)
    if shape.margin() < required:
        raise ConfigError(f"Shape margin {shape.margin():.4f} below required {required:.4f} "
                          f"({cfg.margin_multiple:g} x lambda_min^(-1/d))", key="experiment.margin_multiple")
    return required


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    cfg.validate()
    shape = cfg.build_shape()
    check_margin(cfg, shape)
    tasks = [(cfg, float(lam), r) for lam in cfg.lambda_grid for r in range(cfg.replicates)]
    logger.info(f"Experiment {cfg.name}: {len(cfg.lambda_grid)} lambda values x {cfg.replicates} replicates, "
                f"shape {shape.kind}, d={cfg.d}")

    rows = [row for batch in run_tasks(run_replicate, tasks, threads) for row in batch]
    rows.sort(key=lambda r: (r.lam, r.replicate, r.iteration))

    touched = {(r.lam, r.replicate) for r in rows if r.boundary_touch_flag}
    fraction = len(touched) / len(tasks)
    tainted = fraction > config.TAINT_THRESHOLD
    if tainted:
        logger.warning(f"Experiment {cfg.name} tainted: {fraction:.2%} of replicates touch the cube boundary")
    warned = sum(r.precision_warning for r in rows)
    if warned:
        logger.warning(f"{warned} replicates carry a symmetric-difference precision warning")
    logger.info(f"Experiment {cfg.name} finished: {len(rows)} rows")
    return ExperimentResult(cfg, rows, fraction, tainted)
