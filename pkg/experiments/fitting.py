"""
Подгонка степенных законов по сетке λ, тесты инвариантности, уровня и
сравнения с предсказанием полупространственной модели.
"""

import logging
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

import config
from errors import ConfigError, FitError, TaintedResultsError, UsageError
from halfspace import predict_mean
from pointprocess import as_seed, derive_seed

logger = logging.getLogger(__name__)

Z95 = float(stats.norm.ppf(0.975))


def group_by_lambda(table: list[dict], statistic: str, iteration: int | None = None) -> dict[float, np.ndarray]:
    groups = defaultdict(list)
    for row in table:
        if iteration is not None and int(row.get("iteration", 1)) != iteration:
            continue
        if statistic not in row:
            raise UsageError(f"Statistic {statistic!r} not in replicate table")
        groups[float(row["lam"])].append(float(row[statistic]))
    return {lam: np.array(values) for lam, values in sorted(groups.items())}


def taint_fraction(table: list[dict]) -> float:
    replicates = {(float(r["lam"]), int(r["replicate"])) for r in table}
    touched = {(float(r["lam"]), int(r["replicate"])) for r in table
               if str(r.get("boundary_touch_flag")).lower() in ("true", "1")}
    return len(touched) / max(len(replicates), 1)


def _moment(values: np.ndarray, moment: str) -> float:
    if moment == "mean":
        return float(values.mean())
    return float(values.var(ddof=1))


@dataclass
class ScalingFit:
    statistic: str
    moment: str
    slope: float
    slope_ci: tuple[float, float]
    intercept: float
    intercept_ci: tuple[float, float]
    r_squared: float
    centering: str
    lambdas: list[float]
    values: list[float]
    residuals: list[float]
    replicates: list[int]
    d: int = 2
    kappa_label: str = ""
    tainted: bool = False
    bootstrap_intercepts: list = field(default_factory=list, repr=False)

    def predicted(self, lam) -> np.ndarray:
        return np.exp(self.intercept) * np.asarray(lam, dtype=float) ** self.slope

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("bootstrap_intercepts")
        return out


def _log_fit(lambdas: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(np.log(lambdas), np.log(values), 1)
    return float(slope), float(intercept)


def fit_scaling(table: list[dict], statistic: str, moment: str = "mean", centering: str = "none",
                known_limit: float = 0.0, resamples: int | None = None, seed_path=None,
                min_replicates: int | None = None, d: int = 2, kappa_label: str = "",
                iteration: int | None = None) -> ScalingFit:
    """
    МНК log(момент) ~ log λ; доверительные интервалы — бутстреп реплик внутри
    каждого λ. centering="subtract-known-limit" вычитает known_limit (например, V(A)).
    """
    if moment not in ("mean", "variance"):
        raise UsageError(f"moment must be 'mean' or 'variance', got {moment}")
    if centering not in ("none", "subtract-known-limit"):
        raise UsageError(f"Unknown centering: {centering}")
    resamples = config.BOOTSTRAP_RESAMPLES if resamples is None else resamples
    min_replicates = config.MIN_FIT_REPLICATES if min_replicates is None else min_replicates

    groups = group_by_lambda(table, statistic, iteration)
    if len(groups) < config.MIN_FIT_POINTS:
        raise ConfigError(f"Fit of {statistic} needs at least {config.MIN_FIT_POINTS} lambda values, "
                          f"got {len(groups)}")
    short = {lam: len(v) for lam, v in groups.items() if len(v) < min_replicates}
    if short:
        raise ConfigError(f"Fit of {statistic} needs >= {min_replicates} replicates per lambda: {short}")
    shift = known_limit if centering == "subtract-known-limit" else 0.0
    groups = {lam: v - shift for lam, v in groups.items()}

    lambdas = np.array(list(groups))
    values = np.array([_moment(v, moment) for v in groups.values()])
    if np.any(values <= 0):
        bad = {float(lam): float(v) for lam, v in zip(lambdas, values) if v <= 0}
        raise FitError(f"Cannot fit {moment} of {statistic}: non-positive values {bad}")

    reg = stats.linregress(np.log(lambdas), np.log(values))
    residuals = np.log(values) - (reg.intercept + reg.slope * np.log(lambdas))

    rng = derive_seed(as_seed(seed_path if seed_path is not None else config.DEFAULT_SEED_ROOT),
                      f"bootstrap/{statistic}/{moment}").rng()
    slopes, intercepts, skipped = [], [], 0
    for _ in range(resamples):
        boot = np.array([_moment(v[rng.integers(0, len(v), len(v))], moment) for v in groups.values()])
        if np.any(boot <= 0):
            skipped += 1
            continue
        s, i = _log_fit(lambdas, boot)
        slopes.append(s)
        intercepts.append(i)
    if skipped:
        logger.warning(f"Bootstrap of {statistic}: {skipped}/{resamples} resamples had non-positive moments")
    if slopes:
        slope_ci = tuple(float(x) for x in np.percentile(slopes, [2.5, 97.5]))
        intercept_ci = tuple(float(x) for x in np.percentile(intercepts, [2.5, 97.5]))
    else:
        slope_ci = intercept_ci = (math.nan, math.nan)
    # CI по построению содержит точечную оценку
    slope_ci = (min(slope_ci[0], reg.slope), max(slope_ci[1], reg.slope))
    intercept_ci = (min(intercept_ci[0], reg.intercept), max(intercept_ci[1], reg.intercept))

    fit = ScalingFit(
        statistic=statistic, moment=moment, slope=float(reg.slope), slope_ci=slope_ci,
        intercept=float(reg.intercept), intercept_ci=intercept_ci, r_squared=float(reg.rvalue ** 2),
        centering=centering, lambdas=lambdas.tolist(), values=values.tolist(),
        residuals=residuals.tolist(), replicates=[len(v) for v in groups.values()],
        d=d, kappa_label=kappa_label, tainted=taint_fraction(table) > config.TAINT_THRESHOLD,
        bootstrap_intercepts=intercepts,
    )
    logger.info(f"Fit {moment} {statistic}: slope {fit.slope:.4f} "
                f"[{fit.slope_ci[0]:.4f}, {fit.slope_ci[1]:.4f}], R^2={fit.r_squared:.4f}")
    return fit


def variance_positivity_expected(shape, kappa) -> bool:
    """Положительность предельной дисперсии известна лишь для ∂A с C²-участком и κ ≡ 1."""
    return bool(shape.c2_boundary and kappa.is_unit)


# ======================== Инвариантность ========================

@dataclass
class InvarianceReport:
    statistic: str
    prefactor_ratio: float
    prefactor_ratio_ci: tuple[float, float]
    content_ratio: float
    ratio_of_ratios: float
    ratio_of_ratios_ci: tuple[float, float]
    contains_one: bool

    def to_json(self) -> dict:
        return asdict(self)


def invariance_test(fit_a: ScalingFit, content_a: float, fit_b: ScalingFit, content_b: float) -> InvarianceReport:
    """Отношение префакторов exp(i_A - i_B) против отношения κ-взвешенных площадей границ."""
    for attr in ("statistic", "moment", "d", "kappa_label"):
        if getattr(fit_a, attr) != getattr(fit_b, attr):
            raise UsageError(f"Fits differ in {attr}: {getattr(fit_a, attr)!r} vs {getattr(fit_b, attr)!r}")
    if fit_a.tainted or fit_b.tainted:
        raise TaintedResultsError("Invariance test needs untainted fits")
    if not (content_a > 0 and content_b > 0):
        raise UsageError("Surface contents must be positive")

    ratio = math.exp(fit_a.intercept - fit_b.intercept)
    m = min(len(fit_a.bootstrap_intercepts), len(fit_b.bootstrap_intercepts))
    if m:
        diffs = np.exp(np.asarray(fit_a.bootstrap_intercepts[:m]) - np.asarray(fit_b.bootstrap_intercepts[:m]))
        lo, hi = (float(x) for x in np.percentile(diffs, [2.5, 97.5]))
        lo, hi = min(lo, ratio), max(hi, ratio)
    else:
        lo = hi = ratio
    content_ratio = content_a / content_b
    report = InvarianceReport(
        statistic=fit_a.statistic,
        prefactor_ratio=ratio,
        prefactor_ratio_ci=(lo, hi),
        content_ratio=content_ratio,
        ratio_of_ratios=ratio / content_ratio,
        ratio_of_ratios_ci=(lo / content_ratio, hi / content_ratio),
        contains_one=lo / content_ratio <= 1.0 <= hi / content_ratio,
    )
    logger.info(f"Invariance {fit_a.statistic}: ratio of ratios {report.ratio_of_ratios:.4f} "
                f"[{report.ratio_of_ratios_ci[0]:.4f}, {report.ratio_of_ratios_ci[1]:.4f}]")
    return report


# ======================== Сравнение с предсказанием и уровень ========================

@dataclass
class PredictionCheck:
    lam: float
    mean: float
    std_error: float
    predicted: float
    predicted_error: float
    z: float
    passed: bool


def prediction_test(table: list[dict], statistic: str, estimate, shape, kappa, gamma: float,
                    lambdas=None) -> list[PredictionCheck]:
    """Среднее при конечном λ против c · ℋ^{d-1}_{κ,γ}(∂A) · λ^{(d-1-γ)/d} с объединённой погрешностью."""
    groups = group_by_lambda(table, statistic)
    checks = []
    for lam, values in groups.items():
        if lambdas is not None and lam not in lambdas:
            continue
        mean = float(values.mean())
        se = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else math.nan
        predicted = predict_mean(estimate, shape, kappa, gamma, lam)
        predicted_error = abs(predicted) * estimate.std_error / abs(estimate.value) if estimate.value else math.nan
        z = (mean - predicted) / math.hypot(se, predicted_error)
        checks.append(PredictionCheck(lam, mean, se, predicted, predicted_error, z, abs(z) <= Z95))
    return checks


@dataclass
class LevelReport:
    statistic: str
    lambdas: list[float]
    means: list[float]
    std_errors: list[float]
    grand_mean: float
    stable: bool


def level_test(table: list[dict], statistic: str, k_sigma: float = 3.0) -> LevelReport:
    """Статистика с нулевым показателем: средние по сетке совпадают с общим средним в пределах k·SE."""
    groups = group_by_lambda(table, statistic)
    means = [float(v.mean()) for v in groups.values()]
    ses = [float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else math.inf for v in groups.values()]
    weights = np.array([1.0 / s ** 2 if s > 0 else 0.0 for s in ses])
    grand = float(np.average(means, weights=weights)) if weights.sum() > 0 else float(np.mean(means))
    stable = all(abs(m - grand) <= k_sigma * s for m, s in zip(means, ses))
    return LevelReport(statistic, list(groups), means, ses, grand, stable)
