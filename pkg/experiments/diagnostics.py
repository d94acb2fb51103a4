"""
Диагностика ЦПТ (расстояние Колмогорова–Смирнова до N(0,1)) и проверка
итерированной аппроксимации против геометрической суммы c_{2,n}.
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

import config
from errors import DegenerateStatisticError, TaintedResultsError, UsageError

from .fitting import Z95, group_by_lambda, taint_fraction

logger = logging.getLogger(__name__)


def _dimension(table: list[dict]) -> int:
    return sum(1 for key in table[0] if key.startswith("face_count_")) if table else 2


@dataclass
class CLTReport:
    lam: float
    replicates: int
    statistic: str
    ks_distance: float
    pass_threshold: float
    passed: bool
    rate_reference: float       # (log λ)^{3d+1} λ^{-(d-1)/2d}, с точностью до константы

    def to_json(self) -> dict:
        return asdict(self)


def ks_distance_normal(values) -> float:
    values = np.asarray(values, dtype=float)
    sd = values.std(ddof=1) if len(values) > 1 else 0.0
    if not sd > 0:
        raise DegenerateStatisticError("Statistic has zero empirical variance")
    return float(stats.kstest((values - values.mean()) / sd, "norm").statistic)


def clt_diagnostic(table: list[dict], lam: float, statistic: str = "surface",
                   min_replicates: int | None = None, d: int | None = None) -> CLTReport:
    min_replicates = config.MIN_CLT_REPLICATES if min_replicates is None else min_replicates
    groups = group_by_lambda(table, statistic)
    values = groups.get(float(lam))
    if values is None:
        raise UsageError(f"No replicates at lambda={lam:g}")
    if len(values) < min_replicates:
        raise UsageError(f"CLT diagnostic needs >= {min_replicates} replicates, got {len(values)}")
    d = d or _dimension(table)
    ks = ks_distance_normal(values)
    threshold = float(stats.kstwo.ppf(0.99, len(values)))
    rate = math.log(lam) ** (3 * d + 1) * lam ** (-(d - 1) / (2 * d))
    report = CLTReport(float(lam), len(values), statistic, ks, threshold, ks <= threshold, rate)
    logger.info(f"CLT {statistic} at lambda={lam:g}: KS={ks:.4f} (1% critical {threshold:.4f})")
    return report


@dataclass
class CLTTrend:
    reports: list[CLTReport]
    improving_pairs: int
    total_pairs: int
    endpoint_decrease: bool

    @property
    def majority_improving(self) -> bool:
        return self.improving_pairs * 2 > self.total_pairs


def clt_trend(table: list[dict], statistic: str = "surface", min_replicates: int | None = None) -> CLTTrend:
    lambdas = sorted(group_by_lambda(table, statistic))
    reports = [clt_diagnostic(table, lam, statistic, min_replicates) for lam in lambdas]
    improving = sum(b.ks_distance < a.ks_distance for a, b in zip(reports, reports[1:]))
    return CLTTrend(reports, improving, max(len(reports) - 1, 0),
                    len(reports) > 1 and reports[-1].ks_distance < reports[0].ks_distance)


# ======================== Итерированная аппроксимация ========================

@dataclass
class IteratedCheck:
    iteration: int
    mean: float
    std_error: float
    ratio: float
    ratio_error: float
    predicted: float
    predicted_error: float
    passed: bool


def geometric_factor(c2: float, n: int) -> float:
    """c_{2,n} = 1 + c₂ + … + c₂^{n-1}."""
    return float(sum(c2 ** k for k in range(n)))


def iterated_prediction_test(table: list[dict], c2_estimate, statistic: str = "symdiff_volume",
                             min_replicates: int | None = None) -> list[IteratedCheck]:
    """
    Отношение E stat^{(n)} / E stat^{(1)} против c_{2,n}; c₂ берётся из
    полупространственной оценки поверхности. Погрешности — дельта-метод.
    """
    min_replicates = config.MIN_ITERATED_REPLICATES if min_replicates is None else min_replicates
    if taint_fraction(table) > config.TAINT_THRESHOLD:
        raise TaintedResultsError("Iterated runs are tainted by boundary contact")
    c2 = float(getattr(c2_estimate, "value", c2_estimate))
    c2_se = float(getattr(c2_estimate, "std_error", 0.0))

    iterations = sorted({int(r.get("iteration", 1)) for r in table})
    if 1 not in iterations:
        raise UsageError("Iterated table needs iteration 1 as the reference")
    moments = {}
    for n in iterations:
        groups = group_by_lambda(table, statistic, iteration=n)
        if len(groups) != 1:
            raise UsageError("Iterated prediction test expects a single fixed lambda")
        values = next(iter(groups.values()))
        if len(values) < min_replicates:
            raise UsageError(f"Iteration {n} has {len(values)} replicates, need >= {min_replicates}")
        moments[n] = (float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values))))

    m1, s1 = moments[1]
    checks = []
    for n in iterations:
        mean, se = moments[n]
        ratio = mean / m1
        ratio_error = abs(ratio) * math.hypot(se / mean if mean else 0.0, s1 / m1) if n != 1 else 0.0
        predicted = geometric_factor(c2, n)
        predicted_error = c2_se * sum(k * c2 ** (k - 1) for k in range(1, n))
        combined = math.hypot(ratio_error, predicted_error)
        passed = abs(ratio - predicted) <= Z95 * combined if combined > 0 else abs(ratio - predicted) < 1e-12
        checks.append(IteratedCheck(n, mean, se, ratio, ratio_error, predicted, predicted_error, passed))
        logger.info(f"Iteration {n}: ratio {ratio:.4f} ± {ratio_error:.4f}, c_2,n = {predicted:.4f}")
    return checks
