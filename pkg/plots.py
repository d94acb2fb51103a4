"""
Лог-лог графики подгонок: SVG через matplotlib без интерактивного бэкенда,
хэш конфигурации записывается в метаданные SVG.
"""

import logging
import math
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from experiments.fitting import ScalingFit, group_by_lambda

logger = logging.getLogger(__name__)


def plot_fit(fit: ScalingFit, table: list[dict], path, config_hash: str) -> Path:
    """Точки — моменты по сетке λ с погрешностями, линия — подогнанный степенной закон."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    groups = group_by_lambda(table, fit.statistic)
    lambdas = np.array(fit.lambdas)
    values = np.array(fit.values)
    errors = []
    for lam in fit.lambdas:
        v = groups[lam]
        n = len(v)
        if fit.moment == "mean":
            errors.append(v.std(ddof=1) / math.sqrt(n) if n > 1 else 0.0)
        else:
            errors.append(v.var(ddof=1) * math.sqrt(2.0 / (n - 1)) if n > 1 else 0.0)

    fig = Figure(figsize=(6, 4.5))
    ax = fig.subplots()
    ax.errorbar(lambdas, values, yerr=errors, fmt="o", capsize=3, label=f"{fit.moment} of {fit.statistic}")
    grid = np.geomspace(lambdas.min(), lambdas.max(), 100)
    ax.plot(grid, fit.predicted(grid), "-",
            label=f"slope {fit.slope:.3f} [{fit.slope_ci[0]:.3f}, {fit.slope_ci[1]:.3f}]")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("lambda")
    ax.set_ylabel(f"{fit.moment} of {fit.statistic}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={
        "Title": f"{fit.moment} {fit.statistic}",
        "Description": f"config_hash={config_hash}",
        "Date": None,
    })
    logger.info(f"Wrote plot {path}")
    return path
