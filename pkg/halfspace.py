"""
Опорная модель полупространства: оценка универсальных констант предельных
теорем симуляцией PV-аппроксимации {x_d <= 0} на периодическом слое
единичной интенсивности.
"""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

import config
from approximation import classify, skeleton_statistics, surface_statistic
from errors import ConfigError, UsageError
from geometry import build_voronoi
from geometry.polytope import clipped_volume
from pointprocess import as_seed, derive_seed, sample_poisson_slab
from shapes import HalfSpaceReference
from workers import run_tasks

logger = logging.getLogger(__name__)

BASE_SCORES = ("signed_volume", "symdiff_volume", "surface", "zone_complexity")


def score_kinds(d: int) -> list[str]:
    kinds = list(BASE_SCORES)
    kinds += [f"skeleton_{ell}" for ell in range(d)]
    kinds += [f"face_count_{ell}" for ell in range(d)]
    return kinds


def homogeneity_order(score_kind: str, d: int) -> float:
    """γ оценки: d для объёма, d-1 для поверхности, ℓ для скелета, 0 для счётчиков."""
    if score_kind in ("signed_volume", "symdiff_volume"):
        return float(d)
    if score_kind == "surface":
        return float(d - 1)
    if score_kind.startswith("skeleton_"):
        return float(int(score_kind.rsplit("_", 1)[1]))
    if score_kind.startswith("face_count_") or score_kind == "zone_complexity":
        return 0.0
    raise UsageError(f"Unknown score kind: {score_kind}")


@dataclass
class HalfSpaceEstimate:
    score_kind: str
    d: int
    value: float
    std_error: float
    L: float
    h: float
    replicates: int
    used: int
    discarded: int
    convergence_flag: bool
    value_2h: float = math.nan
    std_error_2h: float = math.nan
    tau: float = 1.0
    seed_root: str = ""
    per_replicate: list = field(default_factory=list, repr=False)

    @property
    def gamma(self) -> float:
        return homogeneity_order(self.score_kind, self.d)

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("per_replicate")
        out["gamma"] = self.gamma
        return out

    @classmethod
    def from_json(cls, data: dict) -> "HalfSpaceEstimate":
        data = {k: v for k, v in data.items() if k != "gamma"}
        return cls(**data)


# ======================== Оценки одной реплики ========================

def replicate_scores(d: int, L: float, h: float, seed_path, tau: float = 1.0) -> dict | None:
    """
    Все оценки одной реплики на единицу боковой площади.
    None — реплика загрязнена: участвующая ячейка или её соседи ближе h/2 к крышкам.
    """
    sample = sample_poisson_slab(tau, L, h, d, seed_path)
    diagram = build_voronoi(sample)
    cls = classify(diagram, HalfSpaceReference(d))
    normal = np.zeros(d)
    normal[-1] = 1.0

    signed = symdiff = 0.0
    zone = []
    for cell in diagram.cells:
        z = cell.vertices[:, -1]
        if np.all(z <= 0) or np.all(z >= 0):
            continue
        zone.append(cell.index)
        below = clipped_volume(cell.vertices, cell.edges, normal, 0.0)
        part = cell.volume - below if cls.inside[cell.index] else below
        signed += part if cls.inside[cell.index] else -part
        symdiff += part

    involved = set(zone)
    for face in cls.boundary_facets:
        involved.update(g for g in face.generator_key)
    for i in involved:
        if np.any(np.abs(diagram.neighbor_vertices(i)[:, -1]) > 0.5 * h):
            return None

    area = sample.domain.lateral_area
    scores = {
        "signed_volume": signed / area,
        "symdiff_volume": symdiff / area,
        "surface": surface_statistic(cls) / area,
    }
    for ell in range(d):
        sk = skeleton_statistics(cls, ell)
        scores[f"skeleton_{ell}"] = sk.cell_weighted / area
        scores[f"face_count_{ell}"] = sk.face_count / area
    keys = set()
    for i in zone:
        for dim in range(d):
            keys.update((dim, k) for k in diagram.cells[i].face_keys(dim))
    scores["zone_complexity"] = len(keys) / area
    return scores


def _replicate_task(task):
    d, L, h, seed, tau = task
    return replicate_scores(d, L, h, seed, tau)


def _aggregate(rows: list, kind: str) -> tuple[float, float]:
    values = np.array([r[kind] for r in rows])
    if len(values) < 2:
        return float(values.mean()) if len(values) else math.nan, math.nan
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values)))


def _run_slab(d, L, h, replicates, seed, tau, threads):
    tasks = [(d, L, h, derive_seed(seed, f"h{h:g}/rep{r}"), tau) for r in range(replicates)]
    rows = run_tasks(_replicate_task, tasks, threads)
    kept = [r for r in rows if r is not None]
    return kept, len(rows) - len(kept)


# ======================== Оценка констант ========================

def estimate_constants(kinds, d: int, L: float | None = None, h: float | None = None,
                       replicates: int | None = None, seed_path=None, tau: float = 1.0,
                       check_convergence: bool = True, threads: int | None = None) -> dict:
    """Оценки нескольких констант по общему набору реплик (и повтор при 2h)."""
    defaults = config.SLAB_DEFAULTS.get(d)
    if defaults is None:
        raise ConfigError(f"Unsupported dimension d={d}")
    L = float(L or defaults["L"])
    h = float(h or defaults["h"])
    replicates = int(replicates or config.SLAB_REPLICATES)
    if replicates < 2:
        raise ConfigError("Half-space estimation needs at least 2 replicates")
    valid = score_kinds(d)
    for kind in kinds:
        if kind not in valid:
            raise UsageError(f"Unknown score kind {kind!r}; expected one of {valid}")
    seed = as_seed(seed_path if seed_path is not None else config.DEFAULT_SEED_ROOT)
    spacing = tau ** (-1.0 / d)
    if L < 10 * spacing or h < 5 * spacing:
        logger.warning(f"Slab L={L}, h={h} is small relative to the cell scale {spacing:.3g}")

    rows, discarded = _run_slab(d, L, h, replicates, seed, tau, threads)
    if discarded:
        logger.warning(f"Discarded {discarded}/{replicates} cap-contaminated slab replicates (h={h})")
    if not rows:
        raise UsageError(f"All {replicates} slab replicates were cap-contaminated; increase h")
    rows_2h = []
    if check_convergence:
        rows_2h, _ = _run_slab(d, L, 2 * h, replicates, seed, tau, threads)

    out = {}
    for kind in kinds:
        value, se = _aggregate(rows, kind)
        scale = tau ** ((d - 1 - homogeneity_order(kind, d)) / d)
        est = HalfSpaceEstimate(kind, d, value / scale, se / scale, L, h, replicates, len(rows), discarded,
                                convergence_flag=False, tau=tau, seed_root=str(seed),
                                per_replicate=[r[kind] / scale for r in rows])
        if rows_2h:
            v2, s2 = _aggregate(rows_2h, kind)
            est.value_2h, est.std_error_2h = v2 / scale, s2 / scale
            est.convergence_flag = bool(abs(est.value - est.value_2h)
                                        <= 2.0 * math.hypot(est.std_error, est.std_error_2h))
            if not est.convergence_flag:
                logger.warning(f"Half-space estimate {kind} not stable under h-doubling: "
                               f"{est.value:.5g} vs {est.value_2h:.5g}")
        out[kind] = est
        logger.info(f"Half-space constant {kind} (d={d}): {est.value:.6g} ± {est.std_error:.2g}")
    return out


def estimate_constant(score_kind: str, d: int, L: float | None = None, h: float | None = None,
                      replicates: int | None = None, seed_path=None, tau: float = 1.0,
                      check_convergence: bool = True, threads: int | None = None) -> HalfSpaceEstimate:
    return estimate_constants([score_kind], d, L, h, replicates, seed_path, tau,
                              check_convergence, threads)[score_kind]


def predict_mean(estimate: HalfSpaceEstimate, shape, kappa, gamma: float, lam: float) -> float:
    """Первый порядок: c · ℋ^{d-1}_{κ,γ}(∂A) · λ^{(d-1-γ)/d}."""
    expected = homogeneity_order(estimate.score_kind, estimate.d)
    if abs(gamma - expected) > 1e-12:
        raise UsageError(f"Score {estimate.score_kind} is homogeneous of order {expected:g}, not {gamma:g}")
    d = estimate.d
    content = shape.weighted_surface_content(kappa, gamma)
    return estimate.value * content * lam ** ((d - 1 - gamma) / d)
