"""
Пуассоновские точечные процессы.
  - неоднородный процесс интенсивности λκ на кубе Q = [-1/2, 1/2]^d (прореживание)
  - однородный процесс на слое [0, L]^{d-1} x [-h, h] с периодичностью по боковым осям
  - иерархические seed-пути со счётчиковым генератором Philox
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from errors import ConfigError, DataError

logger = logging.getLogger(__name__)

AXIS_NAMES = "xyz"


# ======================== Seed-пути ========================

@dataclass(frozen=True)
class SeedPath:
    """Иерархический идентификатор потока случайных чисел: root/label/label/..."""

    root: str
    labels: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "/".join((self.root,) + self.labels)

    @classmethod
    def parse(cls, text: str) -> "SeedPath":
        parts = str(text).split("/")
        return cls(parts[0], tuple(parts[1:]))

    @property
    def key(self) -> int:
        """128-битный ключ Philox: BLAKE2b от полного пути."""
        digest = hashlib.blake2b(str(self).encode("utf-8"), digest_size=16).digest()
        return int.from_bytes(digest, "little")

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.key))


def as_seed(seed) -> SeedPath:
    if isinstance(seed, SeedPath):
        return seed
    return SeedPath.parse(str(seed))


def derive_seed(parent, label) -> SeedPath:
    """Дочерний seed: детерминирован и не зависит от порядка вызовов."""
    parent = as_seed(parent)
    return SeedPath(parent.root, parent.labels + (str(label),))


# ======================== Области ========================

@dataclass(frozen=True)
class ClipSide:
    """Грань области, по которой обрезаются ячейки: x[axis]*sign <= bound*sign."""

    label: str
    axis: int
    sign: int
    bound: float


@dataclass(frozen=True)
class CubeDomain:
    d: int
    kind: str = field(default="cube", init=False)

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ConfigError(f"Unsupported dimension d={self.d} (expected 2 or 3)")

    @property
    def lower(self) -> np.ndarray:
        return np.full(self.d, -0.5)

    @property
    def upper(self) -> np.ndarray:
        return np.full(self.d, 0.5)

    @property
    def volume(self) -> float:
        return 1.0

    @property
    def periodic_axes(self) -> tuple[int, ...]:
        return ()

    @property
    def period(self) -> float:
        return 0.0

    @property
    def diameter(self) -> float:
        return math.sqrt(self.d)

    def sides(self) -> list[ClipSide]:
        out = []
        for axis in range(self.d):
            out.append(ClipSide(f"{AXIS_NAMES[axis]}-", axis, -1, -0.5))
            out.append(ClipSide(f"{AXIS_NAMES[axis]}+", axis, 1, 0.5))
        return out

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.all((pts >= -0.5) & (pts <= 0.5), axis=1)

    def describe(self) -> dict:
        return {"kind": "cube", "d": self.d}


@dataclass(frozen=True)
class SlabDomain:
    """Слой [0,L]^{d-1} x [-h,h]; боковые координаты периодичны (тор)."""

    d: int
    L: float
    h: float
    kind: str = field(default="slab", init=False)

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ConfigError(f"Unsupported dimension d={self.d} (expected 2 or 3)")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ConfigError(f"Slab lateral extent must be positive, got L={self.L}")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ConfigError(f"Slab half-height must be positive, got h={self.h}")

    @property
    def lower(self) -> np.ndarray:
        return np.array([0.0] * (self.d - 1) + [-self.h])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.L] * (self.d - 1) + [self.h])

    @property
    def volume(self) -> float:
        return self.L ** (self.d - 1) * 2.0 * self.h

    @property
    def lateral_area(self) -> float:
        return self.L ** (self.d - 1)

    @property
    def periodic_axes(self) -> tuple[int, ...]:
        return tuple(range(self.d - 1))

    @property
    def period(self) -> float:
        return self.L

    @property
    def diameter(self) -> float:
        return math.sqrt((self.d - 1) * self.L ** 2 + (2 * self.h) ** 2)

    def sides(self) -> list[ClipSide]:
        axis = self.d - 1
        name = AXIS_NAMES[axis]
        return [ClipSide(f"{name}-", axis, -1, -self.h), ClipSide(f"{name}+", axis, 1, self.h)]

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        lateral = np.all((pts[:, :-1] >= 0.0) & (pts[:, :-1] < self.L), axis=1)
        vertical = (pts[:, -1] >= -self.h) & (pts[:, -1] <= self.h)
        return lateral & vertical

    def describe(self) -> dict:
        return {"kind": "slab", "d": self.d, "L": self.L, "h": self.h, "periodic": True}


# ======================== Интенсивность ========================

class _ConstantDensity:
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.full(len(points), self.value)


class _LinearDensity:
    """κ(x) = base + <gradient, x>."""

    def __init__(self, base: float, gradient):
        self.base = float(base)
        self.gradient = np.asarray(gradient, dtype=float)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.base + np.asarray(points) @ self.gradient


class _IndicatorDensity:
    """κ = value на множестве shape и 0 вне его."""

    def __init__(self, shape, value: float):
        self.shape = shape
        self.value = float(value)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.where(self.shape.contains(points), self.value, 0.0)


@dataclass(frozen=True)
class IntensityField:
    """Плотность κ с верхней (и, в режиме теорем, нижней) границей."""

    kind: str
    sup_bound: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    inf_bound: float = 0.0
    theorem_mode: bool = False
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("constant", "callable-density"):
            raise ConfigError(f"Unknown intensity kind: {self.kind}")
        if not math.isfinite(self.sup_bound):
            raise ConfigError(f"Intensity sup_bound must be finite, got {self.sup_bound}")
        if self.sup_bound <= 0:
            raise ConfigError(f"Intensity sup_bound must be positive, got {self.sup_bound}")
        if self.inf_bound > self.sup_bound:
            raise ConfigError(f"inf_bound {self.inf_bound} exceeds sup_bound {self.sup_bound}")
        if self.theorem_mode and self.inf_bound <= 0:
            raise ConfigError("Theorem mode requires an intensity bounded away from zero (inf_bound > 0)")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.asarray(self.evaluator(pts), dtype=float).reshape(len(pts))

    def spot_check(self, d: int, rng: np.random.Generator, n: int = 4096) -> bool:
        """Выборочная проверка κ <= sup_bound на случайных точках Q."""
        pts = rng.uniform(-0.5, 0.5, size=(n, d))
        return bool(np.all(self.evaluate(pts) <= self.sup_bound * (1 + 1e-12)))

    @property
    def is_unit(self) -> bool:
        return self.kind == "constant" and self.sup_bound == 1.0 and self.inf_bound == 1.0


def constant_intensity(value: float = 1.0, theorem_mode: bool = True) -> IntensityField:
    if value < 0:
        raise ConfigError(f"Constant intensity must be non-negative, got {value}")
    if value == 0:
        # κ ≡ 0: границу задаём 1, иначе прореживание не определено
        return IntensityField("callable-density", 1.0, _ConstantDensity(0.0), 0.0, False, "zero")
    return IntensityField("constant", float(value), _ConstantDensity(value), float(value), theorem_mode,
                          f"constant:{value:g}")


def linear_intensity(base: float, gradient, theorem_mode: bool = True) -> IntensityField:
    """κ(x) = base + <g, x> на Q; границы — экстремумы на вершинах куба."""
    g = np.asarray(gradient, dtype=float)
    spread = 0.5 * float(np.abs(g).sum())
    sup_bound = base + spread
    inf_bound = base - spread
    if inf_bound < 0:
        raise ConfigError(f"Linear intensity {base} + <{g.tolist()}, x> is negative on Q")
    label = f"linear:{base:g}:" + ",".join(f"{v:g}" for v in g)
    return IntensityField("callable-density", sup_bound, _LinearDensity(base, g), inf_bound,
                          theorem_mode, label)


def indicator_intensity(shape, value: float = 1.0) -> IntensityField:
    """Плотность, сосредоточенная на множестве (максимальные точки)."""
    return IntensityField("callable-density", float(value), _IndicatorDensity(shape, value), 0.0, False,
                          f"indicator:{shape.kind}:{value:g}")


def intensity_from_spec(spec: dict, shape=None) -> IntensityField:
    """Построить κ по описанию из файла конфигурации."""
    kind = spec.get("kind", "constant")
    if kind == "constant":
        return constant_intensity(float(spec.get("value", 1.0)))
    if kind == "linear":
        return linear_intensity(float(spec.get("base", 1.0)), spec["gradient"])
    if kind == "indicator":
        if shape is None:
            raise ConfigError("Indicator intensity needs a shape")
        return indicator_intensity(shape, float(spec.get("value", 1.0)))
    raise ConfigError(f"Unknown kappa kind: {kind}", key="kappa.kind")


# ======================== Выборки ========================

@dataclass(frozen=True)
class PointSample:
    points: np.ndarray
    domain: CubeDomain | SlabDomain
    lam: float
    seed_path: SeedPath | None = None
    kappa_label: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.domain.d)
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if len(pts) and not np.all(self.domain.contains(pts)):
            bad = pts[~self.domain.contains(pts)][0]
            raise DataError(f"Point {bad.tolist()} lies outside the {self.domain.kind} domain")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def d(self) -> int:
        return self.domain.d

    @classmethod
    def from_points(cls, points, domain=None, lam: float = 1.0) -> "PointSample":
        pts = np.asarray(points, dtype=float)
        if domain is None:
            domain = CubeDomain(pts.shape[1])
        return cls(pts, domain, lam)


def _check_lambda(lam: float):
    if not (lam > 0 and math.isfinite(lam)):
        raise ConfigError(f"Intensity multiplier must be positive and finite, got {lam}")


def sample_poisson_cube(lam: float, kappa: IntensityField, d: int, seed_path) -> PointSample:
    """Пуассоновский процесс интенсивности λκ на Q: N ~ Poisson(λ·sup κ), затем прореживание."""
    _check_lambda(lam)
    domain = CubeDomain(d)
    seed_path = as_seed(seed_path)
    rng = seed_path.rng()

    n_candidates = rng.poisson(lam * kappa.sup_bound * domain.volume)
    candidates = rng.uniform(-0.5, 0.5, size=(n_candidates, d))
    accept_u = rng.uniform(0.0, 1.0, size=n_candidates)

    if n_candidates == 0:
        return PointSample(np.empty((0, d)), domain, lam, seed_path, kappa.label)

    values = kappa.evaluate(candidates)
    if np.any(values < 0):
        bad = candidates[np.argmax(values < 0)]
        raise DataError(f"Intensity is negative at point {bad.tolist()}")
    keep = accept_u * kappa.sup_bound < values
    points = candidates[keep]
    logger.debug(f"Cube sample {seed_path}: {n_candidates} candidates, {len(points)} kept")
    return PointSample(points, domain, lam, seed_path, kappa.label)


def sample_poisson_slab(tau: float, L: float, h: float, d: int, seed_path) -> PointSample:
    """Однородный процесс интенсивности τ на [0,L]^{d-1} x [-h,h] (боковая периодичность)."""
    _check_lambda(tau)
    domain = SlabDomain(d, float(L), float(h))
    seed_path = as_seed(seed_path)
    rng = seed_path.rng()

    n = rng.poisson(tau * domain.volume)
    lateral = rng.uniform(0.0, L, size=(n, d - 1))
    vertical = rng.uniform(-h, h, size=(n, 1))
    points = np.hstack([lateral, vertical])
    logger.debug(f"Slab sample {seed_path}: {n} points (tau={tau}, L={L}, h={h})")
    return PointSample(points, domain, tau, seed_path, f"constant:{tau:g}")
