"""
Базовый класс множества A (ABC) и дискретизация границы.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from errors import PrecisionError, UsageError

logger = logging.getLogger(__name__)

RICHARDSON_RTOL = 1e-3


@dataclass(frozen=True)
class BoundaryPatch:
    """Квадратура на ∂A (или на подмножестве A₀ ⊂ ∂A)."""

    points: np.ndarray          # узлы квадратуры
    weights: np.ndarray         # веса ℋ^{d-1}
    chord_tolerance: float      # макс. отклонение дискретизации от поверхности
    elements: np.ndarray        # d=2: отрезки (m,2,2); d=3: треугольники (m,3,3)
    spacing: float              # макс. длина ребра элемента

    @property
    def measure(self) -> float:
        return float(self.weights.sum())

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def nodes(self) -> np.ndarray:
        """Узлы квадратуры вместе с вершинами элементов (для поиска ячеек зоны)."""
        return np.vstack([self.points, self.elements.reshape(-1, self.d)])


def patch_from_polyline(vertices: np.ndarray, closed: bool, chord_tolerance: float) -> BoundaryPatch:
    """Узлы — вершины ломаной, веса — половины длин соседних звеньев (трапеции)."""
    v = np.asarray(vertices, dtype=float)
    if closed:
        seg = np.stack([v, np.roll(v, -1, axis=0)], axis=1)
    else:
        seg = np.stack([v[:-1], v[1:]], axis=1)
    lengths = np.linalg.norm(seg[:, 1] - seg[:, 0], axis=1)
    weights = np.zeros(len(v))
    if closed:
        weights += 0.5 * lengths + 0.5 * np.roll(lengths, 1)
    else:
        weights[:-1] += 0.5 * lengths
        weights[1:] += 0.5 * lengths
    return BoundaryPatch(v, weights, chord_tolerance, seg, float(lengths.max(initial=0.0)))


def merge_patches(patches: list[BoundaryPatch]) -> BoundaryPatch:
    patches = [p for p in patches if len(p.points)]
    if not patches:
        raise UsageError("Boundary subset is empty")
    return BoundaryPatch(
        np.vstack([p.points for p in patches]),
        np.concatenate([p.weights for p in patches]),
        max(p.chord_tolerance for p in patches),
        np.vstack([p.elements for p in patches]),
        max(p.spacing for p in patches),
    )


class Shape(ABC):
    """Допустимое множество A ⊂ Q с тестом принадлежности и квадратурой границы."""

    kind: str = ""
    d: int = 2

    @abstractmethod
    def contains(self, points: np.ndarray) -> np.ndarray:
        """Замкнутое множество: граница принадлежит A."""
        ...

    @abstractmethod
    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Отрицательна внутри; по модулю не больше истинного расстояния до ∂A."""
        ...

    @abstractmethod
    def volume(self) -> float:
        ...

    @abstractmethod
    def surface_area(self) -> float:
        ...

    @abstractmethod
    def margin(self) -> float:
        """Расстояние от A до ∂Q."""
        ...

    @abstractmethod
    def boundary_patch(self, subset_spec=None, target_tolerance: float = 1e-4,
                       max_spacing: float | None = None) -> BoundaryPatch:
        """
        subset_spec: None / {"kind": "whole"}, {"kind": "angular", "start", "stop"},
        {"kind": "parameter", ...}, {"kind": "side", "side": k}.
        max_spacing ограничивает длину элемента (для поиска зоны).
        """
        ...

    @abstractmethod
    def describe(self) -> dict:
        """Параметры для файла конфигурации (kind + числа)."""
        ...

    @property
    def c2_boundary(self) -> bool:
        """Содержит ли ∂A участок класса C² положительной меры."""
        return True

    def cell_intersection_volume(self, vertices: np.ndarray, edges: np.ndarray) -> float | None:
        """Точный Vol(cell ∩ A) для многогранных A; None — точного способа нет."""
        return None

    def weighted_surface_content(self, kappa, gamma: float, power: int = 1,
                                 target_tolerance: float = 1e-5) -> float:
        """∫_{∂A} (κ^power)^{1-γ/d} dℋ^{d-1} с проверкой при удвоенном разрешении."""
        if power not in (1, 2):
            raise UsageError(f"power must be 1 or 2, got {power}")
        exponent = power * (1.0 - gamma / self.d)
        if exponent == 0.0:
            return self.surface_area()
        if kappa.kind == "constant":
            return kappa.sup_bound ** exponent * self.surface_area()

        coarse = self._weighted_sum(kappa, exponent, target_tolerance)
        fine = self._weighted_sum(kappa, exponent, target_tolerance / 4.0)
        rel = abs(fine - coarse) / max(abs(fine), 1e-300)
        if rel > RICHARDSON_RTOL:
            raise PrecisionError(
                f"Weighted surface content of {self.kind} did not converge (rel. diff {rel:.2e})",
                diagnostics={"coarse": coarse, "fine": fine, "relative_difference": rel,
                             "tolerance": target_tolerance},
            )
        return fine

    def _weighted_sum(self, kappa, exponent: float, tolerance: float) -> float:
        patch = self.boundary_patch(None, tolerance)
        values = np.clip(kappa.evaluate(patch.points), 0.0, None)
        return float(np.dot(patch.weights, values ** exponent))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


class PolylineDistance:
    """
    Нижняя оценка расстояния до кривой по плотной ломаной: любая точка кривой
    ближе half_arc к какой-либо вершине, поэтому dist >= dist_to_vertices - half_arc.
    """

    def __init__(self, vertices: np.ndarray, max_arc: float):
        self.tree = cKDTree(vertices)
        self.half_arc = 0.5 * max_arc

    def __call__(self, points: np.ndarray) -> np.ndarray:
        dist, _ = self.tree.query(np.atleast_2d(points))
        return np.maximum(dist - self.half_arc, 0.0)
