"""
Статистики пуассон-вороной аппроксимации PV_λ(A):
  - классификация ячеек и граница ∂PV_λ(A)
  - объём, знаковая ошибка, объём симметрической разности (локальный Монте-Карло)
  - площадь границы, меры и числа граней скелета, сложность зоны
  - итерированная аппроксимация и число максимальных точек
"""

import bisect
import logging
import math
from dataclasses import dataclass, field, fields

import numpy as np

import config
from errors import ConfigError, UsageError
from geometry import VoronoiDiagram, build_voronoi
from geometry.polytope import simplex_volumes
from pointprocess import PointSample, as_seed, derive_seed, sample_poisson_cube
from shapes import BoundaryPatch, Shape, polytopal_union_from_cells

logger = logging.getLogger(__name__)


# ======================== Классификация ========================

@dataclass
class CellClassification:
    diagram: VoronoiDiagram
    shape: Shape
    inside: np.ndarray                          # bool по индексу порождающей точки
    boundary_facets: list = field(default_factory=list)
    boundary_faces_by_dim: dict = field(default_factory=dict)   # ℓ -> {key: Face}
    boundary_touch_flag: bool = False

    @property
    def inside_indices(self) -> np.ndarray:
        return np.flatnonzero(self.inside)

    @property
    def d(self) -> int:
        return self.diagram.d


def classify(diagram: VoronoiDiagram, shape: Shape) -> CellClassification:
    """
    Грань ячейки входит в ∂PV, если её две ячейки классифицированы по-разному.
    Грани на ∂Q исключаются; флаг касания поднимается, если граничная грань
    касается ∂Q или внутренняя ячейка выходит на ∂Q.
    """
    d = diagram.d
    inside = np.asarray(shape.contains(diagram.generators), dtype=bool) if diagram.n else np.zeros(0, bool)
    cls = CellClassification(diagram, shape, inside, [], {dim: {} for dim in range(d)})

    touch = False
    for face in diagram.faces_of_dim(d - 1):
        gens = face.generator_key
        if face.on_clip_boundary:
            if any(inside[g] for g in gens if g >= 0):
                touch = True
            continue
        if len(gens) != 2 or min(gens) < 0 or inside[gens[0]] == inside[gens[1]]:
            continue
        cls.boundary_facets.append(face)
        cls.boundary_faces_by_dim[d - 1][face.key] = face
        for vkey in face.vertex_keys:
            vertex = diagram.faces[0][vkey]
            cls.boundary_faces_by_dim[0][vkey] = vertex
            touch = touch or vertex.on_clip_boundary
        if d == 3:
            for ekey in face.edge_keys:
                cls.boundary_faces_by_dim[1][ekey] = diagram.faces[1][ekey]

    cls.boundary_touch_flag = touch
    logger.debug(f"Classified {int(inside.sum())}/{diagram.n} cells inside, "
                 f"{len(cls.boundary_facets)} boundary facets, touch={touch}")
    return cls


# ======================== Объём ========================

@dataclass
class VolumeStatistics:
    volume: float
    signed_volume_error: float
    symdiff_volume: float
    symdiff_se: float
    score_sum: float            # Σ_x ξ⁽¹⁾(x): Vol(v∩A^c) по внутренним минус Vol(v∩A) по внешним
    precision_warning: bool
    boundary_cells: int


def _sample_simplices(simplices: np.ndarray, counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Равномерные точки в симплексах: барицентрические координаты ~ Dirichlet(1,…,1)."""
    owner = np.repeat(np.arange(len(simplices)), counts)
    bary = rng.exponential(size=(len(owner), simplices.shape[1]))
    bary /= bary.sum(axis=1, keepdims=True)
    return np.einsum("nk,nkd->nd", bary, simplices[owner])


def _cell_in_shape(cell, shape: Shape, budget: int, rng: np.random.Generator) -> tuple[float, float]:
    """Vol(cell ∩ A) стратифицированным Монте-Карло по вееру симплексов; (оценка, SE)."""
    simplices = cell.simplices()
    vols = simplex_volumes(simplices)
    keep = vols > 0
    simplices, vols = simplices[keep], vols[keep]
    if len(vols) == 0:
        return 0.0, 0.0
    counts = np.maximum(np.floor(budget * vols / vols.sum()).astype(np.int64), 2)
    pts = _sample_simplices(simplices, counts, rng)
    hits = np.asarray(shape.contains(pts), dtype=float)
    owner = np.repeat(np.arange(len(vols)), counts)
    frac = np.bincount(owner, weights=hits, minlength=len(vols)) / counts
    estimate = float(np.dot(vols, frac))
    var = float(np.sum(vols ** 2 * frac * (1.0 - frac) / (counts - 1)))
    return estimate, math.sqrt(var)


def _candidate_cells(cls: CellClassification, shape: Shape) -> np.ndarray:
    """Ячейки, которые может пересекать ∂A: |sd(p)| <= max |v - p| по вершинам."""
    diagram = cls.diagram
    radius = np.array([np.max(np.linalg.norm(c.vertices - c.generator, axis=1)) for c in diagram.cells])
    sd = np.asarray(shape.signed_distance(diagram.generators))
    return np.flatnonzero(np.abs(sd) <= radius)


def cell_shape_volumes(cls: CellClassification, shape: Shape, seed_path=None,
                       budget: int | None = None) -> tuple[dict[int, float], dict[int, float]]:
    """Vol(cell ∩ A) для ячеек, пересекающих ∂A: точно для многогранных A, иначе Монте-Карло."""
    diagram = cls.diagram
    budget = budget or config.SYMDIFF_BUDGET
    candidates = _candidate_cells(cls, shape)
    values, errors = {}, {}
    for i in candidates:
        cell = diagram.cells[i]
        exact = shape.cell_intersection_volume(cell.vertices, cell.edges)
        if exact is None:
            break
        values[int(i)], errors[int(i)] = float(exact), 0.0
    else:
        return values, errors

    seed = derive_seed(seed_path if seed_path is not None else config.DEFAULT_SEED_ROOT, "symdiff")
    for doubling in range(config.SYMDIFF_MAX_DOUBLINGS + 1):
        rng = derive_seed(seed, f"pass{doubling}").rng()
        for i in candidates:
            values[int(i)], errors[int(i)] = _cell_in_shape(diagram.cells[i], shape, budget, rng)
        total_se = math.sqrt(sum(e * e for e in errors.values()))
        if total_se <= config.SYMDIFF_SE_CAP:
            break
        budget *= 2
    return values, errors


def volume_statistics(cls: CellClassification, shape: Shape | None = None, seed_path=None,
                      budget: int | None = None) -> VolumeStatistics:
    """
    shape — множество, с которым сравнивается PV (по умолчанию то, по которому
    классифицировали; в итерированной схеме это исходное A).
    """
    shape = shape or cls.shape
    diagram = cls.diagram
    volumes = np.array([c.volume for c in diagram.cells])
    volume = float(volumes[cls.inside].sum())
    target = shape.volume()

    in_shape, errors = cell_shape_volumes(cls, shape, seed_path, budget)
    # ячейки вне кандидатов целиком внутри или снаружи A, как и их порождающие точки
    whole = np.asarray(shape.contains(diagram.generators), dtype=float) * volumes
    for i, v_a in in_shape.items():
        whole[i] = v_a
    score_in = float(np.sum((volumes - whole)[cls.inside]))
    score_out = float(np.sum(whole[~cls.inside]))
    symdiff = score_in + score_out
    se = math.sqrt(sum(e * e for e in errors.values()))
    warning = se > config.SYMDIFF_SE_CAP
    if warning:
        logger.warning(f"Symmetric difference standard error {se:.3e} above cap {config.SYMDIFF_SE_CAP:.1e}")
    signed = volume - target if math.isfinite(target) else math.nan
    return VolumeStatistics(volume, signed, symdiff, se, score_in - score_out, warning, len(in_shape))


# ======================== Поверхность и скелет ========================

def surface_statistic(cls: CellClassification) -> float:
    return float(sum(f.measure for f in cls.boundary_facets))


@dataclass
class SkeletonStatistics:
    cell_weighted: float
    distinct_sum: float
    face_count: int


def skeleton_statistics(cls: CellClassification, ell: int) -> SkeletonStatistics:
    d = cls.d
    if not 0 <= ell <= d - 1:
        raise UsageError(f"Skeleton dimension {ell} out of range 0..{d - 1}")
    boundary = cls.boundary_faces_by_dim[ell]
    per_cell = 0.0
    for i in cls.inside_indices:
        for key in cls.diagram.cells[i].face_keys(ell):
            face = boundary.get(key)
            if face is not None:
                per_cell += face.measure
    return SkeletonStatistics(
        cell_weighted=per_cell / (d - ell),
        distinct_sum=float(sum(f.measure for f in boundary.values())),
        face_count=len(boundary),
    )


# ======================== Зона ========================

@dataclass
class ZoneStatistics:
    cells: list[int]
    complexity: int                 # Co: различные грани всех размерностей 0..d-1
    faces_by_dim: dict[int, int]
    score_sum: int                  # грани, посчитанные по каждой ячейке отдельно
    spacing: float
    chord_tolerance: float


def _clip_element(poly: np.ndarray, normals: np.ndarray, offsets: np.ndarray, tol: float) -> bool:
    """
    Непусто ли пересечение отрезка/треугольника с многогранником {n·x <= b}.
    Отсечение Сазерленда–Ходжмана: после каждой полуплоскости вершины идут в порядке обхода.
    """
    pts = poly
    closed = len(poly) > 2
    for normal, offset in zip(normals, offsets):
        f = pts @ normal - offset
        inside = f <= tol
        if inside.all():
            continue
        if not inside.any():
            return False
        k = len(pts)
        kept = []
        for j in range(k if closed else k - 1):
            nxt = (j + 1) % k
            if inside[j]:
                kept.append(pts[j])
            if inside[j] != inside[nxt]:
                kept.append(pts[j] + (f[j] / (f[j] - f[nxt])) * (pts[nxt] - pts[j]))
        if not closed and inside[-1]:
            kept.append(pts[-1])
        pts = np.array(kept)
    return len(pts) > 0


def _element_hits_cell(elements: np.ndarray, cell, tol: float = 1e-12) -> bool:
    lo, hi = cell.vertices.min(axis=0) - tol, cell.vertices.max(axis=0) + tol
    near = np.all(elements.max(axis=1) >= lo, axis=1) & np.all(elements.min(axis=1) <= hi, axis=1)
    normals, offsets = cell.halfspaces
    return any(_clip_element(el, normals, offsets, tol) for el in elements[near])


def zone_statistics(diagram: VoronoiDiagram, patch: BoundaryPatch, intensity: float | None = None,
                    epsilon: float | None = None) -> ZoneStatistics:
    """
    Ячейки зоны: ячейки узлов патча плюс смежные ячейки, которые элементы
    патча задевают между узлами (точная проверка отсечением).
    """
    epsilon = config.ZONE_EPSILON if epsilon is None else epsilon
    intensity = intensity or diagram.n / diagram.domain.volume
    scale = intensity ** (-1.0 / diagram.d)
    if patch.spacing > epsilon * scale:
        raise ConfigError(f"Boundary patch spacing {patch.spacing:.3e} exceeds "
                          f"{epsilon} x cell scale {scale:.3e}", key="zone.spacing")

    nodes = patch.nodes()
    nodes = nodes[diagram.domain.contains(nodes)]
    zone = set(int(i) for i in np.unique(diagram.locate_cells(nodes)))
    frontier = sorted(zone)
    tested = set(zone)
    while frontier:
        grazed = []
        for i in frontier:
            for orig, _ in diagram.cells[i].neighbors:
                if orig < 0 or orig in tested:
                    continue
                tested.add(orig)
                if _element_hits_cell(patch.elements, diagram.cells[orig]):
                    grazed.append(orig)
        zone.update(grazed)
        frontier = grazed

    cells = sorted(zone)
    faces_by_dim, score_sum = {}, 0
    for dim in range(diagram.d):
        keys = set()
        for i in cells:
            cell_keys = diagram.cells[i].face_keys(dim)
            score_sum += len(cell_keys)
            keys.update(cell_keys)
        faces_by_dim[dim] = len(keys)
    return ZoneStatistics(cells, sum(faces_by_dim.values()), faces_by_dim, score_sum,
                          patch.spacing, patch.chord_tolerance)


# ======================== Максимальные точки ========================

def maximal_points(sample: PointSample | np.ndarray) -> int:
    """Точки, не доминируемые покоординатно никакой другой точкой выборки."""
    pts = sample.points if isinstance(sample, PointSample) else np.asarray(sample, dtype=float)
    if len(pts) == 0:
        return 0
    uniq, counts = np.unique(pts, axis=0, return_counts=True)
    d = uniq.shape[1]
    if d not in (2, 3):
        raise UsageError(f"maximal_points supports d = 2, 3, got {d}")
    order = np.lexsort(tuple(-uniq[:, k] for k in range(d - 1, -1, -1)))
    total = 0
    if d == 2:
        best = -math.inf
        for j in order:
            y = uniq[j, 1]
            if y > best:
                total += int(counts[j])
                best = y
        return total

    # d=3: обход по убыванию x, лестница недоминируемых пар (y, z): y растёт, z убывает
    ys, zs = [], []
    for j in order:
        y, z = float(uniq[j, 1]), float(uniq[j, 2])
        pos = bisect.bisect_left(ys, y)
        if pos < len(ys) and zs[pos] >= z:
            continue
        total += int(counts[j])
        right = bisect.bisect_right(ys, y)
        left = right
        while left > 0 and zs[left - 1] <= z:
            left -= 1
        del ys[left:right]
        del zs[left:right]
        ys.insert(left, y)
        zs.insert(left, z)
    return total


# ======================== Вектор статистик ========================

@dataclass
class StatisticVector:
    lam: float
    replicate: int
    iteration: int = 1
    n_points: int = 0
    volume: float = 0.0
    signed_volume_error: float = 0.0
    symdiff_volume: float = 0.0
    symdiff_se: float = 0.0
    volume_score_sum: float = 0.0
    surface: float = 0.0
    skeleton_measure: list = field(default_factory=list)
    skeleton_measure_distinct: list = field(default_factory=list)
    face_count: list = field(default_factory=list)
    zone_complexity: float = math.nan
    zone_score_sum: float = math.nan
    zone_cells: float = math.nan
    maximal_points: float = math.nan
    boundary_touch_flag: bool = False
    precision_warning: bool = False

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, list):
                for ell, v in enumerate(value):
                    out[f"{f.name}_{ell}"] = v
            else:
                out[f.name] = value
        return out


def csv_columns(d: int) -> list[str]:
    """Порядок колонок CSV реплик (docs/FORMATS.md)."""
    cols = []
    for f in fields(StatisticVector):
        if f.name in ("skeleton_measure", "skeleton_measure_distinct", "face_count"):
            cols += [f"{f.name}_{ell}" for ell in range(d)]
        else:
            cols.append(f.name)
    return cols


def empty_statistics(shape: Shape, lam: float, d: int, replicate: int = 0, iteration: int = 1) -> StatisticVector:
    """Пустая выборка: PV пусто, все счётчики нулевые."""
    return StatisticVector(lam=lam, replicate=replicate, iteration=iteration,
                           signed_volume_error=-shape.volume(), symdiff_volume=shape.volume(),
                           skeleton_measure=[0.0] * d, skeleton_measure_distinct=[0.0] * d,
                           face_count=[0] * d, maximal_points=0)


ALL_STATISTICS = ("volume", "surface", "skeleton", "zone", "maximal")


def compute_statistics(diagram: VoronoiDiagram, shape: Shape, lam: float, replicate: int = 0,
                       iteration: int = 1, statistics=ALL_STATISTICS, patch: BoundaryPatch | None = None,
                       reference: Shape | None = None, seed_path=None,
                       intensity: float | None = None) -> StatisticVector:
    cls = classify(diagram, shape)
    d = diagram.d
    row = StatisticVector(lam=lam, replicate=replicate, iteration=iteration, n_points=diagram.n,
                          boundary_touch_flag=cls.boundary_touch_flag)
    if "volume" in statistics:
        vol = volume_statistics(cls, reference or shape, seed_path)
        row.volume, row.signed_volume_error, row.symdiff_volume = vol.volume, vol.signed_volume_error, vol.symdiff_volume
        row.symdiff_se, row.volume_score_sum, row.precision_warning = vol.symdiff_se, vol.score_sum, vol.precision_warning
    if "surface" in statistics or "skeleton" in statistics:
        row.surface = surface_statistic(cls)
    if "skeleton" in statistics:
        skeleton = [skeleton_statistics(cls, ell) for ell in range(d)]
        row.skeleton_measure = [s.cell_weighted for s in skeleton]
        row.skeleton_measure_distinct = [s.distinct_sum for s in skeleton]
        row.face_count = [s.face_count for s in skeleton]
        gap = skeleton[0].cell_weighted - skeleton[0].face_count
        if gap:
            logger.debug(f"f0 - H0 gap {-gap:.1f} at lambda={lam}, replicate {replicate}")
    else:
        row.skeleton_measure = [math.nan] * d
        row.skeleton_measure_distinct = [math.nan] * d
        row.face_count = [math.nan] * d
    if "zone" in statistics and patch is not None:
        zone = zone_statistics(diagram, patch, intensity)
        row.zone_complexity, row.zone_score_sum, row.zone_cells = zone.complexity, zone.score_sum, len(zone.cells)
    if "maximal" in statistics:
        row.maximal_points = maximal_points(diagram.sample)
    return row


# ======================== Итерированная аппроксимация ========================

def iterate_pv(shape: Shape, lam: float, n: int, kappa, d: int, seed_path,
               statistics=("volume", "surface"), replicate: int = 0) -> list[StatisticVector]:
    """
    Итерация k строит новый процесс интенсивности kλ и аппроксимирует
    результат итерации k-1; ошибки меряются относительно исходного A.
    Итерация 1 использует seed_path без изменений.
    """
    if n < 1:
        raise UsageError(f"Iteration depth must be >= 1, got {n}")
    seed_path = as_seed(seed_path)
    current = shape
    rows = []
    for k in range(1, n + 1):
        seed = seed_path if k == 1 else derive_seed(seed_path, f"iter{k}")
        sample = sample_poisson_cube(k * lam, kappa, d, seed)
        if sample.n == 0:
            rows.append(empty_statistics(shape, lam, d, replicate, k))
            current = _EMPTY
            continue
        diagram = build_voronoi(sample)
        shape_k = current if current is not _EMPTY else polytopal_union_from_cells(diagram, [])
        rows.append(compute_statistics(diagram, shape_k, lam, replicate, k, statistics,
                                       reference=shape, seed_path=seed))
        current = polytopal_union_from_cells(diagram, np.flatnonzero(shape_k.contains(diagram.generators)))
    return rows


_EMPTY = object()
