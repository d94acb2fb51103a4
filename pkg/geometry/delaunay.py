"""
Триангуляция Делоне с точной комбинаторикой.

Начальная триангуляция строится Qhull (scipy.spatial.Delaunay) по точкам
и 2^d сторожевым вершинам далеко за пределами области, поэтому у каждой
реальной точки ограниченная ячейка Вороного. В d=2 результат легализуется
флипами Лоусона по incircle_sos — получается единственная триангуляция
Делоне возмущённого множества. В d=3 тетраэдры каждой ячейки Делоне с
точками на общей сфере перестраиваются перебором по insphere_sos, после
чего условие пустой сферы проверяется для всех соседних пар.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Delaunay, QhullError

import config
from errors import DataError, GeometryError
from .polytope import simplex_volumes
from .predicates import (incircle_float, incircle_sos, insphere, insphere_float_batch, insphere_sos,
                         orient_batch)

logger = logging.getLogger(__name__)


@dataclass
class Triangulation:
    points: np.ndarray        # реальные точки, затем сторожевые
    simplices: np.ndarray     # (m, d+1), ориентированы положительно
    n_real: int
    circumcenters: np.ndarray
    flips: int = 0
    clusters: int = 0

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def is_sentinel(self, index: int) -> bool:
        return index >= self.n_real


def sentinel_corners(lower: np.ndarray, upper: np.ndarray, factor: float) -> np.ndarray:
    """Вершины куба с центром в центре области и полустороной factor·(полудиаметр)."""
    center = 0.5 * (lower + upper)
    half = factor * 0.5 * float(np.linalg.norm(upper - lower))
    return np.array([center + half * np.array(signs)
                     for signs in itertools.product((-1.0, 1.0), repeat=len(lower))])


def circumcenters(points: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    """Центры описанных сфер: 2(x_i - x_0)·c = |x_i - x_0|^2, пакетно."""
    base = points[simplices[:, 0]]
    a = points[simplices[:, 1:]] - base[:, None, :]
    b = 0.5 * np.sum(a * a, axis=2)
    try:
        return base + np.linalg.solve(a, b[..., None])[..., 0]
    except np.linalg.LinAlgError as e:
        raise GeometryError(f"Degenerate simplex in triangulation: {e}") from e


def triangulate(points: np.ndarray, sentinels: np.ndarray) -> Triangulation:
    n_real, d = points.shape
    all_points = np.vstack([points, sentinels])

    try:
        tri = Delaunay(all_points, qhull_options="Qbb Qc Qz Q12")
    except QhullError as e:
        raise GeometryError(f"Qhull failed on {n_real} points: {e}") from e

    if len(tri.coplanar):
        bad = [int(i) for i in tri.coplanar[:, 0]]
        raise DataError(f"Points {bad[:5]} are numerically indistinguishable from their neighbours")

    simplices = _orient_positively(all_points, tri.simplices.astype(np.int64))
    result = Triangulation(all_points, simplices, n_real, np.empty((0, d)))

    if d == 2:
        result.simplices, result.flips = _lawson_legalize(all_points, simplices)
    else:
        result.simplices, result.clusters = _retriangulate_clusters(all_points, simplices)
        violations = _empty_sphere_violations(all_points, result.simplices)
        if violations:
            raise GeometryError(f"3-D triangulation keeps {violations} empty-sphere violations")

    result.circumcenters = circumcenters(all_points, result.simplices)
    logger.debug(f"Triangulated {n_real} points: {len(result.simplices)} simplices, "
                 f"{result.flips} flips, {result.clusters} cospherical clusters")
    return result


def _orient_positively(points: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    signs = orient_batch(points[simplices])
    if np.any(signs == 0):
        bad = simplices[np.argmax(signs == 0)]
        raise GeometryError(f"Zero-volume simplex {bad.tolist()} in the initial triangulation")
    oriented = simplices.copy()
    flip = signs < 0
    oriented[flip, 0], oriented[flip, 1] = simplices[flip, 1], simplices[flip, 0]
    return oriented


# ======================== Легализация (d=2) ========================

def _lawson_legalize(points: np.ndarray, simplices: np.ndarray) -> tuple[np.ndarray, int]:
    """
    Флипы Лоусона до выполнения условия пустой окружности (с SoS).
    Треугольник (a,b,c) против часовой; ребро ab нелегально, если
    противолежащая вершина d соседнего треугольника (b,a,d) внутри окружности abc.
    """
    tris = [list(map(int, t)) for t in simplices]
    edge_map: dict[tuple[int, int], list[int]] = {}
    for t_id, t in enumerate(tris):
        for k in range(3):
            edge_map.setdefault(_edge(t[k], t[(k + 1) % 3]), []).append(t_id)

    # фильтр: проверяем точно только рёбра, где double не гарантирует легальность
    suspects = []
    pairs = [(e, ts) for e, ts in edge_map.items() if len(ts) == 2]
    if pairs:
        quads = np.array([_quad(tris, e, ts) for e, ts in pairs])
        det, err = incircle_float(points[quads[:, 0]], points[quads[:, 1]],
                                  points[quads[:, 2]], points[quads[:, 3]])
        suspects = [pairs[k][0] for k in np.flatnonzero(det >= -err)]

    stack = list(suspects)
    flips = 0
    while stack:
        e = stack.pop()
        ts = edge_map.get(e)
        if not ts or len(ts) != 2:
            continue
        a, b, c, d = _quad(tris, e, ts)
        if incircle_sos(points[a], points[b], points[c], points[d], (a, b, c, d)) <= 0:
            continue
        t1, t2 = ts
        tris[t1] = [a, d, c]
        tris[t2] = [d, b, c]
        del edge_map[e]
        edge_map[_edge(c, d)] = [t1, t2]
        _replace(edge_map, _edge(b, d), t2, t2)
        _replace(edge_map, _edge(a, d), t2, t1)
        _replace(edge_map, _edge(b, c), t1, t2)
        flips += 1
        stack.extend([_edge(a, d), _edge(d, b), _edge(b, c), _edge(c, a)])
        if flips > 50 * len(tris):
            raise GeometryError("Lawson flipping did not terminate")

    if flips:
        logger.debug(f"Lawson legalization applied {flips} flips")
    return np.array(tris, dtype=np.int64), flips


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _replace(edge_map, edge, old, new):
    ts = edge_map[edge]
    ts[ts.index(old)] = new


def _quad(tris, e, ts) -> tuple[int, int, int, int]:
    """(a, b, c, d): t1 = (a,b,c) против часовой с ребром ab = e, d — вершина t2 напротив e."""
    t1, t2 = tris[ts[0]], tris[ts[1]]
    for k in range(3):
        a, b = t1[k], t1[(k + 1) % 3]
        if _edge(a, b) == e:
            c = t1[(k + 2) % 3]
            break
    d = next(v for v in t2 if v not in e)
    return a, b, c, d


# ======================== Косферические кластеры (d=3) ========================

def _facet_pairs(simplices: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Пары соседних тетраэдров: (первый, второй, вершина второго напротив общей грани)."""
    m = len(simplices)
    tri = np.concatenate([np.delete(simplices, k, axis=1) for k in range(4)])
    tri.sort(axis=1)
    owner = np.tile(np.arange(m), 4)
    apex = np.concatenate([simplices[:, k] for k in range(4)])
    order = np.lexsort(tri.T[::-1])
    tri, owner, apex = tri[order], owner[order], apex[order]
    shared = np.flatnonzero(np.all(tri[1:] == tri[:-1], axis=1))
    return owner[shared], owner[shared + 1], apex[shared + 1]


def _insphere_signs(points: np.ndarray, simplices: np.ndarray, first: np.ndarray, apex: np.ndarray,
                    perturbed: bool) -> np.ndarray:
    """+1, если apex внутри сферы тетраэдра first; неясные фильтру случаи считаются точно."""
    if len(first) == 0:
        return np.empty(0, dtype=int)
    s = simplices[first]
    det, err = insphere_float_batch(points[s[:, 0]], points[s[:, 1]], points[s[:, 2]],
                                    points[s[:, 3]], points[apex])
    signs = np.sign(det).astype(int)
    for k in np.flatnonzero(np.abs(det) <= err):
        a, b, c, d = (int(v) for v in s[k])
        e = int(apex[k])
        args = (points[a], points[b], points[c], points[d], points[e])
        signs[k] = insphere_sos(*args, (a, b, c, d, e)) if perturbed else insphere(*args)
    return signs


def _empty_sphere_violations(points: np.ndarray, simplices: np.ndarray) -> int:
    """Число пар соседних тетраэдров, нарушающих условие пустой сферы (с SoS)."""
    first, _, apex = _facet_pairs(simplices)
    return int(np.sum(_insphere_signs(points, simplices, first, apex, perturbed=True) > 0))


def _cospherical_clusters(points: np.ndarray, simplices: np.ndarray) -> list[np.ndarray]:
    """
    Группы тетраэдров, связанных гранями, через которые условие пустой сферы
    не выполняется строго (вершина соседа на сфере или внутри неё).
    """
    first, second, apex = _facet_pairs(simplices)
    merge = _insphere_signs(points, simplices, first, apex, perturbed=False) >= 0
    if not merge.any():
        return []
    m = len(simplices)
    graph = coo_matrix((np.ones(int(merge.sum())), (first[merge], second[merge])), shape=(m, m))
    _, labels = connected_components(graph, directed=False)
    sizes = np.bincount(labels)
    return [np.flatnonzero(labels == c) for c in np.flatnonzero(sizes > 1)]


def _sos_tetrahedra(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Все тетраэдры на vertices, сфера которых пуста после возмущения (перебор)."""
    if len(vertices) > config.COSPHERICAL_LIMIT:
        raise GeometryError(f"{len(vertices)} points share one empty sphere, "
                            f"more than PVLAB_COSPHERICAL_LIMIT={config.COSPHERICAL_LIMIT}")
    combos = np.array(list(itertools.combinations(vertices.tolist(), 4)), dtype=np.int64)
    combos = combos[orient_batch(points[combos]) != 0]
    kept = []
    for tet in _orient_positively(points, combos):
        a, b, c, d = (int(v) for v in tet)
        others = (int(e) for e in vertices if e not in (a, b, c, d))
        if all(insphere_sos(points[a], points[b], points[c], points[d], points[e], (a, b, c, d, e)) < 0
               for e in others):
            kept.append(tet)
    return np.array(kept, dtype=np.int64).reshape(-1, 4)


def _retriangulate_clusters(points: np.ndarray, simplices: np.ndarray) -> tuple[np.ndarray, int]:
    """
    Заменяет триангуляцию каждого косферического кластера на триангуляцию
    Делоне возмущённого множества. Кластер — вся ячейка Делоне на одной
    пустой сфере, поэтому общие многоугольные грани соседних кластеров
    разбиваются одинаково.
    """
    clusters = _cospherical_clusters(points, simplices)
    if not clusters:
        return simplices, 0
    drop = np.zeros(len(simplices), dtype=bool)
    fresh = []
    for tets in clusters:
        vertices = np.unique(simplices[tets])
        replaced = _sos_tetrahedra(points, vertices)
        before = float(simplex_volumes(points[simplices[tets]]).sum())
        after = float(simplex_volumes(points[replaced]).sum()) if len(replaced) else 0.0
        if not np.isclose(before, after, rtol=1e-9, atol=0.0):
            raise GeometryError(f"Retriangulation of a {len(vertices)}-point cluster does not tile it "
                                f"(volume {before:.6g} vs {after:.6g})")
        drop[tets] = True
        fresh.append(replaced)
    logger.debug(f"Retriangulated {len(clusters)} cospherical clusters")
    return np.vstack([simplices[~drop], *fresh]), len(clusters)
