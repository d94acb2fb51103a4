"""
Меры выпуклых многогранников: площадь многоугольника, объём по вееру
от центроида, отсечение полупространством.
"""

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist


def polygon_area(vertices: np.ndarray) -> float:
    """Площадь плоского многоугольника: формула шнурования в d=2, векторная площадь в d=3."""
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    if v.shape[1] == 2:
        x, y = v[:, 0], v[:, 1]
        return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
    return 0.5 * float(np.linalg.norm(newell_normal(v)))


def newell_normal(v: np.ndarray) -> np.ndarray:
    """Удвоенная векторная площадь замкнутого полигона в R^3."""
    nxt = np.roll(v, -1, axis=0)
    return np.array([
        np.sum((v[:, 1] - nxt[:, 1]) * (v[:, 2] + nxt[:, 2])),
        np.sum((v[:, 2] - nxt[:, 2]) * (v[:, 0] + nxt[:, 0])),
        np.sum((v[:, 0] - nxt[:, 0]) * (v[:, 1] + nxt[:, 1])),
    ])


def fan_simplices(vertices: np.ndarray, facets: list[list[int]]) -> np.ndarray:
    """
    Разбиение выпуклого многогранника на симплексы веером от центроида вершин.
    d=2: facets — рёбра (пары индексов); d=3: циклы индексов граней.
    """
    v = np.asarray(vertices, dtype=float)
    center = v.mean(axis=0)
    out = []
    for poly in facets:
        if v.shape[1] == 2:
            out.append([center, v[poly[0]], v[poly[1]]])
        else:
            for j in range(1, len(poly) - 1):
                out.append([center, v[poly[0]], v[poly[j]], v[poly[j + 1]]])
    return np.array(out, dtype=float).reshape(-1, v.shape[1] + 1, v.shape[1])


def simplex_volumes(simplices: np.ndarray) -> np.ndarray:
    d = simplices.shape[2]
    edges = simplices[:, 1:] - simplices[:, :1]
    return np.abs(np.linalg.det(edges)) / (2.0 if d == 2 else 6.0)


def convex_volume(points: np.ndarray) -> float:
    """Объём выпуклой оболочки; вырожденный набор даёт 0."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < pts.shape[1] + 1:
        return 0.0
    try:
        return float(ConvexHull(pts).volume)
    except QhullError:
        return 0.0


def clipped_volume(vertices: np.ndarray, edges: np.ndarray, normal, offset: float) -> float:
    """
    Объём пересечения выпуклого многогранника с {x : <normal, x> <= offset}.
    edges — массив пар индексов вершин (рёбра многогранника).
    """
    v = np.asarray(vertices, dtype=float)
    f = v @ np.asarray(normal, dtype=float) - offset
    inside = f <= 0
    if not np.any(inside):
        return 0.0
    if np.all(inside):
        return convex_volume(v)
    pts = [v[inside]]
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    crossing = e[inside[e[:, 0]] != inside[e[:, 1]]]
    if len(crossing):
        fa, fb = f[crossing[:, 0]], f[crossing[:, 1]]
        t = (fa / (fa - fb))[:, None]
        pts.append(v[crossing[:, 0]] + t * (v[crossing[:, 1]] - v[crossing[:, 0]]))
    return convex_volume(np.vstack(pts))


def point_set_diameter(points: np.ndarray) -> float:
    """Диаметр конечного множества: максимум попарных расстояний по вершинам оболочки."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    if len(pts) > pts.shape[1] + 1:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            pass
    return float(pdist(pts).max())


def _hull_edges(points: np.ndarray) -> np.ndarray:
    hull = ConvexHull(points)
    k = hull.simplices.shape[1]
    pairs = np.vstack([hull.simplices[:, [a, b]] for a in range(k) for b in range(a + 1, k)])
    return np.unique(np.sort(pairs, axis=1), axis=0)


def intersection_volume(vertices: np.ndarray, normals: np.ndarray, offsets: np.ndarray) -> float:
    """Объём пересечения выпуклой оболочки вершин с набором полупространств <n, x> <= b."""
    pts = np.asarray(vertices, dtype=float)
    for normal, offset in zip(np.atleast_2d(normals), np.atleast_1d(offsets)):
        f = pts @ normal - offset
        if np.all(f <= 0):
            continue
        if not np.any(f <= 0) or len(pts) < pts.shape[1] + 1:
            return 0.0
        try:
            edges = _hull_edges(pts)
        except QhullError:
            return 0.0
        inside = f <= 0
        crossing = edges[inside[edges[:, 0]] != inside[edges[:, 1]]]
        fa, fb = f[crossing[:, 0]], f[crossing[:, 1]]
        cut = pts[crossing[:, 0]] + (fa / (fa - fb))[:, None] * (pts[crossing[:, 1]] - pts[crossing[:, 0]])
        pts = np.vstack([pts[inside], cut])
    return convex_volume(pts)
