"""
Эталонные (медленные, прямолинейные) вычисления для проверки геометрии и статистик.
Используются тестами и подкомандой selftest.
"""

import itertools

import numpy as np

CHUNK = 1 << 16


def _pixel_centers(resolution: int, d: int = 2) -> np.ndarray:
    axis = (np.arange(resolution) + 0.5) / resolution - 0.5
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def linear_scan_nearest(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Ближайшая точка перебором; при равенстве — меньший индекс (argmin берёт первый)."""
    pts = np.asarray(points, dtype=float)
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    out = np.empty(len(q), dtype=np.int64)
    for start in range(0, len(q), CHUNK):
        block = q[start:start + CHUNK]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        out[start:start + CHUNK] = np.argmin(d2, axis=1)
    return out


def rasterized_cell_volumes(points: np.ndarray, resolution: int = 2048) -> np.ndarray:
    """Площади ячеек в Q = [-1/2,1/2]^2 подсчётом пикселей ближайшей точки."""
    owner = linear_scan_nearest(points, _pixel_centers(resolution, points.shape[1]))
    return np.bincount(owner, minlength=len(points)) / float(resolution) ** points.shape[1]


def rasterized_symdiff(points: np.ndarray, inside: np.ndarray, shape, resolution: int = 4096) -> float:
    """Vol(A Δ PV) по пикселям: пиксель в A, но его ячейка снаружи (или наоборот)."""
    total = 0
    pixel = 1.0 / float(resolution) ** points.shape[1]
    centers = _pixel_centers(resolution, points.shape[1])
    for start in range(0, len(centers), CHUNK * 4):
        block = centers[start:start + CHUNK * 4]
        owner = linear_scan_nearest(points, block)
        total += int(np.count_nonzero(shape.contains(block) != inside[owner]))
    return total * pixel


def _clip_polygon(poly: list[np.ndarray], normal: np.ndarray, offset: float) -> list[np.ndarray]:
    out = []
    n = len(poly)
    for j in range(n):
        cur, nxt = poly[j - 1], poly[j]
        fc, fn = float(cur @ normal - offset), float(nxt @ normal - offset)
        if fn <= 0:
            if fc > 0:
                out.append(cur + fc / (fc - fn) * (nxt - cur))
            out.append(nxt)
        elif fc <= 0:
            out.append(cur + fc / (fc - fn) * (nxt - cur))
    return out


def bisector_clipped_cells(points: np.ndarray) -> list[np.ndarray]:
    """Ячейки (d=2) как пересечение Q со всеми полуплоскостями биссектрис, O(n^2) на ячейку."""
    square = [np.array(v, dtype=float) for v in ((-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5))]
    cells = []
    for i, p in enumerate(points):
        poly = list(square)
        for j, q in enumerate(points):
            if i == j:
                continue
            normal = q - p
            poly = _clip_polygon(poly, normal, float(normal @ (0.5 * (p + q))))
            if not poly:
                break
        cells.append(np.array(poly).reshape(-1, 2))
    return cells


def polygon_area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def interior_edge_length(cells: list[np.ndarray], tol: float = 1e-12) -> float:
    """Суммарная длина рёбер, не лежащих на границе Q (каждое ребро видят две ячейки)."""
    total = 0.0
    for poly in cells:
        for j in range(len(poly)):
            a, b = poly[j - 1], poly[j]
            on_boundary = any(
                abs(a[k] - s) <= tol and abs(b[k] - s) <= tol for k in range(2) for s in (-0.5, 0.5)
            )
            if not on_boundary:
                total += float(np.linalg.norm(b - a))
    return 0.5 * total


def empty_circle_vertices(points: np.ndarray, inside_only: bool = True) -> int:
    """Число центров описанных окружностей троек без точек строго внутри, O(n^4)."""
    pts = np.asarray(points, dtype=float)
    count = 0
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        a, b, c = pts[i], pts[j], pts[k]
        m = np.array([b - a, c - a])
        if abs(np.linalg.det(m)) < 1e-14:
            continue
        center = a + np.linalg.solve(m, 0.5 * np.sum(m * m, axis=1))
        r2 = float(np.sum((center - a) ** 2))
        d2 = np.sum((pts - center) ** 2, axis=1)
        d2[[i, j, k]] = np.inf
        if np.all(d2 > r2 * (1 + 1e-12)):
            if not inside_only or np.all(np.abs(center) <= 0.5):
                count += 1
    return count


def brute_force_maxima(points: np.ndarray) -> int:
    """Число точек, не доминируемых никакой другой (y >= x покоординатно, y != x), O(n^2)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return 0
    count = 0
    for i, x in enumerate(pts):
        dominated = np.all(pts >= x, axis=1) & np.any(pts != x, axis=1)
        if not np.any(dominated):
            count += 1
    return count


def boundary_facets_by_scan(points: np.ndarray, inside: np.ndarray) -> set[tuple[int, int]]:
    """Пары соседних ячеек с разной классификацией: соседство — общее ребро положительной длины."""
    cells = bisector_clipped_cells(points)
    pairs = set()
    for i, j in itertools.combinations(range(len(points)), 2):
        if inside[i] == inside[j]:
            continue
        p, q = points[i], points[j]
        normal = q - p
        offset = float(normal @ (0.5 * (p + q)))
        on_bisector = [v for v in cells[i] if abs(float(v @ normal) - offset) <= 1e-9 * (1 + abs(offset))]
        if len(on_bisector) >= 2:
            span = max(float(np.linalg.norm(a - b)) for a in on_bisector for b in on_bisector)
            if span > 1e-12:
                pairs.add((i, j))
    return pairs
