"""
Диаграмма Вороного, обрезанная областью (куб Q или периодический слой).

Ячейки строятся двойственностью из триангуляции Делоне (geometry.delaunay),
затем обрезаются гранями области алгоритмом Сазерленда–Ходжмана с
комбинаторными метками. Каждая вершина, ребро и грань получает ключ:
отсортированное множество порождающих точек плюс метки сторон области.
Глобальный реестр граней дедуплицирует их по ключу.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

import config
from errors import DataError, GeometryError, UsageError
from .delaunay import sentinel_corners, triangulate
from .polytope import fan_simplices, newell_normal, point_set_diameter, polygon_area, simplex_volumes
from pointprocess import ClipSide, PointSample, SlabDomain

logger = logging.getLogger(__name__)

# GenRef = (индекс исходной точки, сдвиг периода); метка стороны — строка "x-", "z+" и т.п.
GenRef = tuple[int, tuple[int, ...]]
FaceKey = tuple[tuple[GenRef, ...], tuple[str, ...]]


@dataclass
class Face:
    dim: int
    key: FaceKey
    vertices: np.ndarray
    measure: float
    on_clip_boundary: bool
    cells: list[int] = field(default_factory=list)
    vertex_keys: tuple[FaceKey, ...] = ()
    edge_keys: tuple[FaceKey, ...] = ()

    @property
    def generator_key(self) -> tuple[int, ...]:
        return tuple(sorted(g[0] for g in self.key[0]))

    @property
    def sides(self) -> tuple[str, ...]:
        return self.key[1]


@dataclass
class CellFacet:
    label: GenRef | str
    polygon: list[int]          # d=2: пара индексов вершин; d=3: цикл, обход против часовой снаружи
    key: FaceKey
    measure: float
    edge_labels: list = field(default_factory=list)

    @property
    def is_clip(self) -> bool:
        return isinstance(self.label, str)


@dataclass
class Cell:
    index: int
    generator: np.ndarray
    vertices: np.ndarray
    vertex_keys: list[FaceKey]
    facets: list[CellFacet]
    edge_keys: list[FaceKey]
    edges: np.ndarray            # пары индексов вершин
    halfspaces: tuple[np.ndarray, np.ndarray]
    volume: float
    clipped: bool

    @property
    def d(self) -> int:
        return len(self.generator)

    @property
    def neighbors(self) -> list[GenRef]:
        return [f.label for f in self.facets if not f.is_clip]

    def face_keys(self, dim: int) -> list[FaceKey]:
        if dim == 0:
            return list(self.vertex_keys)
        if dim == self.d - 1:
            return [f.key for f in self.facets]
        return list(self.edge_keys)

    def simplices(self) -> np.ndarray:
        return fan_simplices(self.vertices, [f.polygon for f in self.facets])

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        normals, offsets = self.halfspaces
        return np.all(np.atleast_2d(points) @ normals.T <= offsets + tol, axis=1)


# ======================== Ключи ========================

def canonical_key(atoms) -> tuple[FaceKey, tuple[int, ...]]:
    """
    Канонический ключ: порождающие точки нормализуются сдвигом якоря
    (минимальной по индексу точки), чтобы ключ не зависел от системы
    координат ячейки в периодическом слое. Возвращает также сдвиг якоря.
    """
    gens = [a for a in atoms if isinstance(a, tuple)]
    sides = tuple(sorted(a for a in atoms if isinstance(a, str)))
    min_orig = min(g[0] for g in gens)
    best = None
    for orig, s0 in gens:
        if orig != min_orig:
            continue
        norm = tuple(sorted((o, tuple(a - b for a, b in zip(s, s0))) for o, s in gens))
        if best is None or norm < best[0]:
            best = (norm, s0)
    return (best[0], sides), best[1]


def format_key(key: FaceKey) -> str:
    gens = ",".join(f"{o}" + (f"@{'.'.join(map(str, s))}" if any(s) else "") for o, s in key[0])
    return gens + ("|" + ",".join(key[1]) if key[1] else "")


# ======================== Диаграмма ========================

class VoronoiDiagram:
    """Обрезанная диаграмма Вороного с реестром граней всех размерностей."""

    def __init__(self, sample: PointSample, cells: list[Cell], faces: dict[int, dict[FaceKey, Face]],
                 ext_points: np.ndarray, ext_orig: np.ndarray, ext_shift: np.ndarray,
                 ghost_width: float = 0.0, flips: int = 0):
        self.sample = sample
        self.domain = sample.domain
        self.generators = sample.points
        self.cells = cells
        self.faces = faces
        self.ghost_width = ghost_width
        self.flips = flips
        self._ext_points = ext_points
        self._ext_orig = ext_orig
        self._ext_shift = ext_shift
        self._tree = cKDTree(ext_points)

    @property
    def d(self) -> int:
        return self.domain.d

    @property
    def n(self) -> int:
        return len(self.cells)

    def total_volume(self) -> float:
        return float(sum(c.volume for c in self.cells))

    def shift_vector(self, shift: tuple[int, ...]) -> np.ndarray:
        vec = np.zeros(self.d)
        if shift:
            vec[:-1] = np.asarray(shift, dtype=float) * self.domain.period
        return vec

    def faces_of_dim(self, dim: int) -> list[Face]:
        if not 0 <= dim <= self.d - 1:
            raise UsageError(f"Face dimension {dim} out of range 0..{self.d - 1}")
        return list(self.faces[dim].values())

    def locate_cell(self, query) -> int:
        """Индекс ближайшей порождающей точки; при равенстве расстояний — меньший индекс."""
        q = np.asarray(query, dtype=float).reshape(self.d)
        if isinstance(self.domain, SlabDomain):
            if not (-self.domain.h <= q[-1] <= self.domain.h):
                raise UsageError(f"Query {q.tolist()} lies outside the slab")
            q = q.copy()
            q[:-1] = np.mod(q[:-1], self.domain.L)
        elif not bool(self.domain.contains(q)[0]):
            raise UsageError(f"Query {q.tolist()} lies outside the domain")

        # в выборку должны попасть все точки на расстоянии ближайшей
        n_ext = len(self._ext_points)
        k = min(n_ext, 8)
        while True:
            dist, idx = self._tree.query(q, k=k)
            dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)
            tied = dist * dist <= dist[0] * dist[0] * (1 + 1e-9) + 1e-300
            if not tied[-1] or k == n_ext:
                break
            k = min(n_ext, 2 * k)
        candidates = idx[tied]
        if len(candidates) == 1:
            return int(self._ext_orig[candidates[0]])
        qf = [Fraction(float(c)) for c in q]

        def exact_key(i):
            p = self._ext_points[i]
            return (sum((Fraction(float(c)) - x) ** 2 for c, x in zip(p, qf)), int(self._ext_orig[i]))

        return min(exact_key(int(i)) for i in candidates)[1]

    def locate_cells(self, queries: np.ndarray) -> np.ndarray:
        """Пакетная версия locate_cell; неоднозначные случаи решаются точно."""
        q = np.atleast_2d(np.asarray(queries, dtype=float))
        if len(q) == 0:
            return np.empty(0, dtype=np.int64)
        qq = q.copy()
        if isinstance(self.domain, SlabDomain):
            qq[:, :-1] = np.mod(qq[:, :-1], self.domain.L)
        k = min(len(self._ext_points), 2)
        dist, idx = self._tree.query(qq, k=k)
        if k == 1:
            return self._ext_orig[idx]
        out = self._ext_orig[idx[:, 0]].copy()
        ambiguous = np.flatnonzero(dist[:, 1] ** 2 <= dist[:, 0] ** 2 * (1 + 1e-9) + 1e-300)
        for j in ambiguous:
            out[j] = self.locate_cell(q[j])
        return out

    def neighborhood_diameter(self, index: int) -> float:
        """Диаметр объединения ячейки и всех смежных с ней по грани ячеек."""
        if not 0 <= index < self.n:
            raise UsageError(f"Generator index {index} out of range 0..{self.n - 1}")
        cell = self.cells[index]
        pts = [cell.vertices]
        for orig, shift in cell.neighbors:
            if orig < 0:
                continue
            pts.append(self.cells[orig].vertices + self.shift_vector(shift))
        return point_set_diameter(np.vstack(pts))

    def neighbor_vertices(self, index: int) -> np.ndarray:
        cell = self.cells[index]
        pts = [cell.vertices]
        for orig, shift in cell.neighbors:
            if orig >= 0:
                pts.append(self.cells[orig].vertices + self.shift_vector(shift))
        return np.vstack(pts)

    def to_json(self) -> dict:
        """Отладочный дамп (структура описана в docs/FORMATS.md)."""
        return {
            "domain": self.domain.describe(),
            "generators": self.generators.tolist(),
            "faces": {
                str(dim): [
                    {
                        "key": format_key(f.key),
                        "generators": list(f.generator_key),
                        "sides": list(f.sides),
                        "vertices": np.asarray(f.vertices).tolist(),
                        "measure": f.measure,
                        "cells": sorted(f.cells),
                        "on_clip_boundary": f.on_clip_boundary,
                    }
                    for f in sorted(registry.values(), key=lambda f: f.key)
                ]
                for dim, registry in self.faces.items()
            },
            "cells": [
                {
                    "index": c.index,
                    "volume": c.volume,
                    "vertices": c.vertices.tolist(),
                    "neighbors": sorted({g[0] for g in c.neighbors}),
                    "clipped": c.clipped,
                }
                for c in self.cells
            ],
        }


def build_voronoi(sample: PointSample) -> VoronoiDiagram:
    pts = sample.points
    if sample.n == 0:
        raise DataError("Cannot build a Voronoi diagram of an empty sample")
    uniq, counts = np.unique(pts, axis=0, return_counts=True)
    if np.any(counts > 1):
        raise DataError(f"Duplicate generator at {uniq[np.argmax(counts > 1)].tolist()}")

    if isinstance(sample.domain, SlabDomain):
        return _build_periodic(sample)
    ext_orig = np.arange(sample.n)
    ext_shift = np.zeros((sample.n, 0), dtype=np.int64)
    cells, faces, flips, _ = _build(sample, pts, ext_orig, ext_shift, sample.domain.lower, sample.domain.upper)
    diagram = VoronoiDiagram(sample, cells, faces, pts, ext_orig, ext_shift, flips=flips)
    logger.debug(f"Built Voronoi diagram: {sample.n} cells, "
                 f"{len(faces[0])} vertices, total volume {diagram.total_volume():.12f}")
    return diagram


def _build_periodic(sample: PointSample) -> VoronoiDiagram:
    """Слой: призрачные копии в полосе ширины w, w удваивается до прохождения проверки радиуса безопасности."""
    dom = sample.domain
    spacing = (sample.n / dom.volume) ** (-1.0 / dom.d) if sample.n else 1.0
    width = min(config.GHOST_WIDTH_START * spacing, dom.L)
    while True:
        ext_points, ext_orig, ext_shift = _ghost_copies(sample.points, dom, width)
        lower = np.array([-width] * (dom.d - 1) + [-dom.h])
        upper = np.array([dom.L + width] * (dom.d - 1) + [dom.h])
        cells, faces, flips, certified = _build(sample, ext_points, ext_orig, ext_shift, lower, upper, width)
        if certified:
            return VoronoiDiagram(sample, cells, faces, ext_points, ext_orig, ext_shift, width, flips)
        if width >= dom.L:
            raise GeometryError(f"Ghost width reached the period L={dom.L} without certifying all cells")
        logger.debug(f"Ghost width {width:.3f} insufficient, doubling")
        width = min(2.0 * width, dom.L)


def _ghost_copies(points: np.ndarray, dom: SlabDomain, width: float):
    k = dom.d - 1
    blocks = [(points, np.arange(len(points)), np.zeros((len(points), k), dtype=np.int64))]
    for shift in itertools.product((-1, 0, 1), repeat=k):
        if not any(shift):
            continue
        moved = points.copy()
        moved[:, :k] += np.asarray(shift) * dom.L
        keep = np.all((moved[:, :k] >= -width) & (moved[:, :k] <= dom.L + width), axis=1)
        idx = np.flatnonzero(keep)
        blocks.append((moved[idx], idx, np.tile(np.asarray(shift, dtype=np.int64), (len(idx), 1))))
    return (np.vstack([b[0] for b in blocks]), np.concatenate([b[1] for b in blocks]),
            np.vstack([b[2] for b in blocks]))


# ======================== Построение ячеек ========================

class _Builder:
    """Общее состояние построения: триангуляция, ссылки на порождающие точки, реестр граней."""

    def __init__(self, sample, ext_points, ext_orig, ext_shift, tri):
        self.sample = sample
        self.domain = sample.domain
        self.d = sample.domain.d
        self.tri = tri
        self.points = tri.points
        self.n_ext = len(ext_points)
        n_sent = len(tri.points) - self.n_ext
        self.refs: list[GenRef] = [(int(o), tuple(int(v) for v in s)) for o, s in zip(ext_orig, ext_shift)]
        zero = tuple(0 for _ in range(ext_shift.shape[1]))
        self.refs += [(-1 - k, zero) for k in range(n_sent)]
        self.period = sample.domain.period
        self.sides = sample.domain.sides()
        self.faces: dict[int, dict[FaceKey, Face]] = {dim: {} for dim in range(self.d)}
        self.cross_cache: dict[frozenset, np.ndarray] = {}
        self.periodic = isinstance(sample.domain, SlabDomain)
        self.ghost_width = 0.0
        self._ref_index = {r: k for k, r in enumerate(self.refs)}

        order = np.argsort(tri.simplices, axis=None, kind="stable")
        flat = tri.simplices.reshape(-1)[order]
        self.incident_simplex = order // (self.d + 1)
        self.incident_start = np.searchsorted(flat, np.arange(len(tri.points) + 1))

    def incident(self, i: int) -> np.ndarray:
        return self.incident_simplex[self.incident_start[i]:self.incident_start[i + 1]]

    def vkey(self, simplex_id: int) -> frozenset:
        return frozenset(self.refs[int(v)] for v in self.tri.simplices[simplex_id])

    # ---------- исходные (необрезанные) многогранники ----------

    def ring_2d(self, i: int) -> list:
        p = self.points[i]
        ts = self.incident(i)
        centroids = self.points[self.tri.simplices[ts]].mean(axis=1)
        ts = ts[np.argsort(np.arctan2(centroids[:, 1] - p[1], centroids[:, 0] - p[0]))]
        ring = []
        for k in range(len(ts)):
            prev, cur = self.tri.simplices[ts[k - 1]], self.tri.simplices[ts[k]]
            shared = (set(prev.tolist()) & set(cur.tolist())) - {i}
            if len(shared) != 1:
                raise GeometryError(f"Broken triangle fan around generator {i}")
            ring.append((self.vkey(ts[k]), self.tri.circumcenters[ts[k]], self.refs[shared.pop()]))
        return ring

    def facets_3d(self, i: int) -> dict:
        p = self.points[i]
        links: dict[int, dict[int, list]] = {}
        for t in self.incident(i):
            others = [int(v) for v in self.tri.simplices[t] if v != i]
            for a in range(3):
                q = others[a]
                r, s = others[(a + 1) % 3], others[(a + 2) % 3]
                adj = links.setdefault(q, {})
                adj.setdefault(r, []).append((s, t))
                adj.setdefault(s, []).append((r, t))
        facets = {}
        for q, adj in links.items():
            start = next(iter(adj))
            ring, r, prev_t = [], start, -1
            for _ in range(len(adj)):
                s, t = next((s, t) for s, t in adj[r] if t != prev_t)
                ring.append((self.vkey(t), self.tri.circumcenters[t], self.refs[r]))
                prev_t, r = t, s
                if r == start:
                    break
            if r != start:
                raise GeometryError(f"Open tetrahedron ring around edge ({i}, {q})")
            normal = newell_normal(np.array([c for _, c, _ in ring]))
            if float(np.dot(normal, self.points[q] - p)) < 0:
                ring = _reverse_ring(ring)
            facets[self.refs[q]] = ring
        return facets

    # ---------- отсечение ----------

    def side_value(self, side: ClipSide, x: np.ndarray) -> float:
        return side.sign * (x[side.axis] - side.bound)

    def crossing(self, atoms: frozenset, a: np.ndarray, b: np.ndarray, fa: float, fb: float,
                 side: ClipSide) -> np.ndarray:
        if not self.periodic and atoms in self.cross_cache:
            return self.cross_cache[atoms]
        x = a + (fa / (fa - fb)) * (b - a)
        x[side.axis] = side.bound
        if not self.periodic:
            self.cross_cache[atoms] = x
        return x

    def clip_ring(self, ring: list, side: ClipSide, p_ref: GenRef, facet_label=None):
        values = [self.side_value(side, c) for _, c, _ in ring]
        out, entry, exit_ = [], None, None
        for j in range(len(ring)):
            cur, nxt = ring[j - 1], ring[j]
            fc, fn = values[j - 1], values[j]
            edge_label = nxt[2]
            if fc <= 0 and fn <= 0:
                out.append(nxt)
                continue
            if fc > 0 and fn > 0:
                continue
            atoms = {p_ref, edge_label, side.label}
            if facet_label is not None:
                atoms.add(facet_label)
            atoms = frozenset(atoms)
            x = self.crossing(atoms, cur[1], nxt[1], fc, fn, side)
            if fc <= 0:
                out.append((atoms, x, edge_label))
                exit_ = (atoms, x)
            else:
                out.append((atoms, x, side.label))
                out.append(nxt)
                entry = (atoms, x)
        return out, entry, exit_

    def inside_domain(self, coords: np.ndarray) -> bool:
        return all(np.all(coords[:, s.axis] * s.sign <= s.bound * s.sign) for s in self.sides)

    def clip_2d(self, ring: list, p_ref: GenRef) -> list:
        for side in self.sides:
            ring, _, _ = self.clip_ring(ring, side, p_ref)
        return ring

    def clip_3d(self, facets: dict, p_ref: GenRef) -> dict:
        for side in self.sides:
            clipped, segments = {}, {}
            for label, ring in facets.items():
                new_ring, entry, exit_ = self.clip_ring(ring, side, p_ref, label)
                if len(new_ring) >= 3:
                    clipped[label] = new_ring
                if entry is not None and exit_ is not None:
                    segments[entry[0]] = (exit_[0], exit_[1], label)
            if segments:
                clipped[side.label] = _chain_cap(segments, side)
            facets = clipped
        return facets

    # ---------- сборка ячейки ----------

    def build_cell(self, i: int) -> tuple[Cell, bool]:
        p_ref = self.refs[i]
        p = self.points[i]
        if self.d == 2:
            ring = self.ring_2d(i)
            coords = np.array([c for _, c, _ in ring])
            clipped = not self.inside_domain(coords)
            if clipped:
                ring = self.clip_2d(ring, p_ref)
            facet_rings = None
        else:
            facet_rings = self.facets_3d(i)
            coords = np.array([c for r in facet_rings.values() for _, c, _ in r])
            clipped = not self.inside_domain(coords)
            if clipped:
                facet_rings = self.clip_3d(facet_rings, p_ref)
        return self._assemble(i, p, p_ref, ring if self.d == 2 else None, facet_rings, clipped)

    def _assemble(self, i, p, p_ref, ring, facet_rings, clipped):
        index = self.refs[i][0]
        vertex_index: dict[frozenset, int] = {}
        coords: list[np.ndarray] = []

        def vid(atoms, x):
            if atoms not in vertex_index:
                vertex_index[atoms] = len(coords)
                coords.append(np.asarray(x, dtype=float))
            return vertex_index[atoms]

        facets: list[CellFacet] = []
        edge_pairs: list[tuple[int, int]] = []
        edge_atoms: list[frozenset] = []
        if self.d == 2:
            ids = [vid(a, x) for a, x, _ in ring]
            for j in range(len(ring)):
                label = ring[j][2]
                pair = [ids[j - 1], ids[j]]
                facets.append(CellFacet(label, pair, None, 0.0))
                edge_pairs.append((pair[0], pair[1]))
        else:
            seen_edges: dict[frozenset, int] = {}
            for label, fring in facet_rings.items():
                ids = [vid(a, x) for a, x, _ in fring]
                labels = [e for _, _, e in fring]
                facets.append(CellFacet(label, ids, None, 0.0, labels))
                for j in range(len(fring)):
                    atoms = frozenset({p_ref, label, labels[j]})
                    if atoms not in seen_edges:
                        seen_edges[atoms] = len(edge_pairs)
                        edge_pairs.append((ids[j - 1], ids[j]))
                        edge_atoms.append(atoms)

        vertices = np.array(coords, dtype=float).reshape(-1, self.d)
        atoms_by_vertex = sorted(vertex_index, key=vertex_index.get)

        vertex_keys = [self.register(0, a, vertices[[k]], index, vertices[k]) for k, a in enumerate(atoms_by_vertex)]
        edge_keys = []
        if self.d == 3:
            for atoms, (u, v) in zip(edge_atoms, edge_pairs):
                edge_keys.append(self.register(1, atoms, vertices[[u, v]], index, None,
                                               vertex_keys=(vertex_keys[u], vertex_keys[v])))
        for f in facets:
            atoms = frozenset({p_ref, f.label})
            poly = vertices[f.polygon]
            if self.d == 2:
                vkeys = tuple(vertex_keys[k] for k in f.polygon)
                f.key = self.register(1, atoms, poly, index, None, vertex_keys=vkeys)
            else:
                vkeys = tuple(vertex_keys[k] for k in f.polygon)
                ekeys = tuple(self._edge_key(p_ref, f.label, e) for e in f.edge_labels)
                f.key = self.register(2, atoms, poly, index, None, vertex_keys=vkeys, edge_keys=ekeys)
            f.measure = self.faces[self.d - 1][f.key].measure

        normals, offsets = [], []
        for f in facets:
            if f.is_clip:
                side = next(s for s in self.sides if s.label == f.label)
                n = np.zeros(self.d)
                n[side.axis] = side.sign
                normals.append(n)
                offsets.append(side.sign * side.bound)
            else:
                q = self.points[self._ext_index(f.label)]
                n = q - p
                normals.append(n)
                offsets.append(float(np.dot(n, 0.5 * (p + q))))

        cell = Cell(
            index=index,
            generator=np.array(p, dtype=float),
            vertices=vertices,
            vertex_keys=vertex_keys,
            facets=facets,
            edge_keys=edge_keys if self.d == 3 else [f.key for f in facets],
            edges=np.array(edge_pairs, dtype=np.int64).reshape(-1, 2),
            halfspaces=(np.array(normals).reshape(-1, self.d), np.array(offsets)),
            volume=0.0,
            clipped=clipped,
        )
        simplices = cell.simplices()
        cell.volume = float(simplex_volumes(simplices).sum()) if len(simplices) else 0.0
        return cell, self._certified(cell, atoms_by_vertex)

    def _edge_key(self, p_ref, label, edge_label) -> FaceKey:
        return canonical_key(frozenset({p_ref, label, edge_label}))[0]

    def _ext_index(self, ref: GenRef) -> int:
        return self._ref_index[ref]

    def register(self, dim, atoms, coords, cell_index, point, vertex_keys=(), edge_keys=()) -> FaceKey:
        key, anchor_shift = canonical_key(atoms)
        registry = self.faces[dim]
        face = registry.get(key)
        if face is None:
            local = np.asarray(coords, dtype=float)
            if self.periodic and any(anchor_shift):
                local = local - self._shift_vector(anchor_shift)
            if dim == 0:
                measure = 1.0
            elif dim == 1:
                measure = float(np.linalg.norm(local[1] - local[0]))
            else:
                measure = polygon_area(local)
            face = Face(dim, key, local, measure, bool(key[1]), [], tuple(vertex_keys), tuple(edge_keys))
            registry[key] = face
        if cell_index not in face.cells:
            face.cells.append(cell_index)
        return key

    def _shift_vector(self, shift) -> np.ndarray:
        vec = np.zeros(self.d)
        vec[:-1] = np.asarray(shift, dtype=float) * self.period
        return vec

    def _certified(self, cell: Cell, atoms_by_vertex) -> bool:
        """Радиус безопасности: шар B(v, |v-p|) каждой вершины внутри покрытой копиями полосы."""
        if not self.periodic:
            return True
        if any(ref[0] < 0 for atoms in atoms_by_vertex for ref in atoms if isinstance(ref, tuple)):
            return False
        r = np.linalg.norm(cell.vertices - cell.generator, axis=1)
        lateral = cell.vertices[:, :-1]
        lo, hi = -self.ghost_width, self.domain.L + self.ghost_width
        return bool(np.all(lateral - r[:, None] >= lo) and np.all(lateral + r[:, None] <= hi))


def _reverse_ring(ring: list) -> list:
    """Обратный обход: входящая метка вершины становится меткой следующего ребра."""
    n = len(ring)
    return [(ring[k][0], ring[k][1], ring[(k + 1) % n][2]) for k in range(n - 1, -1, -1)]


def _chain_cap(segments: dict, side: ClipSide) -> list:
    """Сборка грани-крышки по отрезкам сечения: Y_F -> X_F с меткой F."""
    start = next(iter(segments))
    ring, cur = [], start
    for _ in range(len(segments)):
        if cur not in segments:
            raise GeometryError(f"Cap facet on side {side.label} does not close")
        nxt, x, label = segments[cur]
        ring.append((nxt, x, label))
        cur = nxt
        if cur == start:
            break
    if cur != start or len(ring) != len(segments):
        raise GeometryError(f"Cap facet on side {side.label} does not close")
    return ring


def _build(sample, ext_points, ext_orig, ext_shift, lower, upper, ghost_width: float = 0.0):
    sentinels = sentinel_corners(np.asarray(lower, float), np.asarray(upper, float), config.SENTINEL_FACTOR)
    tri = triangulate(ext_points, sentinels)
    builder = _Builder(sample, ext_points, ext_orig, ext_shift, tri)
    builder.ghost_width = ghost_width
    cells, certified = [], True
    for i in range(sample.n):
        cell, ok = builder.build_cell(i)
        cells.append(cell)
        certified = certified and ok
    return cells, builder.faces, tri.flips, certified


# ======================== Функции уровня модуля ========================

def faces_of_dim(diagram: VoronoiDiagram, dim: int) -> list[Face]:
    return diagram.faces_of_dim(dim)


def neighborhood_diameter(diagram: VoronoiDiagram, index: int) -> float:
    return diagram.neighborhood_diameter(index)


def locate_cell(diagram: VoronoiDiagram, query) -> int:
    return diagram.locate_cell(query)
