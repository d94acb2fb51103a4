"""
Каталог допустимых множеств: шар, прямоугольник, объединение шаров,
гладкая «клякса» (звёздная область с гармониками), область под графиком,
полупространство для опорной модели.
"""

import itertools
import logging
import math

import numpy as np
from scipy import integrate

from errors import ConfigError, UsageError
from geometry.polytope import clipped_volume, intersection_volume

from .base import BoundaryPatch, PolylineDistance, Shape, merge_patches, patch_from_polyline

logger = logging.getLogger(__name__)

TANGENCY_TOL = 1e-9
OUTLINE_VERTICES = 1 << 14


def _window(subset_spec, default: tuple[float, float]) -> tuple[float, float, bool]:
    """(start, stop, closed) для углового/параметрического окна."""
    if subset_spec is None or subset_spec.get("kind", "whole") == "whole":
        return default[0], default[1], True
    kind = subset_spec["kind"]
    if kind not in ("angular", "parameter"):
        raise UsageError(f"Unknown boundary subset kind: {kind}")
    start, stop = float(subset_spec["start"]), float(subset_spec["stop"])
    if not stop > start:
        raise UsageError(f"Degenerate boundary subset [{start}, {stop}]")
    return start, stop, False


def _trapezoid(m: int, step: float, closed: bool) -> np.ndarray:
    if closed:
        return np.full(m, step)
    w = np.full(m + 1, step)
    w[0] = w[-1] = 0.5 * step
    return w


def _check_margin(shape: Shape):
    if not shape.margin() > 0:
        raise ConfigError(f"{shape.kind} must lie strictly inside Q (margin {shape.margin():.4g})")


def _as_point(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if len(arr) not in (2, 3):
        raise ConfigError(f"{name} must have 2 or 3 coordinates, got {len(arr)}")
    return arr


# ======================== Шар ========================

class Ball(Shape):
    kind = "ball"

    def __init__(self, center, radius: float):
        self.center = _as_point(center, "ball center")
        self.d = len(self.center)
        self.radius = float(radius)
        if not self.radius > 0:
            raise ConfigError(f"Ball radius must be positive, got {radius}")
        _check_margin(self)

    def contains(self, points):
        x = np.atleast_2d(points) - self.center
        return np.einsum("ij,ij->i", x, x) <= self.radius ** 2

    def signed_distance(self, points):
        return np.linalg.norm(np.atleast_2d(points) - self.center, axis=1) - self.radius

    def volume(self):
        return math.pi * self.radius ** 2 if self.d == 2 else 4.0 / 3.0 * math.pi * self.radius ** 3

    def surface_area(self):
        return 2.0 * math.pi * self.radius if self.d == 2 else 4.0 * math.pi * self.radius ** 2

    def margin(self):
        return float(np.min(0.5 - np.abs(self.center))) - self.radius

    def boundary_patch(self, subset_spec=None, target_tolerance=1e-4, max_spacing=None):
        if self.d == 2:
            return circle_arc_patch(self.center, self.radius, *_window(subset_spec, (0.0, 2 * math.pi)),
                                    target_tolerance, max_spacing)
        start, stop, _ = _window(subset_spec, (0.0, math.pi))
        return sphere_band_patch(self.center, self.radius, start, stop, target_tolerance, max_spacing)

    def describe(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}


def _arc_step(radius: float, tolerance: float, max_spacing) -> float:
    """Угловой шаг с прогибом хорды r(1 - cos(Δ/2)) <= tolerance."""
    step = 2.0 * math.acos(max(1.0 - tolerance / radius, -1.0)) if tolerance < radius else math.pi / 2
    if max_spacing:
        step = min(step, max_spacing / radius)
    return step


def circle_arc_patch(center, radius, start, stop, closed, tolerance, max_spacing=None) -> BoundaryPatch:
    step = _arc_step(radius, tolerance, max_spacing)
    m = max(int(math.ceil((stop - start) / step)), 8 if closed else 2)
    delta = (stop - start) / m
    theta = start + delta * np.arange(m if closed else m + 1)
    vertices = center + radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    patch = patch_from_polyline(vertices, closed, radius * (1.0 - math.cos(delta / 2.0)))
    return BoundaryPatch(patch.points, radius * _trapezoid(m, delta, closed), patch.chord_tolerance,
                         patch.elements, patch.spacing)


def sphere_band_patch(center, radius, start, stop, tolerance, max_spacing=None,
                      keep=None) -> BoundaryPatch:
    """Широтно-долготная сетка; веса узлов — точные площади сферических трапеций."""
    step = math.sqrt(2.0) * math.acos(max(1.0 - tolerance / radius, -1.0)) if tolerance < radius else math.pi / 4
    if max_spacing:
        step = min(step, max_spacing / radius)
    m = max(int(math.ceil((stop - start) / step)), 4)
    n_phi = max(int(math.ceil(2 * math.pi / step)), 8)
    theta = np.linspace(start, stop, m + 1)
    phi = np.linspace(0.0, 2 * math.pi, n_phi + 1)

    t_mid = 0.5 * (theta[:-1] + theta[1:])
    p_mid = 0.5 * (phi[:-1] + phi[1:])
    tt, pp = np.meshgrid(t_mid, p_mid, indexing="ij")
    nodes = center + radius * _spherical(tt.reshape(-1), pp.reshape(-1))
    band = radius ** 2 * (np.cos(theta[:-1]) - np.cos(theta[1:])) * (2 * math.pi / n_phi)
    weights = np.repeat(band, n_phi)

    grid = center + radius * _spherical(*[g.reshape(-1) for g in np.meshgrid(theta, phi, indexing="ij")])
    grid = grid.reshape(m + 1, n_phi + 1, 3)
    a, b = grid[:-1, :-1], grid[:-1, 1:]
    c, e = grid[1:, 1:], grid[1:, :-1]
    tris = np.concatenate([np.stack([a, b, c], axis=2).reshape(-1, 3, 3),
                           np.stack([a, c, e], axis=2).reshape(-1, 3, 3)])
    if keep is not None:
        mask = keep(nodes)
        nodes, weights = nodes[mask], weights[mask]
        tris = tris[keep(tris.mean(axis=1))]
    angle = max((stop - start) / m, 2 * math.pi / n_phi)
    chord = radius * (1.0 - math.cos(angle / math.sqrt(2.0)))
    spacing = float(np.max(np.linalg.norm(tris[:, 1] - tris[:, 0], axis=1), initial=0.0))
    return BoundaryPatch(nodes, weights, chord, tris, max(spacing, radius * angle))


def _spherical(theta, phi):
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=1)


# ======================== Прямоугольник ========================

class Box(Shape):
    kind = "box"

    def __init__(self, lower, upper):
        self.lower = _as_point(lower, "box lower")
        self.upper = _as_point(upper, "box upper")
        self.d = len(self.lower)
        if len(self.upper) != self.d or np.any(self.upper <= self.lower):
            raise ConfigError(f"Box needs lower < upper componentwise, got {self.lower} / {self.upper}")
        _check_margin(self)

    def contains(self, points):
        x = np.atleast_2d(points)
        return np.all((x >= self.lower) & (x <= self.upper), axis=1)

    def signed_distance(self, points):
        x = np.atleast_2d(points)
        center = 0.5 * (self.lower + self.upper)
        q = np.abs(x - center) - 0.5 * (self.upper - self.lower)
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
        inside = np.minimum(q.max(axis=1), 0.0)
        return outside + inside

    def volume(self):
        return float(np.prod(self.upper - self.lower))

    def surface_area(self):
        s = self.upper - self.lower
        if self.d == 2:
            return 2.0 * float(s.sum())
        return 2.0 * float(s[0] * s[1] + s[1] * s[2] + s[0] * s[2])

    def margin(self):
        return float(min(np.min(self.lower + 0.5), np.min(0.5 - self.upper)))

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        eye = np.eye(self.d)
        return np.vstack([eye, -eye]), np.concatenate([self.upper, -self.lower])

    def cell_intersection_volume(self, vertices, edges):
        return intersection_volume(vertices, *self.halfspaces())

    def sides(self) -> list[tuple[int, int]]:
        """(ось, 0 = нижняя / 1 = верхняя) в порядке нумерации сторон."""
        return [(axis, hi) for axis in range(self.d) for hi in (0, 1)]

    def boundary_patch(self, subset_spec=None, target_tolerance=1e-4, max_spacing=None):
        if subset_spec is None or subset_spec.get("kind", "whole") == "whole":
            chosen = self.sides()
        elif subset_spec["kind"] == "side":
            k = int(subset_spec["side"])
            if not 0 <= k < 2 * self.d:
                raise UsageError(f"Box side {k} out of range 0..{2 * self.d - 1}")
            chosen = [self.sides()[k]]
        else:
            raise UsageError(f"Unknown boundary subset kind for box: {subset_spec['kind']}")
        spacing = max_spacing or max(target_tolerance ** 0.5, 1e-3)
        return merge_patches([self._face_patch(axis, hi, spacing) for axis, hi in chosen])

    def _face_patch(self, axis: int, hi: int, spacing: float) -> BoundaryPatch:
        level = self.upper[axis] if hi else self.lower[axis]
        free = [k for k in range(self.d) if k != axis]
        if self.d == 2:
            k = free[0]
            m = max(int(math.ceil((self.upper[k] - self.lower[k]) / spacing)), 2)
            vertices = np.zeros((m + 1, 2))
            vertices[:, k] = np.linspace(self.lower[k], self.upper[k], m + 1)
            vertices[:, axis] = level
            return patch_from_polyline(vertices, False, 0.0)
        ns = [max(int(math.ceil((self.upper[k] - self.lower[k]) / spacing)), 2) for k in free]
        grids = [np.linspace(self.lower[k], self.upper[k], n + 1) for k, n in zip(free, ns)]
        mids = [0.5 * (g[:-1] + g[1:]) for g in grids]
        uu, vv = np.meshgrid(*mids, indexing="ij")
        nodes = np.zeros((uu.size, 3))
        nodes[:, free[0]], nodes[:, free[1]], nodes[:, axis] = uu.reshape(-1), vv.reshape(-1), level
        cell_area = np.prod([(self.upper[k] - self.lower[k]) / n for k, n in zip(free, ns)])
        gu, gv = np.meshgrid(*grids, indexing="ij")
        grid = np.zeros(gu.shape + (3,))
        grid[..., free[0]], grid[..., free[1]], grid[..., axis] = gu, gv, level
        a, b, c, e = grid[:-1, :-1], grid[1:, :-1], grid[1:, 1:], grid[:-1, 1:]
        tris = np.concatenate([np.stack([a, b, c], axis=2).reshape(-1, 3, 3),
                               np.stack([a, c, e], axis=2).reshape(-1, 3, 3)])
        step = max((self.upper[k] - self.lower[k]) / n for k, n in zip(free, ns))
        return BoundaryPatch(nodes, np.full(len(nodes), cell_area), 0.0, tris, step * math.sqrt(2.0))

    @property
    def c2_boundary(self):
        # грани плоские, внутри каждой грани класс C²
        return True

    def describe(self):
        return {"kind": self.kind, "lower": self.lower.tolist(), "upper": self.upper.tolist()}


# ======================== Объединение шаров ========================

class BallUnion(Shape):
    """Объединение шаров, пересекающихся трансверсально или не пересекающихся."""

    kind = "ball_union"

    def __init__(self, centers, radii):
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        self.radii = np.asarray(radii, dtype=float).reshape(-1)
        self.d = self.centers.shape[1]
        if len(self.radii) != len(self.centers) or len(self.radii) == 0:
            raise ConfigError("ball_union needs one radius per center")
        if self.d not in (2, 3) or np.any(self.radii <= 0):
            raise ConfigError("ball_union needs positive radii in d = 2 or 3")
        for i, j in itertools.combinations(range(len(self.radii)), 2):
            dist = float(np.linalg.norm(self.centers[i] - self.centers[j]))
            ri, rj = self.radii[i], self.radii[j]
            if abs(dist - (ri + rj)) <= TANGENCY_TOL or abs(dist - abs(ri - rj)) <= TANGENCY_TOL:
                raise ConfigError(f"Balls {i} and {j} are tangent (osculating union is not admissible)")
        self._volume = None
        self._surface = None
        _check_margin(self)

    def contains(self, points):
        x = np.atleast_2d(points)
        d2 = ((x[:, None, :] - self.centers[None, :, :]) ** 2).sum(axis=2)
        return np.any(d2 <= self.radii ** 2, axis=1)

    def signed_distance(self, points):
        x = np.atleast_2d(points)
        dist = np.linalg.norm(x[:, None, :] - self.centers[None, :, :], axis=2) - self.radii
        return dist.min(axis=1)

    def margin(self):
        return float(np.min(np.min(0.5 - np.abs(self.centers), axis=1) - self.radii))

    def _strictly_inside_other(self, points, own: int) -> np.ndarray:
        mask = np.zeros(len(points), dtype=bool)
        for j in range(len(self.radii)):
            if j != own:
                mask |= np.sum((points - self.centers[j]) ** 2, axis=1) < self.radii[j] ** 2
        return mask

    def _uncovered_arcs(self, i: int) -> list[tuple[float, float]]:
        """Дуги окружности i вне остальных кругов (d=2)."""
        covered = []
        ci, ri = self.centers[i], self.radii[i]
        for j in range(len(self.radii)):
            if j == i:
                continue
            delta = self.centers[j] - ci
            dist = float(np.linalg.norm(delta))
            rj = self.radii[j]
            if dist >= ri + rj or dist + rj <= ri:
                continue
            if dist + ri <= rj:
                return []
            phi = math.atan2(delta[1], delta[0])
            alpha = math.acos((ri ** 2 + dist ** 2 - rj ** 2) / (2 * ri * dist))
            start = (phi - alpha) % (2 * math.pi)
            if start + 2 * alpha > 2 * math.pi:
                covered += [(start, 2 * math.pi), (0.0, start + 2 * alpha - 2 * math.pi)]
            else:
                covered.append((start, start + 2 * alpha))
        covered.sort()
        free, cursor = [], 0.0
        for a, b in covered:
            if a > cursor:
                free.append((cursor, a))
            cursor = max(cursor, b)
        if cursor < 2 * math.pi:
            free.append((cursor, 2 * math.pi))
        # склеиваем дугу через угол 0
        if len(free) > 1 and free[0][0] == 0.0 and free[-1][1] == 2 * math.pi:
            first = free.pop(0)
            last = free.pop()
            free.append((last[0], first[1] + 2 * math.pi))
        return free

    def boundary_patch(self, subset_spec=None, target_tolerance=1e-4, max_spacing=None):
        if subset_spec is not None and subset_spec.get("kind", "whole") != "whole":
            raise UsageError("ball_union supports only the whole boundary as a patch")
        patches = []
        for i, (c, r) in enumerate(zip(self.centers, self.radii)):
            if self.d == 2:
                arcs = self._uncovered_arcs(i)
                if arcs == [(0.0, 2 * math.pi)]:
                    patches.append(circle_arc_patch(c, r, 0.0, 2 * math.pi, True, target_tolerance, max_spacing))
                    continue
                for a, b in arcs:
                    if b - a > 1e-12:
                        patches.append(circle_arc_patch(c, r, a, b, False, target_tolerance, max_spacing))
            else:
                patches.append(sphere_band_patch(
                    c, r, 0.0, math.pi, target_tolerance, max_spacing,
                    keep=lambda pts, own=i: ~self._strictly_inside_other(pts, own)))
        return merge_patches(patches)

    def surface_area(self):
        if self._surface is None:
            if self.d == 2:
                self._surface = float(sum(r * sum(b - a for a, b in self._uncovered_arcs(i))
                                          for i, r in enumerate(self.radii)))
            else:
                self._surface = self.boundary_patch(None, 1e-6).measure
        return self._surface

    def _slice_length(self, x: float, centers: np.ndarray, radii: np.ndarray) -> float:
        """Длина объединения отрезков — сечения кругов прямой x = const."""
        half = radii ** 2 - (x - centers[:, 0]) ** 2
        idx = np.flatnonzero(half > 0)
        if len(idx) == 0:
            return 0.0
        h = np.sqrt(half[idx])
        intervals = sorted(zip(centers[idx, 1] - h, centers[idx, 1] + h))
        total, (lo, hi) = 0.0, intervals[0]
        for a, b in intervals[1:]:
            if a > hi:
                total += hi - lo
                lo, hi = a, b
            else:
                hi = max(hi, b)
        return total + hi - lo

    def _disk_union_area(self, centers: np.ndarray, radii: np.ndarray) -> float:
        if len(radii) == 0:
            return 0.0
        breaks = sorted(set(np.concatenate([centers[:, 0] - radii, centers[:, 0] + radii]).tolist()))
        value, _ = integrate.quad(self._slice_length, breaks[0], breaks[-1], args=(centers, radii),
                                  points=breaks[1:-1] or None, limit=400, epsabs=1e-12, epsrel=1e-10)
        return value

    def volume(self):
        if self._volume is None:
            if self.d == 2:
                self._volume = self._disk_union_area(self.centers, self.radii)
            else:
                def slice_area(z):
                    half = self.radii ** 2 - (z - self.centers[:, 2]) ** 2
                    idx = np.flatnonzero(half > 0)
                    return self._disk_union_area(self.centers[idx, :2], np.sqrt(half[idx]))

                lo = float(np.min(self.centers[:, 2] - self.radii))
                hi = float(np.max(self.centers[:, 2] + self.radii))
                self._volume, _ = integrate.quad(slice_area, lo, hi, limit=200, epsabs=1e-10, epsrel=1e-8)
        return self._volume

    def describe(self):
        return {"kind": self.kind, "centers": self.centers.tolist(), "radii": self.radii.tolist()}


# ======================== Гладкая клякса ========================

class SmoothBlob(Shape):
    """Звёздная область r <= ρ(θ), ρ(θ) = r0 + Σ a_k cos(kθ + φ_k), d=2."""

    kind = "smooth_blob"
    d = 2

    def __init__(self, center, r0: float, harmonics):
        self.center = _as_point(center, "blob center")
        if len(self.center) != 2:
            raise ConfigError("smooth_blob is defined for d = 2 only")
        self.r0 = float(r0)
        self.harmonics = [(int(k), float(a), float(phi)) for k, a, phi in harmonics]
        if any(k < 1 for k, _, _ in self.harmonics):
            raise ConfigError("Blob harmonic orders must be positive integers")
        theta = np.linspace(0.0, 2 * math.pi, OUTLINE_VERTICES, endpoint=False)
        if np.min(self.rho(theta)) <= 0:
            raise ConfigError("Blob radius function must stay positive")
        self._outline = self.point_at(theta)
        arc = np.linalg.norm(np.roll(self._outline, -1, axis=0) - self._outline, axis=1)
        self._distance = PolylineDistance(self._outline, float(arc.max()) * 1.01)
        self._surface = None
        _check_margin(self)

    def rho(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.r0)
        for k, a, phi in self.harmonics:
            out = out + a * np.cos(k * theta + phi)
        return out

    def rho_prime(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape)
        for k, a, phi in self.harmonics:
            out = out - a * k * np.sin(k * theta + phi)
        return out

    def speed(self, theta):
        return np.sqrt(self.rho(theta) ** 2 + self.rho_prime(theta) ** 2)

    def point_at(self, theta):
        theta = np.asarray(theta, dtype=float)
        r = self.rho(theta)
        return self.center + np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def contains(self, points):
        x = np.atleast_2d(points) - self.center
        r = np.hypot(x[:, 0], x[:, 1])
        return r <= self.rho(np.arctan2(x[:, 1], x[:, 0]))

    def signed_distance(self, points):
        dist = self._distance(points)
        return np.where(self.contains(points), -dist, dist)

    def volume(self):
        orders = [k for k, _, _ in self.harmonics]
        if len(set(orders)) == len(orders):
            return math.pi * self.r0 ** 2 + 0.5 * math.pi * sum(a * a for _, a, _ in self.harmonics)
        value, _ = integrate.quad(lambda t: 0.5 * self.rho(t) ** 2, 0.0, 2 * math.pi, limit=400)
        return value

    def arclength(self, start: float, stop: float) -> float:
        value, _ = integrate.quad(self.speed, start, stop, limit=400, epsabs=1e-13, epsrel=1e-12)
        return value

    def surface_area(self):
        if self._surface is None:
            self._surface = self.arclength(0.0, 2 * math.pi)
        return self._surface

    def margin(self):
        return float(0.5 - np.max(np.abs(self._outline))) - 2 * self._distance.half_arc

    def _sagitta(self, theta: np.ndarray) -> float:
        a, b = self.point_at(theta[:-1]), self.point_at(theta[1:])
        mid = self.point_at(0.5 * (theta[:-1] + theta[1:]))
        chord = b - a
        cross = np.abs(chord[:, 0] * (mid - a)[:, 1] - chord[:, 1] * (mid - a)[:, 0])
        return float(np.max(cross / np.maximum(np.linalg.norm(chord, axis=1), 1e-300)))

    def boundary_patch(self, subset_spec=None, target_tolerance=1e-4, max_spacing=None):
        start, stop, closed = _window(subset_spec, (0.0, 2 * math.pi))
        m = 64
        while True:
            theta = np.linspace(start, stop, m + 1)
            seg = np.linalg.norm(np.diff(self.point_at(theta), axis=0), axis=1)
            if self._sagitta(theta) <= target_tolerance and (not max_spacing or seg.max() <= max_spacing):
                break
            m *= 2
            if m > 1 << 22:
                raise UsageError(f"Cannot reach chord tolerance {target_tolerance} on the blob boundary")
        delta = (stop - start) / m
        nodes_theta = theta[:-1] if closed else theta
        vertices = self.point_at(nodes_theta)
        weights = self.speed(nodes_theta) * _trapezoid(m, delta, closed)
        patch = patch_from_polyline(vertices, closed, self._sagitta(theta))
        return BoundaryPatch(patch.points, weights, patch.chord_tolerance, patch.elements, patch.spacing)

    def describe(self):
        return {"kind": self.kind, "center": self.center.tolist(), "r0": self.r0,
                "harmonics": [list(h) for h in self.harmonics]}


# ======================== Область под графиком ========================

class GraphRegion(Shape):
    """
    A = {(u, v): u0 <= u <= u0 + width, v0 <= v <= g(u)},
    g(u) = top - slope·s - curvature·s², s = u - u0. Производная g
    ограничена и отделена от нуля: -slope - 2·curvature·width <= g' <= -slope.
    """

    kind = "graph_region"
    d = 2

    def __init__(self, u0: float, v0: float, width: float, top: float, slope: float, curvature: float = 0.0):
        self.u0, self.v0, self.width = float(u0), float(v0), float(width)
        self.top, self.slope, self.curvature = float(top), float(slope), float(curvature)
        if not (self.width > 0 and self.slope > 0 and self.curvature >= 0):
            raise ConfigError("graph_region needs width > 0, slope > 0, curvature >= 0")
        if not self.g(self.u0 + self.width) > self.v0:
            raise ConfigError("graph_region: the graph must stay above the base line")
        outline = np.vstack([self._graph_vertices(OUTLINE_VERTICES), self._straight_outline()])
        self._distance = PolylineDistance(outline, self.width / OUTLINE_VERTICES * 4.0)
        _check_margin(self)

    @property
    def u1(self) -> float:
        return self.u0 + self.width

    def g(self, u):
        s = np.asarray(u, dtype=float) - self.u0
        return self.top - self.slope * s - self.curvature * s * s

    def g_prime(self, u):
        return -self.slope - 2.0 * self.curvature * (np.asarray(u, dtype=float) - self.u0)

    def _graph_vertices(self, m: int, start=None, stop=None) -> np.ndarray:
        u = np.linspace(self.u0 if start is None else start, self.u1 if stop is None else stop, m + 1)
        return np.stack([u, self.g(u)], axis=1)

    def _straight_outline(self) -> np.ndarray:
        pieces = [
            np.linspace([self.u1, self.g(self.u1)], [self.u1, self.v0], 1024),
            np.linspace([self.u1, self.v0], [self.u0, self.v0], 1024),
            np.linspace([self.u0, self.v0], [self.u0, self.top], 1024),
        ]
        return np.vstack(pieces)

    def contains(self, points):
        x = np.atleast_2d(points)
        u, v = x[:, 0], x[:, 1]
        return (u >= self.u0) & (u <= self.u1) & (v >= self.v0) & (v <= self.g(u))

    def signed_distance(self, points):
        dist = self._distance(points)
        return np.where(self.contains(points), -dist, dist)

    def volume(self):
        w = self.width
        return (self.top - self.v0) * w - 0.5 * self.slope * w ** 2 - self.curvature * w ** 3 / 3.0

    def graph_length(self, start=None, stop=None) -> float:
        value, _ = integrate.quad(lambda u: math.sqrt(1.0 + self.g_prime(u) ** 2),
                                  self.u0 if start is None else start, self.u1 if stop is None else stop,
                                  epsabs=1e-13, epsrel=1e-12)
        return value

    def surface_area(self):
        return (self.top - self.v0) + (float(self.g(self.u1)) - self.v0) + self.width + self.graph_length()

    def margin(self):
        return float(min(self.u0 + 0.5, 0.5 - self.u1, self.v0 + 0.5, 0.5 - self.top))

    def _graph_patch(self, start, stop, tolerance, max_spacing) -> BoundaryPatch:
        # прогиб хорды длины h по u не больше curvature·h²/4
        step = math.sqrt(4.0 * tolerance / self.curvature) if self.curvature > 0 else (stop - start) / 16
        if max_spacing:
            step = min(step, max_spacing / math.sqrt(1.0 + (self.slope + 2 * self.curvature * self.width) ** 2))
        m = max(int(math.ceil((stop - start) / step)), 2)
        u = np.linspace(start, stop, m + 1)
        vertices = np.stack([u, self.g(u)], axis=1)
        patch = patch_from_polyline(vertices, False, self.curvature * ((stop - start) / m) ** 2 / 4.0)
        weights = np.sqrt(1.0 + self.g_prime(u) ** 2) * _trapezoid(m, (stop - start) / m, False)
        return BoundaryPatch(patch.points, weights, patch.chord_tolerance, patch.elements, patch.spacing)

    def boundary_patch(self, subset_spec=None, target_tolerance=1e-4, max_spacing=None):
        if subset_spec is not None and subset_spec.get("kind", "whole") == "parameter":
            start, stop, _ = _window(subset_spec, (self.u0, self.u1))
            if start < self.u0 or stop > self.u1:
                raise UsageError(f"Graph window [{start}, {stop}] outside [{self.u0}, {self.u1}]")
            return self._graph_patch(start, stop, target_tolerance, max_spacing)
        if subset_spec is not None and subset_spec.get("kind", "whole") != "whole":
            raise UsageError(f"Unknown boundary subset kind for graph_region: {subset_spec['kind']}")
        spacing = max_spacing or max(target_tolerance ** 0.5, 1e-3)
        corners = [(self.u1, float(self.g(self.u1))), (self.u1, self.v0), (self.u0, self.v0), (self.u0, self.top)]
        straight = []
        for a, b in zip(corners[:-1], corners[1:]):
            length = math.dist(a, b)
            m = max(int(math.ceil(length / spacing)), 2)
            straight.append(patch_from_polyline(np.linspace(a, b, m + 1), False, 0.0))
        return merge_patches([self._graph_patch(self.u0, self.u1, target_tolerance, max_spacing)] + straight)

    def describe(self):
        return {"kind": self.kind, "u0": self.u0, "v0": self.v0, "width": self.width,
                "top": self.top, "slope": self.slope, "curvature": self.curvature}


# ======================== Полупространство ========================

class HalfSpaceReference(Shape):
    """{x : x_d <= 0} в координатах слоя; меры — на единицу боковой площади."""

    kind = "half_space_reference"

    def __init__(self, d: int):
        if d not in (2, 3):
            raise ConfigError(f"Unsupported dimension d={d}")
        self.d = int(d)

    def contains(self, points):
        return np.atleast_2d(points)[:, -1] <= 0.0

    def signed_distance(self, points):
        return np.atleast_2d(points)[:, -1].astype(float)

    def volume(self):
        return math.inf

    def surface_area(self):
        return math.inf

    def margin(self):
        return math.inf

    def cell_intersection_volume(self, vertices, edges):
        normal = np.zeros(self.d)
        normal[-1] = 1.0
        return clipped_volume(vertices, edges, normal, 0.0)

    def boundary_patch(self, subset_spec=None, target_tolerance=1e-4, max_spacing=None):
        raise UsageError("half_space_reference has an unbounded boundary; use slab coordinates")

    def describe(self):
        return {"kind": self.kind, "d": self.d}
