"""
Самопроверка на малых выборках: сравнение диаграммы и статистик с
медленными эталонами из geometry.oracles.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from approximation import classify, maximal_points, surface_statistic, volume_statistics, zone_statistics
from geometry import build_voronoi
from geometry.oracles import (
    bisector_clipped_cells,
    boundary_facets_by_scan,
    brute_force_maxima,
    empty_circle_vertices,
    linear_scan_nearest,
    polygon_area,
    rasterized_symdiff,
)
from pointprocess import PointSample, SeedPath, derive_seed
from shapes import get_shape

logger = logging.getLogger(__name__)


@dataclass
class SelfTestCheck:
    name: str
    value: float
    oracle: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        status = "ok" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.12g} vs oracle {self.oracle:.12g} (tolerance {self.tolerance:.3g})"


def _check(name, value, oracle, tolerance) -> SelfTestCheck:
    return SelfTestCheck(name, float(value), float(oracle), float(tolerance), abs(value - oracle) <= tolerance)


def _points(seed: SeedPath, n: int, d: int = 2) -> np.ndarray:
    return seed.rng().uniform(-0.5, 0.5, size=(n, d))


def run_selftest(seed_root: str = "selftest") -> list[SelfTestCheck]:
    root = SeedPath(seed_root)
    checks = []

    pts = _points(derive_seed(root, "cells"), 60)
    diagram = build_voronoi(PointSample.from_points(pts))
    areas = np.array([polygon_area(c) for c in bisector_clipped_cells(pts)])
    ours = np.array([c.volume for c in diagram.cells])
    checks.append(_check("cell volumes (max abs diff)", float(np.max(np.abs(ours - areas))), 0.0, 1e-9))
    checks.append(_check("total volume", diagram.total_volume(), 1.0, 1e-9))

    queries = _points(derive_seed(root, "queries"), 5000)
    mismatches = int(np.count_nonzero(diagram.locate_cells(queries) != linear_scan_nearest(pts, queries)))
    checks.append(_check("nearest generator mismatches", mismatches, 0, 0))

    small = _points(derive_seed(root, "vertices"), 40)
    small_diagram = build_voronoi(PointSample.from_points(small))
    interior = sum(1 for f in small_diagram.faces_of_dim(0) if not f.sides)
    checks.append(_check("interior Voronoi vertices", interior, empty_circle_vertices(small), 0))

    pts = _points(derive_seed(root, "facets"), 100)
    diagram = build_voronoi(PointSample.from_points(pts))
    ball = get_shape({"kind": "ball", "center": [0.0, 0.0], "radius": 0.25})
    cls = classify(diagram, ball)
    ours = {tuple(sorted(f.generator_key)) for f in cls.boundary_facets}
    oracle = boundary_facets_by_scan(pts, cls.inside)
    checks.append(_check("boundary facet set difference", len(ours ^ oracle), 0, 0))

    box = get_shape({"kind": "box", "lower": [-0.2, -0.2], "upper": [0.2, 0.2]})
    cls = classify(diagram, box)
    symdiff = volume_statistics(cls).symdiff_volume
    resolution = 1024
    pixel = 1.0 / resolution ** 2
    edge_pixels = (box.surface_area() + surface_statistic(cls)) * resolution
    tolerance = 3 * pixel + 4 * math.sqrt(edge_pixels / 12.0) * pixel
    checks.append(_check("symmetric difference vs rasterization", symdiff,
                         rasterized_symdiff(pts, cls.inside, box, resolution), tolerance))

    single = build_voronoi(PointSample.from_points([[0.1, -0.05]]))
    patch = get_shape({"kind": "ball", "center": [0.0, 0.0], "radius": 0.25}).boundary_patch(None, 1e-4, 0.05)
    checks.append(_check("zone complexity of a single cell", zone_statistics(single, patch).complexity, 8, 0))

    for d in (2, 3):
        cloud = _points(derive_seed(root, f"maxima{d}"), 1000, d)
        checks.append(_check(f"maximal points d={d}", maximal_points(cloud), brute_force_maxima(cloud), 0))

    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.error(f"Self-test failed: {failed}")
    else:
        logger.info(f"Self-test passed ({len(checks)} checks)")
    return checks
