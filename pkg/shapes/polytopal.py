"""
Объединение ячеек Вороного как множество — шаг итерированной аппроксимации.
"""

import logging

import numpy as np

from errors import UsageError

from .base import Shape

logger = logging.getLogger(__name__)


class PolytopalUnion(Shape):
    """Точка принадлежит множеству, если ближайшая порождающая точка диаграммы выбрана."""

    kind = "polytopal_union"

    def __init__(self, diagram, inside_indices):
        self.diagram = diagram
        self.d = diagram.d
        idx = np.unique(np.asarray(list(inside_indices), dtype=np.int64))
        if len(idx) and (idx[0] < 0 or idx[-1] >= diagram.n):
            raise UsageError(f"Cell indices must lie in 0..{diagram.n - 1}")
        self.indices = idx
        self._selected = np.zeros(diagram.n, dtype=bool)
        self._selected[idx] = True

    @property
    def is_empty(self) -> bool:
        return len(self.indices) == 0

    def contains(self, points):
        x = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(x), dtype=bool)
        if self.is_empty:
            return out
        in_domain = self.diagram.domain.contains(x)
        if np.any(in_domain):
            out[in_domain] = self._selected[self.diagram.locate_cells(x[in_domain])]
        return out

    def signed_distance(self, points):
        raise UsageError("polytopal_union has no signed distance; use membership only")

    def volume(self):
        return float(sum(self.diagram.cells[i].volume for i in self.indices))

    def surface_area(self):
        """Суммарная мера граней между выбранной и невыбранной ячейками (без граней ∂Q)."""
        total = 0.0
        for face in self.diagram.faces_of_dim(self.d - 1):
            if face.on_clip_boundary:
                continue
            chosen = {bool(self._selected[c]) for c in face.cells}
            if len(chosen) == 2:
                total += face.measure
        return total

    def margin(self):
        if self.is_empty:
            return float("inf")
        lo, hi = self.diagram.domain.lower, self.diagram.domain.upper
        verts = np.vstack([self.diagram.cells[i].vertices for i in self.indices])
        return float(min(np.min(verts - lo), np.min(hi - verts)))

    def boundary_patch(self, subset_spec=None, target_tolerance=1e-4, max_spacing=None):
        raise UsageError("polytopal_union has no boundary quadrature")

    @property
    def c2_boundary(self):
        return False

    def describe(self):
        return {"kind": self.kind, "cells": len(self.indices), "n": self.diagram.n}


def polytopal_union_from_cells(diagram, inside_indices) -> PolytopalUnion:
    shape = PolytopalUnion(diagram, inside_indices)
    logger.debug(f"Polytopal union of {len(shape.indices)}/{diagram.n} cells")
    return shape
