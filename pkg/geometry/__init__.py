"""
Геометрия — триангуляция Делоне, обрезанная диаграмма Вороного, меры граней.
"""

from .voronoi import (
    Cell,
    CellFacet,
    Face,
    VoronoiDiagram,
    build_voronoi,
    canonical_key,
    faces_of_dim,
    format_key,
    locate_cell,
    neighborhood_diameter,
)
from .polytope import clipped_volume, convex_volume, polygon_area
