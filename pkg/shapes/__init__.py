"""
Shapes — каталог допустимых множеств A ⊂ Q.
"""

import json

from errors import ConfigError

from .base import BoundaryPatch, PolylineDistance, Shape, merge_patches, patch_from_polyline
from .catalog import Ball, BallUnion, Box, GraphRegion, HalfSpaceReference, SmoothBlob
from .polytopal import PolytopalUnion, polytopal_union_from_cells


_shapes = {}


def get_shape(spec: dict) -> Shape:
    """Получить множество по описанию {"kind": ..., параметры}."""
    cache_key = json.dumps(spec, sort_keys=True, default=str)
    if cache_key not in _shapes:
        params = {k: v for k, v in spec.items() if k not in ("kind", "d")}
        kind = spec.get("kind")
        try:
            if kind == "ball":
                shape = Ball(params["center"], params["radius"])
            elif kind == "box":
                shape = Box(params["lower"], params["upper"])
            elif kind == "ball_union":
                shape = BallUnion(params["centers"], params["radii"])
            elif kind == "smooth_blob":
                shape = SmoothBlob(params["center"], params["r0"], params.get("harmonics", []))
            elif kind == "graph_region":
                shape = GraphRegion(**params)
            elif kind == "half_space_reference":
                shape = HalfSpaceReference(int(spec.get("d", 2)))
            else:
                raise ConfigError(f"Unknown shape: {kind}", key="shape.kind")
        except (KeyError, TypeError) as e:
            raise ConfigError(f"Bad parameters for shape {kind}: {e}", key="shape") from e
        if "d" in spec and int(spec["d"]) != shape.d:
            raise ConfigError(f"Shape {kind} has dimension {shape.d}, config says d={spec['d']}", key="shape.d")
        _shapes[cache_key] = shape
    return _shapes[cache_key]


def contains(shape: Shape, x):
    """Скалярная форма проверки принадлежности."""
    return bool(shape.contains(x)[0])
