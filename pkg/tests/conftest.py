"""Общие фикстуры тестов pvlab."""

import numpy as np
import pytest

from geometry import build_voronoi
from pointprocess import PointSample, SeedPath, constant_intensity
from shapes import get_shape


@pytest.fixture
def seed():
    return SeedPath("0xtest")


@pytest.fixture
def unit_kappa():
    return constant_intensity(1.0)


@pytest.fixture
def ball():
    return get_shape({"kind": "ball", "center": [0.0, 0.0], "radius": 0.25})


@pytest.fixture
def two_point_diagram():
    """Генераторы (-1/4, 0) и (1/4, 0): биссектриса x = 0."""
    return build_voronoi(PointSample.from_points([[-0.25, 0.0], [0.25, 0.0]]))


@pytest.fixture
def single_point_diagram():
    return build_voronoi(PointSample.from_points([[0.1, -0.05]]))


def uniform_points(seed: SeedPath, n: int, d: int = 2) -> np.ndarray:
    return seed.rng().uniform(-0.5, 0.5, size=(n, d))


@pytest.fixture
def random_diagram(seed):
    pts = uniform_points(seed, 100)
    return build_voronoi(PointSample.from_points(pts))
