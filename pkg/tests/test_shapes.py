"""Тесты каталога множеств A и квадратур границы."""

import math

import numpy as np
import pytest
from matplotlib.path import Path

from errors import ConfigError, UsageError
from geometry import build_voronoi
from pointprocess import PointSample, constant_intensity, derive_seed, linear_intensity
from shapes import contains, get_shape, polytopal_union_from_cells

from conftest import uniform_points

BLOB = {"kind": "smooth_blob", "center": [0.0, 0.0], "r0": 0.25, "harmonics": [[3, 0.05, 0.0]]}


class TestRegistry:
    def test_cached(self):
        spec = {"kind": "ball", "center": [0.0, 0.0], "radius": 0.2}
        assert get_shape(spec) is get_shape(dict(spec))

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            get_shape({"kind": "torus"})

    def test_missing_parameter(self):
        with pytest.raises(ConfigError):
            get_shape({"kind": "ball", "center": [0.0, 0.0]})

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError):
            get_shape({"kind": "ball", "center": [0.0, 0.0], "radius": 0.2, "d": 3})

    def test_shape_must_fit_in_cube(self):
        with pytest.raises(ConfigError):
            get_shape({"kind": "ball", "center": [0.3, 0.0], "radius": 0.25})


class TestContains:
    def test_ball(self, ball):
        assert contains(ball, (0.1, 0.0))
        assert not contains(ball, (0.3, 0.0))

    def test_box_is_closed(self):
        box = get_shape({"kind": "box", "lower": [-0.2, -0.2], "upper": [0.2, 0.2]})
        assert contains(box, (0.2, 0.0))

    @pytest.mark.parametrize("spec", [
        {"kind": "ball", "center": [0.0, 0.0], "radius": 0.25},
        {"kind": "box", "lower": [-0.2, -0.1], "upper": [0.2, 0.3]},
        {"kind": "ball_union", "centers": [[-0.1, 0.0], [0.1, 0.05]], "radii": [0.18, 0.15]},
        BLOB,
    ])
    def test_signed_distance_agrees_with_membership(self, seed, spec):
        shape = get_shape(spec)
        probes = uniform_points(derive_seed(seed, "probes"), 100_000)
        sd = shape.signed_distance(probes)
        inside = shape.contains(probes)
        assert np.all(sd[inside] <= 0)
        assert np.all(sd[~inside] >= 0)

    def test_blob_against_polygonization(self, seed):
        blob = get_shape(BLOB)
        theta = np.linspace(0.0, 2 * math.pi, 100_000, endpoint=False)
        polygon = Path(blob.point_at(theta))
        probes = uniform_points(derive_seed(seed, "blob"), 100_000)
        r = np.hypot(probes[:, 0], probes[:, 1])
        far = np.abs(r - blob.rho(np.arctan2(probes[:, 1], probes[:, 0]))) > 1e-8
        assert np.array_equal(blob.contains(probes)[far], polygon.contains_points(probes)[far])


class TestSurface:
    def test_ball_patch_measure(self, ball):
        patch = ball.boundary_patch(None, 1e-4)
        assert patch.measure == pytest.approx(2 * math.pi * 0.25, rel=1e-4)
        assert patch.chord_tolerance <= 1e-4

    def test_ball_3d_patch_measure(self):
        ball = get_shape({"kind": "ball", "center": [0.0, 0.0, 0.0], "radius": 0.25})
        assert ball.boundary_patch(None, 1e-4).measure == pytest.approx(4 * math.pi * 0.0625, rel=1e-6)

    def test_box_side_is_exact(self):
        box = get_shape({"kind": "box", "lower": [-0.2, -0.1], "upper": [0.2, 0.3]})
        assert box.boundary_patch({"kind": "side", "side": 2}, 1e-4).measure == pytest.approx(0.4, abs=1e-12)
        assert box.boundary_patch(None, 1e-4).measure == pytest.approx(box.surface_area(), abs=1e-12)

    def test_box_bad_side(self):
        box = get_shape({"kind": "box", "lower": [-0.2, -0.1], "upper": [0.2, 0.3]})
        with pytest.raises(UsageError):
            box.boundary_patch({"kind": "side", "side": 4})

    def test_blob_window_matches_arclength(self):
        blob = get_shape(BLOB)
        patch = blob.boundary_patch({"kind": "angular", "start": 0.0, "stop": math.pi}, 1e-4)
        assert patch.measure == pytest.approx(blob.arclength(0.0, math.pi), rel=1e-4)

    def test_blob_volume(self):
        blob = get_shape(BLOB)
        assert blob.volume() == pytest.approx(math.pi * 0.0625 + 0.5 * math.pi * 0.0025, rel=1e-12)

    def test_degenerate_window(self):
        with pytest.raises(UsageError):
            get_shape(BLOB).boundary_patch({"kind": "angular", "start": 1.0, "stop": 1.0})

    def test_ball_union_surface(self):
        union = get_shape({"kind": "ball_union", "centers": [[-0.1, 0.0], [0.1, 0.05]], "radii": [0.18, 0.15]})
        assert union.boundary_patch(None, 1e-5).measure == pytest.approx(union.surface_area(), rel=1e-4)
        assert union.surface_area() < 2 * math.pi * (0.18 + 0.15)

    def test_ball_union_volume_by_monte_carlo(self, seed):
        union = get_shape({"kind": "ball_union", "centers": [[-0.1, 0.0], [0.1, 0.05]], "radii": [0.18, 0.15]})
        probes = uniform_points(derive_seed(seed, "mc"), 400_000)
        p = union.volume()
        assert np.mean(union.contains(probes)) == pytest.approx(p, abs=4 * math.sqrt(p * (1 - p) / len(probes)))

    def test_disjoint_union_is_additive(self):
        union = get_shape({"kind": "ball_union", "centers": [[-0.25, 0.0], [0.25, 0.0]], "radii": [0.1, 0.1]})
        assert union.volume() == pytest.approx(2 * math.pi * 0.01, rel=1e-6)
        assert union.surface_area() == pytest.approx(2 * 2 * math.pi * 0.1, rel=1e-12)

    def test_tangent_balls_rejected(self):
        with pytest.raises(ConfigError, match="tangent"):
            get_shape({"kind": "ball_union", "centers": [[-0.1, 0.0], [0.1, 0.0]], "radii": [0.1, 0.1]})

    def test_graph_region(self):
        region = get_shape({"kind": "graph_region", "u0": -0.3, "v0": -0.3, "width": 0.6,
                            "top": 0.3, "slope": 0.5, "curvature": 0.3})
        assert region.volume() == pytest.approx(0.6 * 0.6 - 0.25 * 0.36 - 0.3 * 0.216 / 3)
        window = region.boundary_patch({"kind": "parameter", "start": -0.3, "stop": 0.3}, 1e-4)
        assert window.measure == pytest.approx(region.graph_length(), rel=1e-4)
        assert region.boundary_patch(None, 1e-5).measure == pytest.approx(region.surface_area(), rel=1e-4)

    @pytest.mark.parametrize("t", [0.5, 1.5])
    def test_scaling(self, t):
        small = get_shape({"kind": "ball", "center": [0.0, 0.0], "radius": 0.2})
        scaled = get_shape({"kind": "ball", "center": [0.0, 0.0], "radius": 0.2 * t})
        assert scaled.boundary_patch(None, 1e-6).measure == pytest.approx(
            t * small.boundary_patch(None, 1e-6).measure, rel=1e-9)

    def test_refinement_is_monotone(self):
        blob = get_shape(BLOB)
        coarse = blob.boundary_patch(None, 1e-4).measure
        fine = blob.boundary_patch(None, 5e-5).measure
        assert abs(fine - coarse) <= 1e-4 * coarse


class TestWeightedContent:
    def test_unit_kappa_is_surface(self, ball):
        assert ball.weighted_surface_content(constant_intensity(1.0), 0.0) == pytest.approx(0.5 * math.pi)

    def test_gamma_equal_to_d_ignores_kappa(self, ball):
        kappa = linear_intensity(1.0, [1.0, 0.0])
        assert ball.weighted_surface_content(kappa, 2.0) == pytest.approx(ball.surface_area())

    def test_linear_kappa(self, ball):
        # ∫ (1 + x) ds по окружности с центром в нуле равен её длине
        kappa = linear_intensity(1.0, [1.0, 0.0])
        assert ball.weighted_surface_content(kappa, 0.0) == pytest.approx(0.5 * math.pi, rel=1e-6)

    def test_squared_linear_kappa(self, ball):
        kappa = linear_intensity(1.0, [1.0, 0.0])
        expected = 0.5 * math.pi + math.pi * 0.25 ** 3
        assert ball.weighted_surface_content(kappa, 0.0, power=2) == pytest.approx(expected, rel=1e-6)

    def test_constant_kappa_scaling(self, ball):
        # κ ≡ 4, γ = 1, d = 2: множитель 4^{1/2}
        value = ball.weighted_surface_content(constant_intensity(4.0), 1.0)
        assert value == pytest.approx(2.0 * ball.surface_area())

    def test_bad_power(self, ball):
        with pytest.raises(UsageError):
            ball.weighted_surface_content(constant_intensity(1.0), 0.0, power=3)


class TestPolytopalUnion:
    @pytest.fixture
    def diagram(self, seed):
        return build_voronoi(PointSample.from_points(uniform_points(seed, 80)))

    def test_all_cells_is_domain(self, diagram, seed):
        union = polytopal_union_from_cells(diagram, range(diagram.n))
        probes = uniform_points(derive_seed(seed, "p"), 1000)
        assert np.all(union.contains(probes))
        assert not union.contains([[0.7, 0.0]])[0]
        assert union.volume() == pytest.approx(1.0, rel=1e-9)
        assert union.surface_area() == 0.0

    def test_no_cells_is_empty(self, diagram, seed):
        union = polytopal_union_from_cells(diagram, [])
        assert not np.any(union.contains(uniform_points(derive_seed(seed, "p"), 1000)))
        assert union.volume() == 0.0

    def test_random_selection_matches_halfspace_tests(self, diagram, seed):
        chosen = np.flatnonzero(derive_seed(seed, "pick").rng().uniform(size=diagram.n) < 0.4)
        union = polytopal_union_from_cells(diagram, chosen)
        probes = uniform_points(derive_seed(seed, "p"), 10_000)
        oracle = np.zeros(len(probes), dtype=bool)
        for i in chosen:
            oracle |= diagram.cells[i].contains(probes)
        # точки на общих гранях выбранной и невыбранной ячеек имеют меру нуль
        assert np.array_equal(union.contains(probes), oracle)

    def test_bad_index(self, diagram):
        with pytest.raises(UsageError):
            polytopal_union_from_cells(diagram, [diagram.n])

    def test_no_boundary_quadrature(self, diagram):
        with pytest.raises(UsageError):
            polytopal_union_from_cells(diagram, [0]).boundary_patch()
