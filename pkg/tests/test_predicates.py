"""Тесты точных предикатов и символического возмущения."""

import numpy as np
import pytest

from geometry.predicates import (
    incircle,
    incircle_sos,
    insphere,
    insphere_sos,
    orient2d,
    orient2d_exact,
    orient3d,
)


class TestOrient:
    def test_counterclockwise(self):
        assert orient2d((0, 0), (1, 0), (0, 1)) == 1
        assert orient2d((0, 0), (0, 1), (1, 0)) == -1

    def test_collinear(self):
        assert orient2d((0, 0), (1, 1), (3, 3)) == 0

    def test_near_collinear_matches_exact(self):
        # сетка точек в несколько ulp от прямой y = x
        ulp = 2.0 ** -53
        for i in range(16):
            for j in range(16):
                a = (0.5 + i * ulp, 0.5 + j * ulp)
                assert orient2d(a, (12.0, 12.0), (24.0, 24.0)) == orient2d_exact(a, (12.0, 12.0), (24.0, 24.0))

    def test_orient3d_sign(self):
        assert orient3d((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, -1)) == 1
        assert orient3d((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)) == -1
        assert orient3d((0, 0, 0), (1, 0, 0), (0, 1, 0), (2, 3, 0)) == 0


class TestInCircle:
    a, b, c = (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)

    def test_inside_outside(self):
        assert incircle(self.a, self.b, self.c, (0.0, 0.0)) == 1
        assert incircle(self.a, self.b, self.c, (2.0, 0.0)) == -1

    def test_cocircular_is_zero(self):
        assert incircle(self.a, self.b, self.c, (0.0, -1.0)) == 0

    def test_symbolic_perturbation_resolves_cocircular(self):
        sign = incircle_sos(self.a, self.b, self.c, (0.0, -1.0), (0, 1, 2, 3))
        assert sign in (-1, 1)
        assert incircle_sos(self.a, self.b, self.c, (0.0, -1.0), (0, 1, 2, 3)) == sign

    def test_perturbation_keeps_nondegenerate_sign(self):
        assert incircle_sos(self.a, self.b, self.c, (0.0, 0.0), (3, 2, 1, 0)) == 1

    def test_square_diagonals_are_consistent(self):
        # четыре вершины квадрата: ровно одна из двух диагоналей легальна после возмущения
        p = [np.array(v) for v in ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))]
        first = incircle_sos(p[0], p[1], p[2], p[3], (0, 1, 2, 3))
        second = incircle_sos(p[1], p[2], p[3], p[0], (1, 2, 3, 0))
        assert first != 0 and second != 0
        assert first != second


class TestInSphere:
    pts = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 0.0, -1.0)]

    def test_orientation_precondition(self):
        assert orient3d(*self.pts) == 1

    @pytest.mark.parametrize("e, expected", [
        ((0.0, 0.0, 0.0), 1),
        ((0.0, 0.0, 2.0), -1),
        ((0.0, 0.0, 1.0), 0),
    ])
    def test_insphere(self, e, expected):
        assert insphere(*self.pts, e) == expected

    def test_cospherical_resolved(self):
        assert insphere_sos(*self.pts, (0.0, 0.0, 1.0), (0, 1, 2, 3, 4)) in (-1, 1)
