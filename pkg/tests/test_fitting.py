"""Тесты подгонки степенных законов, инвариантности и уровня."""

import math

import numpy as np
import pytest

from errors import ConfigError, FitError, TaintedResultsError, UsageError
from experiments.fitting import (
    fit_scaling,
    group_by_lambda,
    invariance_test,
    level_test,
    prediction_test,
    taint_fraction,
    variance_positivity_expected,
)
from halfspace import HalfSpaceEstimate
from pointprocess import constant_intensity, derive_seed, linear_intensity
from shapes import polytopal_union_from_cells

LAMBDAS = [250.0, 500.0, 1000.0, 2000.0, 4000.0]


def make_table(seed, mean_fn, sd_fn, replicates=120, statistic="symdiff_volume", touched=0, iteration=1):
    rng = seed.rng()
    rows = []
    for lam in LAMBDAS:
        values = mean_fn(lam) + sd_fn(lam) * rng.standard_normal(replicates)
        for r, v in enumerate(values):
            rows.append({"lam": lam, "replicate": r, "iteration": iteration, statistic: float(v),
                         "boundary_touch_flag": r < touched})
    return rows


def power(c, exponent):
    return lambda lam: c * lam ** exponent


def zero(lam):
    return 0.0


class TestGrouping:
    def test_groups_sorted_by_lambda(self, seed):
        table = make_table(seed, power(1.0, -0.5), zero, replicates=3)
        groups = group_by_lambda(list(reversed(table)), "symdiff_volume")
        assert list(groups) == LAMBDAS
        assert all(len(v) == 3 for v in groups.values())

    def test_iteration_filter(self, seed):
        table = make_table(seed, power(1.0, -0.5), zero, replicates=2)
        table += make_table(seed, power(2.0, -0.5), zero, replicates=2, iteration=2)
        groups = group_by_lambda(table, "symdiff_volume", iteration=2)
        assert groups[250.0] == pytest.approx([2.0 * 250.0 ** -0.5] * 2)

    def test_missing_statistic(self, seed):
        with pytest.raises(UsageError):
            group_by_lambda(make_table(seed, power(1.0, -0.5), zero, replicates=2), "surface")

    def test_taint_fraction(self, seed):
        table = make_table(seed, power(1.0, -0.5), zero, replicates=10, touched=1)
        assert taint_fraction(table) == pytest.approx(0.1)


class TestFitScaling:
    def test_exact_power_law(self, seed):
        table = make_table(seed, power(0.7, -0.5), zero)
        fit = fit_scaling(table, "symdiff_volume", resamples=50, seed_path=seed)
        assert fit.slope == pytest.approx(-0.5, abs=1e-10)
        assert fit.intercept == pytest.approx(math.log(0.7), abs=1e-10)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.slope_ci[0] <= fit.slope <= fit.slope_ci[1]
        assert fit.predicted(1000.0) == pytest.approx(0.7 * 1000.0 ** -0.5)
        assert not fit.tainted

    def test_noisy_mean_recovers_exponent(self, seed):
        table = make_table(seed, power(1.3, -0.5), power(0.2, -0.5))
        fit = fit_scaling(table, "symdiff_volume", resamples=200, seed_path=seed)
        assert fit.slope == pytest.approx(-0.5, abs=0.05)
        assert fit.replicates == [120] * len(LAMBDAS)

    def test_variance_exponent(self, seed):
        table = make_table(seed, power(1.0, -0.5), power(1.0, -0.75), replicates=400)
        fit = fit_scaling(table, "symdiff_volume", moment="variance", resamples=100, seed_path=seed)
        assert fit.slope == pytest.approx(-1.5, abs=0.2)

    def test_centering_subtracts_limit(self, seed):
        volume = math.pi / 16
        table = make_table(seed, lambda lam: volume + 0.4 / lam, zero, statistic="volume")
        fit = fit_scaling(table, "volume", centering="subtract-known-limit", known_limit=volume,
                          resamples=20, seed_path=seed)
        assert fit.slope == pytest.approx(-1.0, abs=1e-6)

    def test_bootstrap_is_seeded(self, seed):
        table = make_table(seed, power(1.0, -0.5), power(0.1, -0.5))
        a = fit_scaling(table, "symdiff_volume", resamples=50, seed_path=derive_seed(seed, "boot"))
        b = fit_scaling(table, "symdiff_volume", resamples=50, seed_path=derive_seed(seed, "boot"))
        assert a.slope_ci == b.slope_ci

    def test_non_positive_moment(self, seed):
        table = make_table(seed, lambda lam: -0.01, zero, statistic="signed_volume_error")
        with pytest.raises(FitError):
            fit_scaling(table, "signed_volume_error", resamples=10, seed_path=seed)

    def test_needs_enough_lambdas(self, seed):
        table = [r for r in make_table(seed, power(1.0, -0.5), zero) if r["lam"] < 1000.0]
        with pytest.raises(ConfigError):
            fit_scaling(table, "symdiff_volume", resamples=10)

    def test_needs_enough_replicates(self, seed):
        table = make_table(seed, power(1.0, -0.5), zero, replicates=5)
        with pytest.raises(ConfigError):
            fit_scaling(table, "symdiff_volume", resamples=10)
        fit = fit_scaling(table, "symdiff_volume", resamples=10, min_replicates=5)
        assert fit.replicates == [5] * len(LAMBDAS)

    def test_bad_arguments(self, seed):
        table = make_table(seed, power(1.0, -0.5), zero)
        with pytest.raises(UsageError):
            fit_scaling(table, "symdiff_volume", moment="median")
        with pytest.raises(UsageError):
            fit_scaling(table, "symdiff_volume", centering="divide")

    def test_tainted_flag(self, seed):
        table = make_table(seed, power(1.0, -0.5), zero, touched=10)
        fit = fit_scaling(table, "symdiff_volume", resamples=10)
        assert fit.tainted
        assert "bootstrap_intercepts" not in fit.to_json()


class TestInvariance:
    def _fit(self, seed, c, label, touched=0):
        # общий шум: отношение префакторов точно равно отношению c
        table = make_table(derive_seed(seed, "noise"), power(c, -0.5), power(0.05 * c, -0.5), touched=touched)
        return fit_scaling(table, "symdiff_volume", resamples=200, seed_path=derive_seed(seed, label))

    def test_prefactor_ratio_matches_content_ratio(self, seed):
        ball = 2 * math.pi * 0.25
        small = 2 * math.pi * 0.125
        report = invariance_test(self._fit(seed, 0.3 * ball, "a"), ball, self._fit(seed, 0.3 * small, "b"), small)
        assert report.content_ratio == pytest.approx(2.0)
        assert report.prefactor_ratio == pytest.approx(2.0, rel=0.05)
        assert report.contains_one

    def test_mismatched_fits(self, seed):
        a = self._fit(seed, 1.0, "a")
        b = self._fit(seed, 1.0, "b")
        b.moment = "variance"
        with pytest.raises(UsageError):
            invariance_test(a, 1.0, b, 1.0)

    def test_tainted_fit_is_rejected(self, seed):
        with pytest.raises(TaintedResultsError):
            invariance_test(self._fit(seed, 1.0, "a", touched=10), 1.0, self._fit(seed, 1.0, "b"), 1.0)


class TestPredictionAndLevel:
    def test_prediction_agrees(self, seed, ball):
        c = 0.35
        perimeter = 2 * math.pi * 0.25
        table = make_table(seed, power(c * perimeter, -0.5), power(0.01, -0.5))
        estimate = HalfSpaceEstimate("symdiff_volume", 2, c, 1e-3, 8.0, 6.0, 100, 100, 0, True)
        checks = prediction_test(table, "symdiff_volume", estimate, ball, constant_intensity(1.0), 2.0)
        assert [ch.lam for ch in checks] == LAMBDAS
        assert sum(ch.passed for ch in checks) >= len(checks) - 1

    def test_prediction_detects_wrong_constant(self, seed, ball):
        table = make_table(seed, power(0.35 * 2 * math.pi * 0.25, -0.5), power(0.01, -0.5))
        estimate = HalfSpaceEstimate("symdiff_volume", 2, 0.7, 1e-3, 8.0, 6.0, 100, 100, 0, True)
        checks = prediction_test(table, "symdiff_volume", estimate, ball, constant_intensity(1.0), 2.0,
                                 lambdas=[1000.0])
        assert len(checks) == 1
        assert not checks[0].passed

    def test_level_is_stable(self, seed):
        table = make_table(seed, lambda lam: 40.0, lambda lam: 3.0, statistic="zone_complexity")
        report = level_test(table, "zone_complexity")
        assert report.stable
        assert report.grand_mean == pytest.approx(40.0, abs=1.0)

    def test_level_detects_growth(self, seed):
        table = make_table(seed, lambda lam: math.log(lam) * 10, lambda lam: 1.0, statistic="zone_complexity")
        assert not level_test(table, "zone_complexity").stable


class TestVariancePositivity:
    def test_hypotheses(self, ball, unit_kappa, two_point_diagram):
        assert variance_positivity_expected(ball, unit_kappa)
        assert not variance_positivity_expected(ball, linear_intensity(1.0, [0.5, 0.0]))
        assert not variance_positivity_expected(polytopal_union_from_cells(two_point_diagram, [0]), unit_kappa)
