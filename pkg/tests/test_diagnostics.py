"""Тесты диагностики ЦПТ и проверки итераций."""

import math

import numpy as np
import pytest

from errors import DegenerateStatisticError, TaintedResultsError, UsageError
from experiments.diagnostics import (
    clt_diagnostic,
    clt_trend,
    geometric_factor,
    iterated_prediction_test,
    ks_distance_normal,
)
from halfspace import HalfSpaceEstimate
from pointprocess import derive_seed


def table_from(groups: dict, statistic="surface", iteration=1, touched=0):
    rows = []
    for lam, values in groups.items():
        for r, v in enumerate(values):
            rows.append({"lam": lam, "replicate": r, "iteration": iteration, statistic: float(v),
                         "face_count_0": 0, "face_count_1": 0, "boundary_touch_flag": r < touched})
    return rows


class TestKolmogorovSmirnov:
    def test_normal_sample_is_close(self, seed):
        values = seed.rng().normal(5.0, 2.0, 2000)
        assert ks_distance_normal(values) < 0.04

    def test_skewed_sample_is_far(self, seed):
        values = seed.rng().exponential(1.0, 2000)
        assert ks_distance_normal(values) > 0.08

    def test_constant_statistic(self):
        with pytest.raises(DegenerateStatisticError):
            ks_distance_normal([3.0] * 50)


class TestCLT:
    def test_report(self, seed):
        table = table_from({1000.0: seed.rng().normal(0.0, 1.0, 400)})
        report = clt_diagnostic(table, 1000.0, min_replicates=100)
        assert report.passed
        assert report.replicates == 400
        assert report.pass_threshold > report.ks_distance
        expected = math.log(1000.0) ** 7 * 1000.0 ** (-0.25)
        assert report.rate_reference == pytest.approx(expected)

    def test_needs_replicates(self, seed):
        table = table_from({1000.0: seed.rng().normal(0.0, 1.0, 50)})
        with pytest.raises(UsageError):
            clt_diagnostic(table, 1000.0, min_replicates=100)
        with pytest.raises(UsageError):
            clt_diagnostic(table, 2000.0, min_replicates=10)

    def test_trend_improves_towards_normal(self, seed):
        rng = seed.rng()
        # сумма k экспонент: асимметрия убывает как k^{-1/2}
        groups = {float(k): rng.exponential(1.0, (4000, k)).sum(axis=1) for k in (1, 4, 256)}
        trend = clt_trend(table_from(groups), min_replicates=100)
        assert trend.total_pairs == 2
        assert trend.endpoint_decrease
        assert trend.majority_improving


class TestIterated:
    def _table(self, seed, c2, touched=0):
        rng = derive_seed(seed, "iter").rng()
        rows = []
        for n in (1, 2, 3):
            values = 0.05 * geometric_factor(c2, n) * (1 + 0.05 * rng.standard_normal(300))
            rows += table_from({1000.0: values}, "symdiff_volume", iteration=n, touched=touched)
        return rows

    def test_geometric_factor(self):
        assert geometric_factor(0.5, 1) == 1.0
        assert geometric_factor(0.5, 3) == pytest.approx(1.75)

    def test_matching_prediction(self, seed):
        estimate = HalfSpaceEstimate("surface", 2, 0.6, 0.01, 8.0, 6.0, 100, 100, 0, True)
        checks = iterated_prediction_test(self._table(seed, 0.6), estimate, min_replicates=100)
        assert [c.iteration for c in checks] == [1, 2, 3]
        assert checks[0].ratio == 1.0
        assert all(c.passed for c in checks)

    def test_wrong_constant_fails(self, seed):
        checks = iterated_prediction_test(self._table(seed, 0.6), 0.1, min_replicates=100)
        assert not checks[2].passed

    def test_tainted_runs(self, seed):
        with pytest.raises(TaintedResultsError):
            iterated_prediction_test(self._table(seed, 0.6, touched=30), 0.6, min_replicates=100)

    def test_needs_first_iteration(self, seed):
        table = [r for r in self._table(seed, 0.6) if r["iteration"] != 1]
        with pytest.raises(UsageError):
            iterated_prediction_test(table, 0.6, min_replicates=100)
