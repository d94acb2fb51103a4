"""Тесты опорной модели полупространства."""

import math

import numpy as np
import pytest

from errors import ConfigError, UsageError
from halfspace import (
    HalfSpaceEstimate,
    estimate_constant,
    estimate_constants,
    homogeneity_order,
    predict_mean,
    replicate_scores,
    score_kinds,
)
from pointprocess import constant_intensity, derive_seed


def _clean_scores(seed, count, L=8.0, h=6.0):
    rows = []
    for r in range(count):
        scores = replicate_scores(2, L, h, derive_seed(seed, f"clean/{r}"))
        if scores is not None:
            rows.append(scores)
    return rows


class TestScoreKinds:
    def test_kinds_2d(self):
        assert score_kinds(2) == ["signed_volume", "symdiff_volume", "surface", "zone_complexity",
                                  "skeleton_0", "skeleton_1", "face_count_0", "face_count_1"]

    @pytest.mark.parametrize("kind, gamma", [
        ("signed_volume", 3.0), ("surface", 2.0), ("skeleton_1", 1.0),
        ("face_count_2", 0.0), ("zone_complexity", 0.0),
    ])
    def test_homogeneity(self, kind, gamma):
        assert homogeneity_order(kind, 3) == gamma

    def test_unknown_kind(self):
        with pytest.raises(UsageError):
            homogeneity_order("curvature", 2)


class TestReplicateScores:
    def test_periodic_boundary_is_closed_curve(self, seed):
        rows = _clean_scores(seed, 5)
        assert rows
        for s in rows:
            # ∂PV пересекает слой целиком: длина на единицу ширины не меньше 1
            assert s["surface"] >= 1.0 - 1e-9
            assert s["skeleton_1"] == pytest.approx(s["surface"], rel=1e-12)
            assert s["face_count_0"] == pytest.approx(s["face_count_1"])
            assert s["symdiff_volume"] >= abs(s["signed_volume"]) - 1e-12
            assert s["zone_complexity"] > 0

    def test_thin_slab_is_contaminated(self, seed):
        assert replicate_scores(2, 8.0, 0.3, derive_seed(seed, "thin")) is None

    def test_reproducible(self, seed):
        a = replicate_scores(2, 8.0, 6.0, derive_seed(seed, "same"))
        b = replicate_scores(2, 8.0, 6.0, derive_seed(seed, "same"))
        assert a == b


class TestEstimate:
    def test_shared_replicates(self, seed):
        out = estimate_constants(["surface", "signed_volume"], 2, L=8.0, h=6.0, replicates=6,
                                 seed_path=seed, check_convergence=False, threads=1)
        assert set(out) == {"surface", "signed_volume"}
        assert out["surface"].used == out["signed_volume"].used
        assert out["surface"].used + out["surface"].discarded == 6
        assert len(out["surface"].per_replicate) == out["surface"].used
        assert math.isnan(out["surface"].value_2h)
        assert not out["surface"].convergence_flag

    def test_convergence_run(self, seed):
        est = estimate_constant("surface", 2, L=8.0, h=5.0, replicates=4, seed_path=seed, threads=1)
        assert not math.isnan(est.value_2h)

    def test_validation(self, seed):
        with pytest.raises(ConfigError):
            estimate_constant("surface", 2, replicates=1, seed_path=seed)
        with pytest.raises(ConfigError):
            estimate_constant("surface", 4, seed_path=seed)
        with pytest.raises(UsageError):
            estimate_constant("skeleton_5", 2, replicates=4, seed_path=seed)

    def test_all_contaminated(self, seed):
        with pytest.raises(UsageError):
            estimate_constant("surface", 2, L=8.0, h=0.2, replicates=3, seed_path=seed,
                              check_convergence=False, threads=1)

    def test_json_round_trip(self, seed):
        est = estimate_constant("surface", 2, L=8.0, h=6.0, replicates=3, seed_path=seed,
                                check_convergence=False, threads=1)
        data = est.to_json()
        assert data["gamma"] == 1.0
        assert "per_replicate" not in data
        back = HalfSpaceEstimate.from_json(data)
        assert back.value == est.value
        assert back.seed_root == str(seed)

    @pytest.mark.slow
    def test_signed_volume_is_centred(self, seed):
        rows = _clean_scores(seed, 200)
        values = np.array([r["signed_volume"] for r in rows])
        assert abs(values.mean()) <= 4 * values.std(ddof=1) / math.sqrt(len(values))

    @pytest.mark.slow
    def test_intensity_rescaling(self, seed):
        base = estimate_constant("symdiff_volume", 2, L=8.0, h=6.0, replicates=150, seed_path=seed,
                                 check_convergence=False, threads=1)
        dense = estimate_constant("symdiff_volume", 2, L=4.0, h=3.0, replicates=150, tau=4.0,
                                  seed_path=derive_seed(seed, "dense"), check_convergence=False, threads=1)
        assert dense.value == pytest.approx(base.value, abs=4 * math.hypot(base.std_error, dense.std_error))


class TestPrediction:
    def _estimate(self, kind, value):
        return HalfSpaceEstimate(kind, 2, value, 0.01, 8.0, 6.0, 10, 10, 0, True)

    def test_surface_prediction(self, ball):
        est = self._estimate("surface", 1.2)
        predicted = predict_mean(est, ball, constant_intensity(1.0), 1.0, 1000.0)
        assert predicted == pytest.approx(1.2 * 2 * math.pi * 0.25)

    def test_volume_prediction_scales(self, ball):
        est = self._estimate("symdiff_volume", 0.3)
        kappa = constant_intensity(1.0)
        small = predict_mean(est, ball, kappa, 2.0, 100.0)
        large = predict_mean(est, ball, kappa, 2.0, 400.0)
        assert large / small == pytest.approx(0.5)

    def test_wrong_order(self, ball):
        with pytest.raises(UsageError):
            predict_mean(self._estimate("surface", 1.0), ball, constant_intensity(1.0), 2.0, 100.0)
