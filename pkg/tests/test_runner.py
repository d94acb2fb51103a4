"""Тесты запуска серии реплик."""

import pytest

from config_file import parse_config
from errors import ConfigError
from experiments.runner import ExperimentConfig, replicate_seed, run_experiment, run_replicate, zone_patch

BASE = {"kind": "ball", "center": [0.0, 0.0], "radius": 0.25}


def test_replicate_seed_path():
    assert str(replicate_seed("0xabc", 1000.0, 7)) == "0xabc/lam1000/rep7"
    assert replicate_seed("0xabc", 1000.0, 7) != replicate_seed("0xabc", 1000.0, 8)


def test_zone_patch_meets_spacing_bound():
    cfg = ExperimentConfig(shape=BASE, lambda_grid=[400.0], zone={"subset": None, "tolerance": 1e-4, "epsilon": 0.1})
    shape = cfg.build_shape()
    patch, intensity = zone_patch(cfg, shape, cfg.build_kappa(shape), 400.0)
    assert intensity == 400.0
    assert patch.spacing <= 0.5 * 0.1 * 400.0 ** -0.5


def test_iterated_rows():
    cfg = ExperimentConfig(shape=BASE, lambda_grid=[200.0], iterations=3, statistics=("volume", "surface", "zone"),
                           margin_multiple=2.0)
    rows = run_replicate((cfg, 200.0, 0))
    assert [r.iteration for r in rows] == [1, 2, 3]
    assert all(r.replicate == 0 and r.lam == 200.0 for r in rows)


def test_rows_sorted_and_counted():
    cfg = ExperimentConfig(shape=BASE, lambda_grid=[100.0, 150.0], replicates=2, statistics=("volume",),
                           margin_multiple=2.0)
    result = run_experiment(cfg, threads=1)
    assert [(r.lam, r.replicate) for r in result.rows] == [(100.0, 0), (100.0, 1), (150.0, 0), (150.0, 1)]
    assert result.columns[0] == "lam"
    assert not result.tainted


def test_invalid_config():
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(shape=BASE, lambda_grid=[100.0], statistics=("volume", "curvature")))
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(shape=BASE, lambda_grid=[100.0], d=4))


def test_indicator_intensity_config():
    cfg = parse_config("experiment.lambda_grid=100\nexperiment.margin_multiple=0\nshape.kind=ball\n"
                       "shape.center=0,0\nshape.radius=0.25\nkappa.kind=indicator\nkappa.value=1\n")
    kappa = cfg.build_kappa()
    assert kappa.evaluate([[0.0, 0.0], [0.4, 0.4]]).tolist() == [1.0, 0.0]
