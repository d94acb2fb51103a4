"""
Точка входа — CLI лаборатории пуассон-вороной аппроксимаций.

Подкоманды: simulate, fit, constants, iterate, zone, maxima, report, selftest.
Коды выхода: 0 — успех, 1 — ошибка конфигурации, 2 — ошибка выполнения,
3 — результаты испорчены касанием ∂Q.
"""

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

import config
from config_file import config_hash, emit_config, load_config
from errors import ConfigError, PVLabError, TaintedResultsError, UsageError
from experiments import (
    clt_trend,
    fit_scaling,
    iterated_prediction_test,
    level_test,
    run_experiment,
    variance_positivity_expected,
)
from halfspace import HalfSpaceEstimate, estimate_constants, score_kinds
from plots import plot_fit
from results import RunManifest, read_json, read_replicate_csv, summarize, write_json, write_manifest, write_replicate_csv
from selftest import run_selftest

logger = logging.getLogger(__name__)


def _setup_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
    )
    # Подавляем шумные логи matplotlib
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


# ======================== Общие шаги ========================

def _load(args):
    if not args.config:
        raise ConfigError("--config is required for this subcommand")
    cfg = load_config(args.config)
    if args.seed:
        cfg.seed_root = args.seed
    if args.lambda_grid:
        try:
            cfg.lambda_grid = [float(v) for v in args.lambda_grid.split(",") if v.strip()]
        except ValueError as e:
            raise ConfigError(f"Bad --lambda-grid: {e}", key="experiment.lambda_grid") from e
    if args.replicates:
        cfg.replicates = args.replicates
    if args.out:
        cfg.out_dir = args.out
    return cfg


def _known_limit(statistic: str, shape) -> float:
    if statistic == "volume":
        return shape.volume()
    if statistic == "surface":
        return shape.surface_area()
    return 0.0


def _fit_and_plot(table, cfg, digest, manifest, statistic, moment, out_dir: Path):
    shape = cfg.build_shape()
    kappa = cfg.build_kappa(shape)
    fit = fit_scaling(table, statistic, moment, cfg.centering, _known_limit(statistic, shape),
                      seed_path=cfg.seed_root, d=cfg.d, kappa_label=kappa.label)
    stem = out_dir / f"{cfg.name}.fit.{statistic}.{moment}"
    data = {"config_hash": digest, "fit": fit.to_json()}
    if moment == "variance":
        data["variance_positivity_expected"] = variance_positivity_expected(shape, kappa)
    manifest.add_output(write_json(stem.with_suffix(".json"), data))
    manifest.add_output(plot_fit(fit, table, stem.with_suffix(".svg"), digest))
    return fit


def _execute(cfg, args, extra_fits=()):
    """Запуск серии, запись CSV, сводки, подгонок, графиков и манифеста."""
    digest = config_hash(cfg)
    out_dir = Path(cfg.out_dir)
    manifest = RunManifest(config_hash=digest, seed_root=cfg.seed_root)
    (out_dir / f"{cfg.name}.env").parent.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{cfg.name}.env").write_text(f"# config_hash={digest}\n" + emit_config(cfg), encoding="utf-8")
    manifest.add_output(out_dir / f"{cfg.name}.env")

    result = run_experiment(cfg, args.threads)
    table = result.table()
    manifest.add_output(write_replicate_csv(out_dir / f"{cfg.name}.csv", table, result.columns, digest))
    summary = {"config_hash": digest, "taint_fraction": result.taint_fraction, "tainted": result.tainted,
               **summarize(table, result.columns)}
    manifest.add_output(write_json(out_dir / f"{cfg.name}.summary.json", summary))

    fits = {}
    requested = [tuple(item.rsplit(":", 1)) for item in cfg.fit] + list(extra_fits)
    for statistic, moment in requested:
        if len(cfg.lambda_grid) >= config.MIN_FIT_POINTS:
            fits[f"{statistic}:{moment}"] = _fit_and_plot(table, cfg, digest, manifest, statistic, moment, out_dir)
    manifest.experiments.append({"name": cfg.name, "tainted": result.tainted,
                                 "taint_fraction": result.taint_fraction, "rows": len(table)})
    write_manifest(out_dir / f"{cfg.name}.manifest.json", manifest)
    if result.tainted:
        raise TaintedResultsError(f"{result.taint_fraction:.2%} of replicates touch the cube boundary "
                                  f"(threshold {config.TAINT_THRESHOLD:.0%})")
    return result, fits


# ======================== Подкоманды ========================

def cmd_simulate(args) -> int:
    _execute(_load(args), args)
    return 0


def cmd_fit(args) -> int:
    digest, table = read_replicate_csv(args.csv)
    fit = fit_scaling(table, args.statistic, args.moment, args.centering, args.known_limit,
                      seed_path=args.seed or config.DEFAULT_SEED_ROOT, d=args.d)
    out_dir = Path(args.out) if args.out else Path(args.csv).parent
    stem = out_dir / f"{Path(args.csv).stem}.fit.{args.statistic}.{args.moment}"
    write_json(stem.with_suffix(".json"), {"config_hash": digest, "fit": fit.to_json()})
    plot_fit(fit, table, stem.with_suffix(".svg"), digest)
    print(json.dumps(fit.to_json(), indent=2))
    if fit.tainted:
        raise TaintedResultsError(f"Replicate table {args.csv} exceeds the taint threshold")
    return 0


def cmd_constants(args) -> int:
    kinds = [s.strip() for s in args.score.split(",")] if args.score else score_kinds(args.d)
    estimates = estimate_constants(kinds, args.d, args.L, args.h, args.replicates, args.seed, args.tau,
                                   not args.no_convergence, args.threads)
    params = f"constants d={args.d} L={args.L} h={args.h} n={args.replicates} tau={args.tau} seed={args.seed}"
    digest = hashlib.sha256(params.encode("utf-8")).hexdigest()
    data = {"config_hash": digest, "estimates": {k: e.to_json() for k, e in estimates.items()}}
    out_dir = Path(args.out or config.OUT_DIR)
    write_json(out_dir / f"constants-d{args.d}.json", data)
    print(json.dumps(data["estimates"], indent=2, sort_keys=True))
    return 0


def cmd_iterate(args) -> int:
    cfg = _load(args)
    cfg.iterations = args.iterations or max(cfg.iterations, 3)
    cfg.statistics = tuple(s for s in cfg.statistics if s not in ("zone", "maximal"))
    result, _ = _execute(cfg, args)
    if args.c2:
        constants = read_json(args.c2)
        c2 = HalfSpaceEstimate.from_json(constants["estimates"]["surface"])
        table = result.table()
        report = {}
        for lam in cfg.lambda_grid:
            subset = [r for r in table if float(r["lam"]) == float(lam)]
            checks = iterated_prediction_test(subset, c2, args.statistic)
            report[repr(float(lam))] = [vars(c) for c in checks]
        write_json(Path(cfg.out_dir) / f"{cfg.name}.iterated.json",
                   {"config_hash": config_hash(cfg), "c2": c2.value, "checks": report})
    return 0


def cmd_zone(args) -> int:
    cfg = _load(args)
    if "zone" not in cfg.statistics:
        cfg.statistics = tuple(cfg.statistics) + ("zone",)
    cfg.zone = cfg.zone or {"subset": None, "tolerance": 1e-4, "epsilon": config.ZONE_EPSILON}
    _execute(cfg, args, extra_fits=[("zone_complexity", "mean")])
    return 0


def cmd_maxima(args) -> int:
    cfg = _load(args)
    cfg.statistics = ("maximal",)
    _execute(cfg, args, extra_fits=[("maximal_points", "mean")])
    return 0


REPORT_FITS = [("symdiff_volume", "mean"), ("symdiff_volume", "variance"),
               ("face_count_0", "mean"), ("face_count_0", "variance"),
               ("skeleton_measure_0", "mean"), ("zone_complexity", "mean"), ("maximal_points", "mean")]


def cmd_report(args) -> int:
    """Сводка по всем CSV каталога: подгонки, тест уровня поверхности, тренд ЦПТ."""
    out_dir = Path(args.out or config.OUT_DIR)
    tables = sorted(out_dir.glob("*.csv"))
    if not tables:
        raise UsageError(f"No replicate tables in {out_dir}")
    report = {}
    for path in tables:
        digest, table = read_replicate_csv(path)
        entry = {"config_hash": digest, "fits": {}}
        for statistic, moment in REPORT_FITS:
            values = [r.get(statistic) for r in table]
            if any(isinstance(v, float) and v == v for v in values):
                try:
                    fit = fit_scaling(table, statistic, moment, min_replicates=args.min_replicates)
                except PVLabError as e:
                    entry["fits"][f"{statistic}:{moment}"] = {"error": str(e)}
                    continue
                entry["fits"][f"{statistic}:{moment}"] = fit.to_json()
                plot_fit(fit, table, out_dir / "report" / f"{path.stem}.{statistic}.{moment}.svg", digest)
        if "surface" in table[0]:
            entry["surface_level"] = vars(level_test(table, "surface"))
            try:
                trend = clt_trend(table, "surface", args.min_replicates)
                entry["clt"] = {"reports": [r.to_json() for r in trend.reports],
                                "endpoint_decrease": trend.endpoint_decrease,
                                "majority_improving": trend.majority_improving}
            except PVLabError as e:
                entry["clt"] = {"error": str(e)}
        report[path.name] = entry
    write_json(out_dir / "report.json", report)
    logger.info(f"Report over {len(tables)} tables written to {out_dir / 'report.json'}")
    return 0


def cmd_selftest(args) -> int:
    checks = run_selftest(args.seed or "selftest")
    for check in checks:
        print(check.line())
    return 0 if all(c.passed for c in checks) else 2


# ======================== Разбор аргументов ========================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config file (KEY=value)")
    common.add_argument("--seed", help="seed root (hex)")
    common.add_argument("--threads", type=int, default=None, help="worker count (fallback: PVLAB_THREADS)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--lambda-grid", dest="lambda_grid", help="comma-separated lambda values")
    common.add_argument("--replicates", type=int, default=None)
    common.add_argument("--log-level", default=config.LOG_LEVEL)

    parser = argparse.ArgumentParser(prog="pvlab", description="Poisson-Voronoi approximation lab")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common]).set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", parents=[common])
    p.add_argument("--csv", required=True)
    p.add_argument("--statistic", required=True)
    p.add_argument("--moment", choices=("mean", "variance"), default="mean")
    p.add_argument("--centering", choices=("none", "subtract-known-limit"), default="none")
    p.add_argument("--known-limit", dest="known_limit", type=float, default=0.0)
    p.add_argument("--d", type=int, default=2)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("constants", parents=[common])
    p.add_argument("--score", help="comma-separated score kinds (default: all)")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--no-convergence", dest="no_convergence", action="store_true")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("iterate", parents=[common])
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--c2", help="constants JSON with a surface estimate")
    p.add_argument("--statistic", default="symdiff_volume")
    p.set_defaults(func=cmd_iterate)

    sub.add_parser("zone", parents=[common]).set_defaults(func=cmd_zone)
    sub.add_parser("maxima", parents=[common]).set_defaults(func=cmd_maxima)

    p = sub.add_parser("report", parents=[common])
    p.add_argument("--min-replicates", dest="min_replicates", type=int, default=config.MIN_FIT_REPLICATES)
    p.set_defaults(func=cmd_report)

    sub.add_parser("selftest", parents=[common]).set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.log_level)
    try:
        return args.func(args)
    except PVLabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
