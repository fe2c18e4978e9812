"""Command-line front end: simulate / sweep / fit / bench.

Exit codes: 0 success, 2 config or usage error, 3 numerical-quality
failure (the failing flag is recorded in the metadata JSON).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    pass


def _apply_threads(n_threads: int | None) -> None:
    # must run before numpy initializes its BLAS thread pools, hence the
    # lazy imports throughout this module
    if n_threads is None:
        return
    if n_threads < 1:
        raise ConfigError("--threads must be >= 1")
    for var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ[var] = str(n_threads)


def _load_config(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        ) from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: top-level config must be a JSON object")
    return obj


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_overrides(config: dict, overrides: list[str]) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        parts = key.split(".")
        node = config
        for p in parts[:-1]:
            if not isinstance(node, dict) or p not in node:
                raise ConfigError(f"override {key!r} references unknown section {p!r}")
            node = node[p]
        if not isinstance(node, dict):
            raise ConfigError(f"override {key!r} does not land in an object")
        node[parts[-1]] = _parse_value(value)
    return config


def _run_config(d: dict, seed: int | None):
    from .experiments import RunConfig

    if seed is not None:
        d = dict(d, seed=seed)
    try:
        return RunConfig.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _say(quiet: bool, msg: str) -> None:
    if not quiet:
        print(msg, file=sys.stderr)


def cmd_simulate(args) -> int:
    from . import experiments as ex

    cfg = _run_config(_load_config_with_overrides(args), args.seed)
    out = args.out
    os.makedirs(out, exist_ok=True)
    _say(args.quiet, f"simulate: method={cfg.method} N={cfg.n_atoms} Jr={cfg.jr}")
    try:
        result = ex.run_single(cfg)
    except Exception as exc:
        meta = ex.run_metadata(cfg, {"status": "failed", "flag": type(exc).__name__, "error": str(exc)})
        ex.write_json(os.path.join(out, "metadata.json"), meta)
        _say(args.quiet, f"numerical failure: {exc}")
        return EXIT_NUMERICAL
    ex.atomic_write_text(
        os.path.join(out, "timeseries.csv"), ex.timeseries_to_csv(result)
    )
    flags = result.record.flags
    degraded = "casimir_degraded" in flags
    meta = ex.run_metadata(
        cfg,
        {
            "status": "degraded" if degraded else "ok",
            "flags": flags,
            "record": {k: getattr(result.record, k) for k in ex.RECORD_FIELDS},
            "casimir_drift": result.casimir_drift,
            "energy_drift": result.energy_drift,
        },
    )
    ex.write_json(os.path.join(out, "metadata.json"), meta)
    _say(args.quiet, f"wrote {out}/timeseries.csv ({len(result.times)} rows)")
    return EXIT_NUMERICAL if degraded else EXIT_OK


def _sweep_configs(config: dict, seed: int | None):
    from .experiments import RunConfig

    if "base" not in config or "sizes" not in config:
        raise ConfigError("sweep config needs 'base' (run config) and 'sizes'")
    base = dict(config["base"])
    if seed is not None:
        base["seed"] = seed
    configs = []
    for size in config["sizes"]:
        extents = [size] if isinstance(size, int) else list(size)
        try:
            configs.append(RunConfig.from_dict(dict(base, extents=tuple(extents))))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
    return configs


def cmd_sweep(args) -> int:
    from . import experiments as ex

    config = _load_config_with_overrides(args)
    configs = _sweep_configs(config, args.seed)
    window = config.get("fit_window")
    omega_scan = bool(config.get("omega_scan", False))
    omegas_by_n = None
    if isinstance(config.get("omega_scan"), dict):
        omega_scan = True
        omegas_by_n = {int(k): list(v) for k, v in config["omega_scan"].items()}
    use_xi2a = config.get("use_xi2a")
    out = args.out
    os.makedirs(out, exist_ok=True)
    _say(args.quiet, f"sweep: {len(configs)} sizes, omega_scan={omega_scan}")
    try:
        scaling = ex.run_scaling(
            configs,
            fit_window=tuple(window) if window else None,
            omega_scan=omega_scan,
            omegas_by_n=omegas_by_n,
            use_xi2a=use_xi2a,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    except Exception as exc:
        meta = ex.run_metadata(configs[0], {"status": "failed", "flag": type(exc).__name__, "error": str(exc)})
        ex.write_json(os.path.join(out, "metadata.json"), meta)
        return EXIT_NUMERICAL
    ex.write_records_csv(os.path.join(out, "records.csv"), scaling.records)
    fit = {
        "xi2": scaling.xi_fit.to_dict(),
        "fq": scaling.fq_fit.to_dict(),
        "sizes": [r.n_atoms for r in scaling.records],
    }
    ex.write_json(os.path.join(out, "fit.json"), fit)
    meta = ex.run_metadata(
        configs[0],
        {
            "status": "ok",
            "sweep": {"sizes": config["sizes"], "omega_scan": omega_scan, "fit_window": window},
        },
    )
    ex.write_json(os.path.join(out, "metadata.json"), meta)
    _say(
        args.quiet,
        f"xi2 exponent {scaling.xi_fit.exponent:+.3f} ± {scaling.xi_fit.exponent_stderr:.3f}; "
        f"fq exponent {scaling.fq_fit.exponent:+.3f} ± {scaling.fq_fit.exponent_stderr:.3f}",
    )
    return EXIT_OK


def cmd_fit(args) -> int:
    from . import experiments as ex

    config = _load_config_with_overrides(args)
    path = config.get("input")
    if not path:
        raise ConfigError("fit config needs 'input' (records CSV path)")
    if not os.path.exists(path):
        raise ConfigError(f"records CSV not found: {path}")
    records = ex.read_records_csv(path)
    window = tuple(config["window"]) if config.get("window") else None
    use_xi2a = bool(config.get("use_xi2a", False))
    xi_pts = [
        (r.n_atoms, r.xi2a_min if (use_xi2a and r.xi2a_min is not None) else r.xi2_min)
        for r in records
    ]
    fq_pts = [(r.n_atoms, r.fq_max) for r in records]
    try:
        result = {
            "xi2": ex.power_law_fit(xi_pts, window).to_dict(),
            "fq": ex.power_law_fit(fq_pts, window).to_dict(),
            "input": path,
        }
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    os.makedirs(args.out, exist_ok=True)
    ex.write_json(os.path.join(args.out, "fit.json"), result)
    _say(args.quiet, f"xi2 exponent {result['xi2']['exponent']:+.3f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    from . import experiments as ex

    config = _load_config_with_overrides(args)
    if "test" not in config or "ref" not in config:
        raise ConfigError("bench config needs 'test' and 'ref' run configs")
    cfg_test = _run_config(config["test"], args.seed)
    cfg_ref = _run_config(config["ref"], args.seed)
    out = args.out
    os.makedirs(out, exist_ok=True)
    _say(args.quiet, f"bench: {cfg_test.method} vs {cfg_ref.method}, N={cfg_ref.n_atoms}")
    try:
        report, res_t, res_r = ex.benchmark_compare(cfg_test, cfg_ref)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    except Exception as exc:
        meta = ex.run_metadata(cfg_test, {"status": "failed", "flag": type(exc).__name__, "error": str(exc)})
        ex.write_json(os.path.join(out, "metadata.json"), meta)
        return EXIT_NUMERICAL
    ex.write_json(os.path.join(out, "benchmark.json"), report.to_dict())
    ex.atomic_write_text(os.path.join(out, "timeseries_test.csv"), ex.timeseries_to_csv(res_t))
    ex.atomic_write_text(os.path.join(out, "timeseries_ref.csv"), ex.timeseries_to_csv(res_r))
    meta = ex.run_metadata(
        cfg_test, {"status": "ok", "ref_config": cfg_ref.to_dict()}
    )
    ex.write_json(os.path.join(out, "metadata.json"), meta)
    _say(args.quiet, f"max relative xi2 deviation {report.max_rel_dev_xi2:.3g}")
    return EXIT_OK


def _load_config_with_overrides(args) -> dict:
    return _apply_overrides(_load_config(args.config), args.set or [])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nemsqueeze",
        description="Spin-nematic squeezing simulations for dipolar three-level arrays",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, fn, doc in (
        ("simulate", cmd_simulate, "single quench -> time-series CSV"),
        ("sweep", cmd_sweep, "system-size sweep -> records CSV + fit JSON"),
        ("fit", cmd_fit, "power-law fit of an existing records CSV"),
        ("bench", cmd_bench, "method comparison -> deviation report JSON"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override a config entry (dotted path, JSON value); repeatable",
        )
        p.add_argument("--seed", type=int, default=None, help="override the RNG seed")
        p.add_argument("--threads", type=int, default=None, help="cap worker threads")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        p.set_defaults(func=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        _apply_threads(args.threads)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
