"""Command-line runner for experiments, presets and sweeps.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (some
output carries a structured error record).
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .errors import ConfigError, NumericalError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

EPILOG = """\
exit codes:
  0  success
  2  configuration error (bad file, unknown preset, invalid parameter)
  3  numerical failure (at least one output has a structured error record)

environment:
  NHDYN_WORKERS        sweep worker threads (default 1)
  NHDYN_DISABLE_NUMBA  set to 1 to run the pure-numpy kernels
"""


def fmt(x):
    """17 significant digits; ``nan`` for missing values."""
    if x is None:
        return "nan"
    x = float(x)
    if math.isnan(x):
        return "nan"
    return "%.17g" % x


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return None if math.isnan(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _write_json(path, data):
    with open(path, "w", newline="") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_bundle_csv(bundle, out_dir, stem):
    """Write one bundle as flat CSV files; returns the paths written."""
    out = []
    for metric, traj in bundle.trajectories.items():
        p = out_dir / f"{stem}_{metric}.csv"
        _write_csv(p, ["t", "value"], ((fmt(t), fmt(v)) for t, v in zip(traj.times, traj.values)))
        out.append(p)
    if bundle.extractions:
        p = out_dir / f"{stem}_extractions.csv"
        rows = []
        for metric, r in bundle.extractions.items():
            rows.append([metric, r.kind.value, fmt(r.value), fmt(r.fit_quality),
                         fmt(r.window[0]), fmt(r.window[1]), int(r.flagged),
                         fmt(bundle.predictions.get(r.kind.value))])
        _write_csv(p, ["metric", "kind", "value", "fit_quality", "t_start", "t_end",
                       "flagged", "predicted"], rows)
        out.append(p)
    if bundle.regime is not None:
        r = bundle.regime
        p = out_dir / f"{stem}_regime.csv"
        _write_csv(p, ["kind", "period", "relax_rate", "delta_e", "delta_gamma"],
                   [[r.kind.value, fmt(r.period), fmt(r.relax_rate), fmt(r.delta_e),
                     fmt(r.delta_gamma)]])
        out.append(p)
    if bundle.spectra is not None:
        width = max(len(row.real_parts) for row in bundle.spectra)
        p = out_dir / f"{stem}_spectrum.csv"
        header = ["gamma", "gap", "delta_eta"] + [f"re_{j + 1}" for j in range(width)]
        rows = [[fmt(row.gamma), fmt(row.gap), fmt(row.delta_eta)]
                + [fmt(x) for x in row.real_parts] for row in bundle.spectra]
        _write_csv(p, header, rows)
        out.append(p)
    if bundle.freezing is not None:
        p = out_dir / f"{stem}_freezing.csv"
        _write_csv(p, ["max_population_rate"], [[fmt(bundle.freezing)]])
        out.append(p)
    if bundle.errors:
        p = out_dir / f"{stem}_errors.csv"
        _write_csv(p, ["output", "kind", "message"],
                   [[e.output, e.kind, e.message] for e in bundle.errors])
        out.append(p)
    return out


def _point_stem(name, param, value):
    return f"{name}_{param}{value:g}"


def write_sweep_csv(result, out_dir, name):
    out = []
    for v, b in zip(result.values, result.bundles):
        out += write_bundle_csv(b, out_dir, _point_stem(name, result.param, v))
    for metric, rows in result.summary.items():
        p = out_dir / f"{name}_summary_{metric}.csv"
        _write_csv(p, ["param", "measured", "predicted", "rel_err"],
                   [[fmt(x) for x in row] for row in rows])
        out.append(p)
    return out


def sweep_dict(result):
    return {
        "param": result.param,
        "values": list(result.values),
        "summary": {m: [dict(zip(("param", "measured", "predicted", "rel_err"), row))
                        for row in rows] for m, rows in result.summary.items()},
        "bundles": [b.to_dict() for b in result.bundles],
    }


def _parse_set(items):
    params = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"--set {key}: {value!r} is not a number") from exc
    return params


def _parse_values(text):
    try:
        values = [float(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"--values: {exc}") from exc
    if not values:
        raise ConfigError("--values is empty")
    return values


def apply_overrides(cfg, args):
    """Command-line flags take precedence over file fields."""
    changes = {}
    if args.t_max is not None:
        changes["t_max"] = args.t_max
    if args.dt is not None:
        changes["dt"] = args.dt
    if args.name is not None:
        changes["name"] = args.name
    if args.outputs is not None:
        changes["outputs"] = tuple(o.strip() for o in args.outputs.split(",") if o.strip())
    params = _parse_set(args.set)
    if params:
        merged = dict(cfg.parameters)
        merged.update(params)
        changes["parameters"] = merged
    if changes:
        d = cfg.to_dict()
        d.update(changes)
        d["outputs"] = list(d["outputs"])
        cfg = ex.ExperimentConfig.from_dict(d)
    if args.gamma_local is not None:
        cfg = cfg.with_value("gamma_local", args.gamma_local)
    if args.gamma_collective is not None:
        cfg = cfg.with_value("gamma_collective", args.gamma_collective)
    return cfg


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return ex.ExperimentConfig.from_json(text)


def _emit(result, cfg_name, args):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if isinstance(result, ex.SweepResult):
        if args.format == "json":
            _write_json(out_dir / f"{cfg_name}.json", sweep_dict(result))
        else:
            write_sweep_csv(result, out_dir, cfg_name)
        bundles = result.bundles
    else:
        if args.format == "json":
            _write_json(out_dir / f"{cfg_name}.json", result.to_dict())
        else:
            write_bundle_csv(result, out_dir, cfg_name)
        bundles = [result]
    failed = False
    for b in bundles:
        for w in b.warnings:
            print(f"warning: {b.config.name}: {w}", file=sys.stderr)
        for e in b.errors:
            failed = True
            print(f"error: {b.config.name}: {e.output}: [{e.kind}] {e.message}", file=sys.stderr)
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_run(args):
    cfg = apply_overrides(load_config(args.config), args)
    return _emit(ex.run_experiment(cfg), cfg.name, args)


def cmd_preset(args):
    preset = ex.get_preset(args.name)
    cfg = apply_overrides(preset.config, args)
    if args.print_config:
        print(cfg.to_json())
        return EXIT_OK
    if preset.sweep_param:
        result = ex.run_sweep(cfg, preset.sweep_param, preset.sweep_values, args.workers)
    else:
        result = ex.run_experiment(cfg)
    return _emit(result, cfg.name, args)


def cmd_sweep(args):
    cfg = apply_overrides(load_config(args.config), args)
    result = ex.run_sweep(cfg, args.param, _parse_values(args.values), args.workers)
    return _emit(result, cfg.name, args)


def cmd_list(args):
    for name, preset in ex.PRESETS.items():
        sweep = f"  [sweep {preset.sweep_param}]" if preset.sweep_param else ""
        print(f"{name:10s} {preset.description}{sweep}")
    return EXIT_OK


def _add_common(p):
    p.add_argument("--out-dir", default=".", help="output directory (default: .)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--t-max", type=float, help="override the time horizon")
    p.add_argument("--dt", type=float, help="override the sampling step")
    p.add_argument("--gamma-local", type=float, help="override every local dephasing rate")
    p.add_argument("--gamma-collective", type=float, help="override the collective rate")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a model parameter (repeatable)")
    p.add_argument("--outputs", help="comma-separated outputs to compute")
    p.add_argument("--name", help="override the run name used in file names")
    p.add_argument("--workers", type=int, default=None,
                   help="sweep worker threads (default: $NHDYN_WORKERS or 1)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nhdyn",
        description="Simulate closed and dephased non-Hermitian qubit dynamics.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a JSON experiment configuration",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a figure-reproduction preset",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("name")
    p.add_argument("--print-config", action="store_true",
                   help="print the preset's JSON configuration and exit")
    _add_common(p)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("sweep", help="sweep one parameter of a configuration",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=ex.SWEEPABLE)
    p.add_argument("--values", required=True, help="comma-separated values")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("list-presets", help="list the available presets")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: [{exc.kind}] {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
