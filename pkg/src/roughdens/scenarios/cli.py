"""Command-line interface.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 runtime error.  ``ROUGHDENS_WORKERS`` sets the default worker count;
``--workers`` overrides it.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..drivers import SeedSpec
from ..errors import ParameterError, RoughDensError, UsageError
from ..estimators.io import estimate_to_json, fit_to_json, read_sweep_csv
from ..estimators.montecarlo import mc_weighted_difference
from ..estimators.scaling import fit_scaling
from ..estimators.testfunctions import make_probe, make_test_function
from ..models.core import (default_workers, read_ensemble_csv, simulate_ensemble,
                           simulate_with_checkpoint, write_ensemble_csv)
from ..models.library import build_model
from .config import CONFIG_KEYS, read_config_file
from .registry import default_config, list_scenarios, run_scenario
from .report import emit_report, load_report

__all__ = ["main", "build_parser"]

EXIT_PASS, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _key_values(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _number(v, k.strip())
    return out


def _number(raw: str, what: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{what}: expected a number, got {raw!r}") from None


def _workers(args) -> int:
    return args.workers if args.workers is not None else default_workers()


def cmd_simulate(args) -> int:
    model = build_model(args.model, **_key_values(args.param))
    seed = SeedSpec(args.seed, args.stream_id)
    if args.epsilon is not None:
        ens = simulate_with_checkpoint(model, args.t, args.epsilon, args.n_steps, args.n_paths, seed,
                                       window_steps=args.window_steps, workers=_workers(args))
    else:
        ens = simulate_ensemble(model, args.t, args.n_steps, args.n_paths, seed, workers=_workers(args))
    write_ensemble_csv(ens, args.out)
    print(f"wrote {ens.n_paths} paths to {args.out}")
    return EXIT_PASS


def cmd_estimate(args) -> int:
    h = [_number(v, "--h") for v in args.h.split(",")]
    tf = make_test_function(args.family, args.alpha, **_key_values(args.param))
    endpoints, _ = read_ensemble_csv(args.input)
    if len(h) != endpoints.shape[1]:
        raise UsageError(f"--h has {len(h)} components, ensemble has dimension {endpoints.shape[1]}")
    est = mc_weighted_difference(endpoints, make_probe(tf, args.m, [h]), h)
    print(estimate_to_json(est))
    return EXIT_PASS


def cmd_scaling(args) -> int:
    fit = fit_scaling(read_sweep_csv(args.input), noise_floor=args.noise_floor)
    print(fit_to_json(fit))
    return EXIT_PASS


def cmd_scenario_list(args) -> int:
    for entry in list_scenarios():
        print(f"{entry['name']:<20} {entry['description']}\n{'':<20} [{entry['anchor']}]")
    return EXIT_PASS


def cmd_scenario_run(args) -> int:
    cfg = default_config(args.name)
    if args.config:
        cfg = read_config_file(args.config, cfg)
    if args.seed is not None:
        cfg = cfg.updated(seed=SeedSpec(args.seed, cfg.seed.stream_id))
    if args.out is not None:
        cfg = cfg.updated(output_dir=args.out)
    cfg = cfg.updated(workers=args.workers if args.workers is not None
                      else (cfg.workers or default_workers()))
    report = run_scenario(cfg)
    for line in report.summary_lines():
        print(line)
    print(f"{report.name}: {'PASS' if report.passed else 'FAIL'} ({report.wall_time:.1f} s)")
    if args.report:
        emit_report(report, "csv" if args.report.endswith(".csv") else "json", args.report)
    return EXIT_PASS if report.passed else EXIT_CHECK_FAILED


def cmd_scenario_keys(args) -> int:
    for key, doc in CONFIG_KEYS.items():
        print(f"{key:<16} {doc}")
    return EXIT_PASS


def cmd_report(args) -> int:
    try:
        data = load_report(args.file)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read report {args.file}: {exc}") from None
    for c in data["checks"]:
        flag = "PASS" if c["pass"] else "FAIL"
        print(f"[{flag}] {c['check_id']}: value={c['value']} predicted={c['predicted']} "
              f"({c['kind']}, tol={c['tolerance']})")
    return EXIT_PASS if data["pass"] else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="roughdens", description="Monte Carlo density-regularity laboratory")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="simulate an ensemble and write it as CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--param", action="append", metavar="KEY=VALUE", help="model parameter")
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--n-steps", type=int, default=32)
    s.add_argument("--n-paths", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stream-id", type=int, default=0)
    s.add_argument("--epsilon", type=float, help="also record the checkpoint X_{t-epsilon}")
    s.add_argument("--window-steps", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="estimate E[Delta_h^m phi(X)] from an ensemble CSV")
    e.add_argument("input")
    e.add_argument("--family", default="cosine", choices=["cosine", "kink", "bump"])
    e.add_argument("--alpha", type=float, default=0.5)
    e.add_argument("--m", type=int, default=2)
    e.add_argument("--h", required=True, help="comma-separated step vector")
    e.add_argument("--param", action="append", metavar="KEY=VALUE", help="test-function parameter")
    e.set_defaults(func=cmd_estimate)

    f = sub.add_parser("scaling", help="log-log fit of a scale,value,stderr CSV")
    f.add_argument("input")
    f.add_argument("--noise-floor", type=float, default=3.0)
    f.set_defaults(func=cmd_scaling)

    sc = sub.add_parser("scenario", help="list or run named scenarios")
    scs = sc.add_subparsers(dest="scenario_command", required=True, parser_class=_Parser)
    sl = scs.add_parser("list")
    sl.set_defaults(func=cmd_scenario_list)
    sk = scs.add_parser("keys", help="document every config key")
    sk.set_defaults(func=cmd_scenario_keys)
    sr = scs.add_parser("run")
    sr.add_argument("name")
    sr.add_argument("--config")
    sr.add_argument("--seed", type=int)
    sr.add_argument("--out")
    sr.add_argument("--workers", type=int)
    sr.add_argument("--report", help="also write the report to this .json or .csv file")
    sr.set_defaults(func=cmd_scenario_run)

    r = sub.add_parser("report", help="summarize a report file")
    r.add_argument("file")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "workers", None) is not None and args.workers < 1:
            raise ParameterError("--workers must be >= 1")
        return args.func(args)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RoughDensError, OSError, json.JSONDecodeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime error
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
