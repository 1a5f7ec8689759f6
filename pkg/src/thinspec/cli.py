"""Command-line front end.

    thinspec static|kz|exact|ed [--config F] [--out D] [--tol X] [parameter flags]
    thinspec figure {1,2,3,4} [--config F] [--out D]
    thinspec sweep --config F [--out D] [--workers N]
    thinspec check NAME [--tol X] [--out D]

Exit codes: 0 success, 1 a cross-check ran but FAILED, 2 invalid
configuration, 3 numerical failure (diagnostics JSON on stderr and in the
output directory).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checks import CHECKS
from .scenario import (ConfigError, NumericalError, Scenario, SweepSpec, dump_json, load_json,
                       run_scenario, run_sweep)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

# --tol lands on the tolerance the run kind actually consumes
_TOL_KEY = {"exact": "exact_rtol", "ed": "ed_tol", "figure2": "exact_rtol", "figure3": "exact_rtol",
            "figure4": "exact_rtol", "kz": "kz_weight"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _common(p):
    p.add_argument("--config", help="scenario JSON file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, help="worker processes (fallback: THINSPEC_WORKERS)")
    p.add_argument("--tol", type=float, help="main numerical tolerance of the run")


def _param_flags(p):
    g = p.add_argument_group("model parameters (override the config)")
    g.add_argument("--J", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--H0", type=float)
    g.add_argument("--t0-over-that", dest="t0_over_that", type=float)
    g.add_argument("--N", type=int)
    g.add_argument("--hbar", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thinspec", description="Dynamical symmetry breaking in the Lieb-Mattis model.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for kind in ("static", "kz", "exact", "ed"):
        p = sub.add_parser(kind, help=f"run a {kind} scenario")
        _common(p)
        _param_flags(p)
    p = sub.add_parser("figure", help="reproduce a figure dataset")
    p.add_argument("number", type=int, choices=[1, 2, 3, 4])
    _common(p)
    _param_flags(p)
    p = sub.add_parser("sweep", help="run a parameter sweep")
    _common(p)
    p = sub.add_parser("check", help="run an oracle cross-check")
    p.add_argument("name", help=f"one of {sorted(CHECKS)}")
    _common(p)
    return parser


def _scenario_dict(args, kind: str) -> dict:
    d = load_json(args.config) if args.config else {}
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    if d.get("kind", kind) != kind:
        raise ConfigError(f"config kind {d['kind']!r} does not match command {kind!r}")
    d["kind"] = kind
    params = dict(d.get("params", {}))
    for key in ("J", "delta", "H0", "N", "hbar", "t0_over_that"):
        value = getattr(args, key, None)
        if value is not None:
            if key == "H0":
                params.pop("t0_over_that", None)
            if key == "t0_over_that":
                params.pop("H0", None)
            params[key] = value
    d["params"] = params
    if args.tol is not None and kind in _TOL_KEY:
        d.setdefault("tolerances", {})[_TOL_KEY[kind]] = args.tol
    return d


def _numerical_failure(exc: NumericalError, out) -> int:
    diag = {"error": str(exc), "diagnostics": exc.diagnostics}
    text = dump_json(diag)
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / "diagnostics.json").write_text(text, encoding="utf-8")
    sys.stderr.write(text)
    return EXIT_NUMERICAL


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        if args.command == "sweep":
            if not args.config:
                raise ConfigError("sweep needs --config")
            spec = SweepSpec.from_dict(load_json(args.config))
            out = args.out or "thinspec-out/sweep"
            rec = run_sweep(spec, out, workers=args.workers)
            print(f"sweep: {rec['n_points']} points, {len(rec['failed'])} failed -> {out}")
            return EXIT_OK
        if args.command == "check":
            if args.name not in CHECKS:
                raise ConfigError(f"unknown check {args.name!r}; choose from {sorted(CHECKS)}")
            d = load_json(args.config) if args.config else {"kind": "oracle-check"}
            d["kind"] = "oracle-check"
            opts = dict(d.get("options", {}))
            opts["check"] = args.name
            if args.tol is not None:
                opts["tol"] = args.tol
            d["options"] = opts
            sc = Scenario.from_dict(d)
            out = args.out or f"thinspec-out/check-{args.name}"
            rec = run_scenario(sc, out)
            s = rec["summary"]
            print(f"{s['name']}: metric={s['metric']:.3e} tolerance={s['tolerance']:.1e} {s['status']}")
            return EXIT_OK if s["status"] == "PASS" else EXIT_CHECK_FAILED
        kind = f"figure{args.number}" if args.command == "figure" else args.command
        sc = Scenario.from_dict(_scenario_dict(args, kind))
        out = args.out or sc.out or f"thinspec-out/{kind}"
        run_scenario(sc, out)
        print(f"{kind}: wrote {out}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"thinspec: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        return _numerical_failure(exc, args.out)


if __name__ == "__main__":
    sys.exit(main())
