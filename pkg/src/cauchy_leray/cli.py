"""Command-line front end: ``cauchy-leray <command> [options]``.

Exit codes: 0 when every check passes, 1 on a failed check or I/O error,
2 on usage or configuration errors.  Settings resolve as flags, then the
``--config`` file, then the bundled ``defaults.json``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

from . import __version__
from . import experiments as ex
from .reports import emit_report
from .transform import QuadConfig

THREADS_ENV = "CAUCHY_LERAY_THREADS"

COMMANDS = (
    "verify-kernel",
    "verify-measures",
    "verify-convexity",
    "verify-identities",
    "reproduce-blowup",
    "reproduce-scaling-limit",
    "verify-reproducing",
)


class UsageError(ValueError):
    pass


def load_defaults() -> dict:
    text = resources.files("cauchy_leray").joinpath("defaults.json").read_text()
    return json.loads(text)


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _orders(text):
    vals = [int(v) for v in text.split(",") if v.strip()]
    if len(vals) == 1:
        vals *= 3
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("orders take one value or three comma-separated values")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file overriding the bundled defaults")
    common.add_argument("--seed", type=int)
    common.add_argument("--output", help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--threads", type=int, help=f"worker threads (env {THREADS_ENV})")
    common.add_argument("--orders", type=_orders, help="Gauss orders per chart axis, e.g. 16 or 16,16,20")
    common.add_argument("--family", choices=("quad", "power"))
    common.add_argument("--m", type=float, help="exponent of the power family, 1 < m < 2")

    parser = argparse.ArgumentParser(prog="cauchy-leray", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify-kernel", parents=[common], help="closed forms and derivative checks")
    meas = sub.add_parser("verify-measures", parents=[common], help="measure densities, box asymptotics, bounds")
    meas.add_argument("--deltas", type=_floats)
    conv = sub.add_parser("verify-convexity", parents=[common], help="convexity sweeps and the degenerate family")
    conv.add_argument("--pairs", type=int)
    ident = sub.add_parser("verify-identities", parents=[common], help="scaling and invariance identities")
    ident.add_argument("--identity", choices=ex.IDENTITIES)
    blow = sub.add_parser("reproduce-blowup", parents=[common], help="L^p blow-up sweep")
    blow.add_argument("--p", type=float)
    blow.add_argument("--a-measure", dest="a_measure", type=float)
    blow.add_argument("--deltas", type=_floats)
    blow.add_argument("--mode", choices=("model", "bounded"))
    scal = sub.add_parser("reproduce-scaling-limit", parents=[common], help="convergence of the dilated operators")
    scal.add_argument("--delta", type=float)
    scal.add_argument("--eps", type=_floats)
    scal.add_argument("--samples", type=int, help="evaluation points per slab of S'")
    sub.add_parser("verify-reproducing", parents=[common], help="reproducing property on the bounded domain")
    return parser


def resolve_config(args: argparse.Namespace, environ=os.environ) -> dict:
    cfg = load_defaults()
    if args.config:
        try:
            with open(args.config) as fh:
                override = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        unknown = set(override) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(override)
    if environ.get(THREADS_ENV):
        try:
            cfg["threads"] = int(environ[THREADS_ENV])
        except ValueError as exc:
            raise UsageError(f"{THREADS_ENV} must be an integer") from exc
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    cfg["command"] = args.command
    if cfg["eps"] is None:
        cfg["eps"] = cfg["eps_quad"] if cfg["family"] == "quad" else cfg["eps_power"]
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    """Reject invalid combinations before any computation."""
    if cfg["threads"] < 1:
        raise UsageError("threads must be positive")
    if not 1 < cfg["m"] < 2:
        raise UsageError(f"m must lie in (1, 2), got {cfg['m']}")
    if any(not 1 <= o <= 64 for o in cfg["orders"]):
        raise UsageError("quadrature orders must lie in [1, 64]")
    cmd = cfg["command"]
    if cmd == "reproduce-blowup":
        if not (cfg["p"] >= 1 and cfg["p"] < float("inf")):
            raise UsageError(f"p must lie in [1, inf), got {cfg['p']}")
        if cfg["a_measure"] < 0:
            raise UsageError("a_measure must be non-negative")
        if cfg["family"] == "power" and cfg["a_measure"] >= 1 / (2 - cfg["m"]):
            raise UsageError("a_measure must be below 1/(2-m) for the power family")
        _decreasing(cfg["deltas"], "deltas", 3)
        if any(not 0 < d <= 0.5 for d in cfg["deltas"]):
            raise UsageError("deltas must lie in (0, 0.5]")
    if cmd == "verify-measures":
        _decreasing(cfg["deltas"], "deltas", 3)
    if cmd == "reproduce-scaling-limit":
        _decreasing(cfg["eps"], "eps", 2)
        if any(e <= 0 for e in cfg["eps"]):
            raise UsageError("eps values must be positive")
        if not 0 < cfg["delta"] <= 0.5:
            raise UsageError("delta must lie in (0, 0.5]")
    if cfg["samples"] < 1 or cfg["pairs"] < 1:
        raise UsageError("sample counts must be positive")


def _decreasing(values, name, minimum):
    if len(values) < minimum:
        raise UsageError(f"{name} needs at least {minimum} entries")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise UsageError(f"{name} must be strictly decreasing")


def _quad(cfg) -> QuadConfig:
    return QuadConfig(orders=tuple(cfg["orders"]), levels=cfg["levels"], graded_order=cfg["graded_order"],
                      outer_orders=tuple(cfg["outer_orders"]), threads=cfg["threads"])


def _power_m(cfg):
    return cfg["m"] if cfg["family"] == "power" else None


def run_command(cfg: dict) -> list:
    cmd, quad, seed, m = cfg["command"], _quad(cfg), cfg["seed"], cfg["m"]
    if cmd == "verify-kernel":
        return [ex.kernel_report(seed=seed, m=m)]
    if cmd == "verify-measures":
        return [
            ex.measures_report(cfg["deltas"], m=m, seed=seed, n_points=cfg["points"], quad=quad),
            ex.bound_check("quad", cfg["deltas"], a=cfg["a_bound_quad"], n=cfg["bound_samples"], seed=seed),
            ex.bound_check("power", cfg["deltas"], a=cfg["a_bound_power"], m=m, n=cfg["bound_samples"], seed=seed),
        ]
    if cmd == "verify-convexity":
        return [
            ex.convexity_report("quad", cfg["pairs"], seed=seed),
            ex.convexity_report("power", cfg["pairs"], seed=seed, m=m),
            ex.clinear_failure_demo(cfg["t_values"]),
        ]
    if cmd == "verify-identities":
        selected = [cfg["identity"]] if cfg["identity"] else list(ex.IDENTITIES)
        return [ex.identity_suite(s, seed=seed, m=m, quad=quad) for s in selected]
    if cmd == "reproduce-blowup":
        return [ex.blowup_sweep(cfg["family"], cfg["p"], cfg["a_measure"], cfg["deltas"], mode=cfg["mode"],
                                m=_power_m(cfg), a_box=cfg["a_box"], quad=quad)]
    if cmd == "reproduce-scaling-limit":
        return [ex.scaling_limit(cfg["family"], cfg["delta"], cfg["eps"], m=_power_m(cfg),
                                 n_samples=cfg["samples"], seed=seed, a_box=cfg["a_box"], quad=quad)]
    if cmd == "verify-reproducing":
        return [ex.reproducing_check(margin=cfg["margin"], nodes=tuple(cfg["nodes"]), tol=cfg["reproducing_tol"],
                                     budget=cfg["budget"], threads=cfg["threads"])]
    raise UsageError(f"unknown command {cmd!r}")


def _public_config(cfg: dict) -> dict:
    # thread count affects wall time only; keep it out of the report so outputs match
    return {k: v for k, v in cfg.items() if k != "threads"}


def build_document(cfg: dict, reports: list) -> dict:
    if len(reports) == 1:
        return reports[0].to_dict() | {"config": _public_config(cfg)}
    return {
        "command": cfg["command"],
        "pass": all(r.passed for r in reports),
        "config": _public_config(cfg),
        "reports": [r.to_dict() for r in reports],
    }


def run(argv=None, environ=os.environ) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args, environ)
        reports = run_command(cfg)
    except (UsageError, ex.ExperimentError) as exc:
        print(f"cauchy-leray: error: {exc}", file=sys.stderr)
        return 2
    doc = build_document(cfg, reports)
    try:
        emit_report(doc, cfg["format"], args.output)
    except OSError as exc:
        print(f"cauchy-leray: cannot write report: {exc}", file=sys.stderr)
        return 1
    failed = [c["name"] for r in reports for c in r.checks if not c["pass"]]
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.experiment}", file=sys.stderr)
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
