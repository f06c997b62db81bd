"""Command-line front end: ``b3gc verify | surgery | sweep``.

Exit status: 0 when every check passes, 1 on a check failure, 2 on a usage
or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

import numpy as np

from b3gc import catalog as cg
from b3gc import structure as st
from b3gc import surgery as sg
from b3gc.config import (FORMATS, TOL_KEYS, ConfigError, RunConfig, SurgerySpec, build_config,
                         load_config, parse_surgery)
from b3gc.structure import CheckReport

log = logging.getLogger("b3gc")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SURGERY_SPACING = 5.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value config file with optional [surgery] blocks")
    common.add_argument("--grid", type=int, help="grid points per axis for checks (default 32)")
    common.add_argument("--period-grid", type=int, dest="period_grid",
                        help="grid for boundary-torus period integrals (default 64)")
    common.add_argument("--step", type=float, help="absolute finite-difference step (default: relative 1e-4)")
    for key in TOL_KEYS:
        common.add_argument(f"--tol-{key.replace('_', '-')}", type=float, dest=f"tol.{key}",
                            metavar="TOL", help=f"tolerance '{key}'")
    common.add_argument("--format", choices=FORMATS, help="report format (default text)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, help="seed recorded for reproducible runs")
    common.add_argument("--locus", action="store_true", help="include located zero sets in JSON output")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="b3gc", description="Numerical checks for B3-generalized complex structures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    v = sub.add_parser("verify", parents=[common], help="run the check suite on catalog cases")
    v.add_argument("--case", action="append", help=f"catalog case (repeatable); one of {', '.join(cg.NAMES)}")
    s = sub.add_parser("surgery", parents=[common], help="run one or more (p, q) surgeries")
    s.add_argument("--surgery", action="append", type=str, metavar="p,q[,c,a,b]",
                   help="surgery parameters (repeatable)")
    s.add_argument("--case", action="append", help="optional base catalog case")
    w = sub.add_parser("sweep", parents=[common], help="glue residuals and periods over a (p, q, c) lattice")
    w.add_argument("--p", dest="sweep_p", help="comma-separated p values")
    w.add_argument("--q", dest="sweep_q", help="comma-separated q values")
    w.add_argument("--c", dest="sweep_c", help="comma-separated c values")
    w.add_argument("--convergence", action="store_true", default=None,
                   help="add finite-difference convergence columns")
    w.add_argument("--case", action="append", help=argparse.SUPPRESS)
    return parser


def config_from_args(args) -> RunConfig:
    file_settings, file_surgeries = load_config(args.config) if args.config else ({}, [])
    over = {k: v for k, v in vars(args).items() if k.startswith("tol.")}
    for key in ("grid", "period_grid", "step", "format", "out", "seed", "convergence"):
        over[key] = getattr(args, key, None)
    if getattr(args, "case", None):
        over["case"] = [c for item in args.case for c in item.split(",") if c]
    for key, cast in (("sweep_p", int), ("sweep_q", int), ("sweep_c", float)):
        raw = getattr(args, key, None)
        if raw is not None:
            try:
                over[key] = tuple(cast(t) for t in raw.split(",") if t.strip())
            except ValueError as exc:
                raise ConfigError(f"bad --{key[-1]} list {raw!r}") from exc
    if getattr(args, "surgery", None):
        over["surgeries"] = [parse_surgery(t) for t in args.surgery]
    return build_config(file_settings, file_surgeries, over)


# ---------------------------------------------------------------------------
# reports


def make_report(case, cfg: RunConfig, checks, surgeries=(), h_sum=0.0, verdict="pass", timing=0.0, extra=None):
    rep = {
        "case": case,
        "grid": int(cfg.grid),
        "step": cfg.step,
        "checks": [c.to_dict() if isinstance(c, CheckReport) else c for c in checks],
        "surgeries": [s.to_dict() if hasattr(s, "to_dict") else s for s in surgeries],
        "totals": {"h_period_sum": float(h_sum), "verdict": verdict},
        "timing": float(timing),
    }
    if extra:
        rep.update(extra)
    return _jsonable(rep)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x) if np.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def emit(report, fmt="json"):
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=False)
    lines = [f"case: {report['case']}  grid: {report['grid']}  step: {report['step']}"]
    for c in report["checks"]:
        wr = c["worst_residual"]
        wr = "n/a" if wr is None else f"{wr:.3e}"
        at = "" if c["worst_point"] is None else " at (" + ", ".join(f"{v:.4g}" for v in c["worst_point"]) + ")"
        lines.append(f"  [{c['verdict'].upper():4s}] {c['name']}: worst {wr}{at}")
    for s in report["surgeries"]:
        lines.append("  surgery p={p} q={q} c={c}: H-period {h_period} F-proxy {f_period_proxy} "
                     "glue {glue_residual}".format(**s))
    t = report["totals"]
    lines.append(f"total H-period: {t['h_period_sum']!r}  verdict: {t['verdict']}")
    lines.append(f"time: {report['timing']:.2f}s")
    return "\n".join(lines)


def parse_report(text):
    return json.loads(text)


def _write(report, cfg: RunConfig):
    text = emit(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _status(checks):
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


# ---------------------------------------------------------------------------
# commands


def _surgery_data(cfg: RunConfig):
    return [spec.to_data(center=(SURGERY_SPACING * j, 0.0)) for j, spec in enumerate(cfg.surgeries)]


def cmd_verify(cfg: RunConfig, locus=False):
    if not cfg.cases:
        raise ConfigError("verify needs at least one --case")
    for name in cfg.cases:
        if name not in cg.CATALOG:
            raise ConfigError(f"unknown case {name!r}; known: {', '.join(cg.NAMES)}")
    t0 = time.perf_counter()
    checks, extra = [], {}
    for name in cfg.cases:
        structure = cg.make(name, resolution=cfg.grid)
        exp = cg.expected(name)
        reps = st.verify_structure(structure, cfg.grid, cfg.tol, cfg.step, witnesses=exp.witnesses)
        prof, loc = cg.profile_checks(structure, exp, cfg.grid, cfg.tol, cfg.step)
        for r in reps + prof:
            r.name = f"{name}/{r.name}"
            checks.append(r)
        if locus:
            extra.setdefault("locus", {})[name] = [
                {"chart": int(ci), "points": pts} for ci, pts in loc.curves]
    status = _status(checks)
    report = make_report(",".join(cfg.cases), cfg, checks, verdict="pass" if status == EXIT_OK else "fail",
                         timing=time.perf_counter() - t0, extra=extra)
    return status, report


def cmd_surgery(cfg: RunConfig, locus=False):
    if not cfg.surgeries:
        raise ConfigError("surgery needs at least one --surgery p,q")
    data = _surgery_data(cfg)
    try:
        sg.check_disjoint(data)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    base = None
    if cfg.cases:
        if len(cfg.cases) > 1 or cfg.cases[0] not in cg.CATALOG:
            raise ConfigError(f"surgery takes one known base case, got {cfg.cases}")
        base = cg.make(cfg.cases[0], resolution=cfg.grid)
    t0 = time.perf_counter()
    try:
        res = sg.multi_surgery(base, data, cfg.grid, cfg.tol, cfg.step, period_resolution=cfg.period_grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    checks = list(res.reports)
    checks.append(st.report("locus-count", np.array([float(res.locus_count)]), None, np.inf,
                            detail=f"{res.locus_count} type-change curves"))
    for per in res.periods:
        checks.append(st.report(f"f-period-proxy(p={per.p},q={per.q})", np.array([per.f_period_proxy]),
                                None, cfg.tol.f_period))
        checks.append(st.report(f"glue(p={per.p},q={per.q},c={per.c:g})", np.array([per.glue_residual]),
                                None, cfg.tol.glue))
    extra = {"locus_count": int(res.locus_count)}
    if locus:
        extra["locus"] = [{"surgery": j, "points": pts} for j, g in enumerate(res.glued)
                          for _, pts in st.check_stable_and_locus(g.structure, cfg.grid, cfg.tol,
                                                                  cfg.step, False).curves]
    report = make_report(cfg.cases[0] if cfg.cases else "surgery", cfg, checks, res.periods,
                         res.h_period_sum, res.verdict, time.perf_counter() - t0, extra)
    return _status(checks), report


def _convergence(data, h):
    """Glue residual through the finite-difference jacobian at steps ``h`` and ``h/2``."""
    r1 = sg.verify_glue(data, use_analytic=False, step=h).worst_residual
    r2 = sg.verify_glue(data, use_analytic=False, step=h / 2).worst_residual
    return r1, r2, r1 / r2 if r2 > 0 else float("inf")


def cmd_sweep(cfg: RunConfig, locus=False):
    t0 = time.perf_counter()
    checks, rows = [], []
    for p in cfg.sweep_p:
        for q in cfg.sweep_q:
            for c in cfg.sweep_c:
                name = f"glue(p={p},q={q},c={c:g})"
                try:
                    data = SurgerySpec(p=p, q=q, c=c).to_data()
                except ConfigError as exc:
                    checks.append({"name": name, "verdict": "rejected", "worst_residual": None,
                                   "worst_point": None, "detail": str(exc)})
                    continue
                rep = sg.verify_glue(data, resolution=cfg.grid, tol=cfg.tol.glue, step=cfg.step)
                checks.append(rep)
                try:
                    g = sg.split_twist(data, cfg.grid, cfg.tol, cfg.step, run_checks=False)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc
                per = sg.boundary_periods(g, resolution=cfg.period_grid)
                per.glue_residual = rep.worst_residual
                row = per.to_dict()
                if cfg.convergence:
                    r1, r2, ratio = _convergence(data, 1e-3)
                    row.update({"fd_residual_h": r1, "fd_residual_h2": r2, "fd_ratio": ratio})
                rows.append(row)
    real = [c for c in checks if isinstance(c, CheckReport)]
    status = _status(real)
    report = make_report("sweep", cfg, checks, rows, sum(r["h_period"] for r in rows),
                         "pass" if status == EXIT_OK else "fail", time.perf_counter() - t0)
    return status, report


COMMANDS = {"verify": cmd_verify, "surgery": cmd_surgery, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"b3gc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        status, report = COMMANDS[args.command](cfg, locus=args.locus)
    except ConfigError as exc:
        print(f"b3gc: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(report, cfg)
    if status != EXIT_OK:
        worst = [c for c in report["checks"] if c["verdict"] == "fail"]
        for c in worst[:5]:
            print(f"b3gc: check failed: {c['name']} (worst residual {c['worst_residual']})", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
