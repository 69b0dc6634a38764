"""Command-line interface: construct, classify, verify and sweep.

Exit codes: 0 on success, 1 when a verification suite fails, 2 for input or
construction errors.  Errors are reported as a JSON object on stdout (and as
``error.json`` in the output directory when one is given).
"""
import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import report
from .charts import Grid
from .classify import Tolerances, classify
from .errors import GeometryError
from .families import build_chart
from .frames import (LocalFrame, beltrami_check, build_frames, frame_orthogonality,
                     residuals_from_frame)
from .gauss import gauss_samples
from .verify import SUITES, SuiteTolerances, run_suites

COMMANDS = ("construct", "classify", "verify", "sweep")
DEFAULT_GRID = "20x20"
DEFAULT_MARGIN = 0.01


class UsageError(GeometryError):
    condition = "UsageError"


@dataclass
class RunConfig:
    command: str
    chart: dict
    grid: Grid
    tolerances: dict = field(default_factory=dict)
    out: str = None
    suites: tuple = ("all",)
    sweep_param: str = None
    sweep_values: tuple = ()
    cache: str = None

    def classify_tolerances(self):
        keys = {k: v for k, v in self.tolerances.items() if k in Tolerances.names()}
        return Tolerances().updated(**keys)

    def suite_tolerances(self):
        keys = {k: v for k, v in self.tolerances.items() if k in SuiteTolerances.names()}
        return SuiteTolerances().updated(**keys)


# argument handling ------------------------------------------------------

def _value(text):
    if not isinstance(text, str):
        return text
    low = text.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return float(text)
    except ValueError:
        pass
    if text.strip().startswith("["):
        try:
            return json.loads(text)
        except json.JSONDecodeError:
            pass
    return text


def _range(text):
    try:
        a, b = text.split(":")
        return [float(a), float(b)]
    except ValueError:
        raise UsageError(f"ranges look like a:b, got {text!r}") from None


def _sweep_values(text):
    text = text.strip()
    if not text:
        raise UsageError("the sweep range is empty")
    if text.count(":") == 2:
        a, b, n = text.split(":")
        n = int(n)
        if n < 1:
            raise UsageError("the sweep range is empty")
        return tuple(float(x) for x in np.linspace(float(a), float(b), n))
    vals = [x for x in text.split(",") if x.strip()]
    if not vals:
        raise UsageError("the sweep range is empty")
    try:
        return tuple(float(x) for x in vals)
    except ValueError:
        raise UsageError(f"sweep values must be numbers, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(
        prog="quasiminimal",
        description="Frames, Gauss map Laplacians and pointwise 1-type "
                    "classification of quasi-minimal Lorentz surfaces in E^4_2.")
    p.add_argument("command", choices=COMMANDS)
    src = p.add_argument_group("chart source")
    src.add_argument("--builtin", help="example, theta, flat_theta or nonflat")
    src.add_argument("--chart-file", help="JSON chart specification")
    src.add_argument("--config", help="JSON run configuration")
    src.add_argument("--param", action="append", default=[], metavar="K=V",
                     help="builtin parameter; in sweep, a bare name selects the "
                          "swept parameter")
    src.add_argument("--cache", help="CSV cache for a solved field or trajectory")
    g = p.add_argument_group("sampling")
    g.add_argument("--grid", help=f"sample grid NxM (default {DEFAULT_GRID})")
    g.add_argument("--margin", type=float, help="fraction trimmed off each side")
    g.add_argument("--domain", help="a:b,c:d for both coordinates")
    for name in ("u", "v", "s", "t"):
        g.add_argument(f"--{name}", metavar="A:B", help=f"range of {name}")
    p.add_argument("--out", help="output directory")
    p.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)} or all")
    p.add_argument("--tol", action="append", default=[], metavar="KEY=VAL")
    p.add_argument("--range", dest="sweep_range", help="sweep values: v1,v2,... or a:b:n")
    return p


def make_config(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
    chart = dict(cfg.get("chart", {}))
    if args.chart_file:
        try:
            with open(args.chart_file) as fh:
                chart = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read chart file {args.chart_file}: {exc}") from None
    if args.builtin:
        chart = {"builtin": args.builtin}
    if not chart:
        raise UsageError("give a chart with --builtin, --chart-file or --config")

    sweep_param = cfg.get("sweep", {}).get("param")
    for item in args.param:
        if "=" in item:
            k, v = item.split("=", 1)
            chart[k.strip()] = _value(v)
        else:
            sweep_param = item.strip()

    domain_names = ("s", "t") if chart.get("builtin") in ("example", "nonflat") or \
        chart.get("coords") == "st" else ("u", "v")
    if args.domain:
        parts = args.domain.split(",")
        if len(parts) != 2:
            raise UsageError("--domain looks like a:b,c:d")
        chart["domain"] = {domain_names[0]: _range(parts[0]),
                           domain_names[1]: _range(parts[1])}
    for name in ("u", "v", "s", "t"):
        val = getattr(args, name)
        if val:
            if "builtin" in chart:
                chart[name] = _range(val)
            else:
                chart.setdefault("domain", {})[name] = _range(val)

    grid_spec = args.grid or cfg.get("grid", DEFAULT_GRID)
    margin = args.margin if args.margin is not None else cfg.get("margin", DEFAULT_MARGIN)
    if isinstance(grid_spec, dict):
        grid = Grid(int(grid_spec["nu"]), int(grid_spec["nv"]),
                    float(grid_spec.get("margin", margin)))
    else:
        grid = Grid.parse(str(grid_spec), margin)
    if grid.nu < 4 or grid.nv < 4:
        raise UsageError("the sample grid must be at least 4x4")

    tols = dict(cfg.get("tolerances", {}))
    for item in args.tol:
        if "=" not in item:
            raise UsageError(f"--tol expects KEY=VAL, got {item!r}")
        k, v = item.split("=", 1)
        try:
            tols[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"tolerance {k!r} must be a number") from None
    unknown = set(tols) - set(Tolerances.names()) - set(SuiteTolerances.names())
    if unknown:
        raise UsageError(f"unknown tolerance(s) {sorted(unknown)}")

    suites = tuple(args.suite or cfg.get("suite", ("all",)))
    if isinstance(cfg.get("suite"), str) and not args.suite:
        suites = (cfg["suite"],)
    bad = [s for s in suites if s != "all" and s not in SUITES]
    if bad:
        raise UsageError(f"unknown suite(s) {bad}; choose from {list(SUITES)} or all")

    sweep_values = ()
    if args.command == "sweep":
        if args.sweep_range is not None:
            sweep_values = _sweep_values(args.sweep_range)
        else:
            vals = cfg.get("sweep", {}).get("values")
            if vals is None:
                raise UsageError("sweep needs --range")
            if not vals:
                raise UsageError("the sweep range is empty")
            sweep_values = tuple(float(x) for x in vals)
        if not sweep_param:
            raise UsageError("sweep needs the swept parameter: --param NAME")

    return RunConfig(command=args.command, chart=chart, grid=grid, tolerances=tols,
                     out=args.out or cfg.get("out"), suites=suites,
                     sweep_param=sweep_param, sweep_values=sweep_values,
                     cache=args.cache or cfg.get("cache"))


# commands ---------------------------------------------------------------

def _out(cfg, name):
    return os.path.join(cfg.out, name)


def cmd_construct(cfg):
    chart = build_chart(cfg.chart, cfg.cache)
    u, v = chart.sample_points(cfg.grid)
    frame = build_frames(chart, u, v)
    res = residuals_from_frame(LocalFrame(chart, u, v, 4))
    summary = {
        "label": chart.label, "coords": chart.coords,
        "grid": [cfg.grid.nu, cfg.grid.nv], "margin": cfg.grid.margin,
        "K": [np.min(frame.K), np.max(frame.K)],
        "kappa": [np.min(frame.kappa), np.max(frame.kappa)],
        "max_integrability_residual": np.max(np.abs(res)),
        "max_beltrami_residual": np.max(beltrami_check(chart, u, v)),
        "max_frame_product_error": frame_orthogonality(frame),
    }
    if hasattr(chart, "drift"):
        summary["max_constraint_drift"] = chart.drift
        summary["integration"] = chart.stats
    if hasattr(chart, "field"):
        summary["refinement_change"] = chart.field.residual
        summary["refinement_levels"] = chart.field.levels
    if cfg.out:
        report.write_json(_out(cfg, "chart.json"), dict(chart.to_json(), grid=[cfg.grid.nu, cfg.grid.nv]))
        report.write_csv(_out(cfg, "invariants.csv"), report.INVARIANT_COLUMNS,
                         report.invariant_rows(frame))
        report.write_json(_out(cfg, "summary.json"), summary)
    return 0, summary


def cmd_classify(cfg):
    chart = build_chart(cfg.chart, cfg.cache)
    rep = classify(chart, cfg.grid, cfg.classify_tolerances())
    out = rep.to_json()
    if cfg.out:
        if rep.phi_samples is not None:
            out["phi_csv"] = "phi.csv"
            report.write_csv(_out(cfg, "phi.csv"), ("u", "v", "phi"),
                             np.column_stack([rep.u, rep.v, np.ravel(rep.phi_samples)]))
        if rep.verdict != "not_quasi_minimal":
            gs = gauss_samples(chart, rep.u, rep.v)
            out["gauss_csv"] = "gauss.csv"
            report.write_csv(_out(cfg, "gauss.csv"), report.GAUSS_COLUMNS,
                             report.gauss_rows(rep.u, rep.v, gs.G, gs.deltaG_direct))
        report.write_json(_out(cfg, "report.json"), out)
    return 0, out


def cmd_verify(cfg):
    chart = build_chart(cfg.chart, cfg.cache)
    results = run_suites(chart, cfg.grid, cfg.suites, cfg.suite_tolerances())
    ok = all(r.passed for r in results)
    out = {"label": chart.label, "passed": ok,
           "suites": [r.to_json() for r in results]}
    if cfg.out:
        report.write_json(_out(cfg, "verify.json"), out)
    return (0 if ok else 1), out


SWEEP_COLUMNS = ("param", "value", "verdict", "proper", "phi_min", "phi_max", "drift",
                 "C1", "C2", "C3", "C4", "C5", "C6", "error")


def cmd_sweep(cfg):
    rows, any_ok = [], False
    for val in cfg.sweep_values:
        spec = dict(cfg.chart)
        spec[cfg.sweep_param] = val
        row = [cfg.sweep_param, val]
        try:
            chart = build_chart(spec)
            rep = classify(chart, cfg.grid, cfg.classify_tolerances())
            phi = rep.phi_samples
            C = rep.C if rep.C is not None else [None] * 6
            row += [rep.verdict, rep.proper,
                    None if phi is None else np.min(phi),
                    None if phi is None else np.max(phi), rep.drift, *C, ""]
            any_ok = True
        except GeometryError as exc:
            row += ["error", None, None, None, None] + [None] * 6 + [
                f"{exc.condition}: {exc}"]
        rows.append(row)
    if cfg.out:
        report.write_csv(_out(cfg, "sweep.csv"), SWEEP_COLUMNS, rows)
    out = {"param": cfg.sweep_param, "rows": [
        dict(zip(SWEEP_COLUMNS, r)) for r in rows]}
    return (0 if any_ok else 2), out


RUNNERS = {"construct": cmd_construct, "classify": cmd_classify,
           "verify": cmd_verify, "sweep": cmd_sweep}


def _error(exc, out_dir):
    if isinstance(exc, GeometryError):
        obj = exc.to_json()
    else:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        obj = {"error": type(exc).__name__, "message": str(msg)}
    text = report.dumps(obj)
    if out_dir and os.path.isdir(out_dir):
        with open(os.path.join(out_dir, "error.json"), "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 2


def main(argv=None):
    args = build_parser().parse_args(argv)
    out_dir = args.out
    try:
        cfg = make_config(args)
        out_dir = cfg.out
        if cfg.out:
            os.makedirs(cfg.out, exist_ok=True)
        code, result = RUNNERS[cfg.command](cfg)
    except (GeometryError, KeyError, ValueError, OSError) as exc:
        return _error(exc, out_dir)
    if not cfg.out:
        sys.stdout.write(report.dumps(result))
    return code


if __name__ == "__main__":
    sys.exit(main())
