"""Command-line front end: list scenarios, run checks, sweep grids.

    nullframe catalog list
    nullframe check config.json [--tol ricci_blocks=1e-8]
    nullframe grid config.json

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
3 evaluation failure (more than 10% of the sample points were skipped).
NULLFRAME_THREADS sets the number of worker threads (default 1).
See CONFIG.md for the configuration schema.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import exprlang
from .catalog import (CHECKS, CatalogError, Expectation, PointContext, Scenario, catalog_get, catalog_list,
                      missing_requirement)
from .coframe import FrameError, frame_condition
from .crstruct import CRError, CRStructure
from .exprlang import ExprError
from .jets import JetError
from .lift import LiftError, LiftParameters, lift_fefferman, lift_general, lift_reduced

SCHEMA_VERSION = 1
COND_LIMIT = 1e8
SKIP_LIMIT = 0.10

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_EVAL = 0, 1, 2, 3

# used for checks that are not in the scenario's own expectation list
DEFAULT_TOLERANCES = {
    "ricci_blocks": 1e-6,
    "goldberg_sachs": 1e-7,
    "weyl_scalars": 1e-7,
    "classify": 0.5,
    "levi": 1e-10,
    "shearfree": 1e-9,
    "structure_equation": 1e-10,
    "tensor_identities": 1e-9,
    "maxwell": 1e-10,
    "cartan_covanishing": 0.5,
    "periodicity": 1e-12,
}

TOP_LEVEL_KEYS = {"schema_version", "scenario", "inline", "checks", "sampling", "tolerances", "petrov_labels", "output"}

# failures that mark a point as skipped rather than aborting the run
EVAL_ERRORS = (FrameError, LiftError, JetError, CRError, ZeroDivisionError, FloatingPointError, OverflowError)


class ConfigError(ValueError):
    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


@dataclass
class RunConfig:
    scenario: Scenario
    checks: list
    mode: str = "random"
    count: int = 10
    shape: tuple = ()
    seed: int = 0
    domain: tuple = ()
    tolerances: dict = field(default_factory=dict)
    petrov_labels: bool = False
    report_path: str | None = None
    csv_path: str | None = None


# ---------------------------------------------------------------------------
# configuration


def _require(obj, key, kind, loc):
    if key not in obj:
        raise ConfigError(f"missing key {key!r}", loc)
    val = obj[key]
    if not isinstance(val, kind):
        raise ConfigError(f"{key!r} has the wrong type", f"{loc}.{key}")
    return val


def _domain(raw, n, loc):
    if not isinstance(raw, list) or len(raw) != n:
        raise ConfigError(f"domain needs {n} [lo, hi] pairs", loc)
    out = []
    for k, pair in enumerate(raw):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) for x in pair) or pair[0] > pair[1]):
            raise ConfigError("expected [lo, hi] with lo <= hi", f"{loc}[{k}]")
        out.append((float(pair[0]), float(pair[1])))
    return tuple(out)


def _number_or_expr(value, chart, loc):
    """Accept numbers, {"re": x, "im": y} or expression strings (parsed now)."""
    if isinstance(value, bool):
        raise ConfigError("expected a number or an expression", loc)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        return complex(value.get("re", 0.0), value.get("im", 0.0))
    if isinstance(value, str):
        try:
            exprlang.parse(value, chart)
        except ExprError as exc:
            raise ConfigError(str(exc), loc) from None
        return value
    raise ConfigError("expected a number or an expression", loc)


def _inline_scenario(raw, loc) -> Scenario:
    chart = _require(raw, "chart", list, loc)
    if len(chart) != 3 or not all(isinstance(c, str) for c in chart):
        raise ConfigError("chart needs three coordinate names", f"{loc}.chart")
    chart4 = tuple(chart) + ("r",)
    forms = {}
    for key in ("lambda", "mu"):
        comps = _require(raw, key, list, loc)
        if len(comps) != 3:
            raise ConfigError("needs three components", f"{loc}.{key}")
        forms[key] = [_number_or_expr(c, tuple(chart), f"{loc}.{key}[{k}]") for k, c in enumerate(comps)]
    try:
        cr = CRStructure.from_expressions(chart, forms["lambda"], forms["mu"], name="inline")
    except (ExprError, CRError) as exc:
        raise ConfigError(str(exc), loc) from None
    lift = raw.get("lift", {"kind": "general"})
    if not isinstance(lift, dict):
        raise ConfigError("lift must be an object", f"{loc}.lift")
    kind = lift.get("kind", "general")
    lloc = f"{loc}.lift"
    Lambda = 0.0
    extras = {}
    if kind == "general":
        vals = {k: _number_or_expr(lift.get(k, d), chart4, f"{lloc}.{k}")
                for k, d in (("P", 1.0), ("W", 0.0), ("H", 0.0))}
        if "mu_scale" in lift:
            vals["mu_scale"] = _number_or_expr(lift["mu_scale"], chart4, f"{lloc}.mu_scale")
        coframe = lift_general(cr, **vals, name="inline")
    elif kind == "reduced":
        vals = {k: _number_or_expr(lift.get(k, d), chart4, f"{lloc}.{k}")
                for k, d in (("p", 1.0), ("s", 0.0), ("t", 0.0), ("m", 0.0))}
        Lambda = lift.get("Lambda", 0.0)
        if not isinstance(Lambda, (int, float)) or isinstance(Lambda, bool):
            raise ConfigError("Lambda must be a number", f"{lloc}.Lambda")
        params = LiftParameters(Lambda=float(Lambda), **vals)
        coframe = lift_reduced(cr, params, name="inline")
        extras["lift_parameters"] = params
    elif kind == "fefferman":
        coframe = lift_fefferman(cr, name="inline")
    else:
        raise ConfigError(f"unknown lift kind {kind!r}", f"{lloc}.kind")
    domain = _domain(_require(raw, "domain", list, loc), 4, f"{loc}.domain")
    expected = (Expectation("structure_equation", 1e-10), Expectation("tensor_identities", 1e-9))
    return Scenario("inline", {}, coframe, cr, domain, expected, Lambda=float(Lambda), extras=extras)


def parse_config(data, tol_overrides=None) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object", "$")
    unknown = sorted(set(data) - TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown}", "$")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})", "$.schema_version")
    if ("scenario" in data) == ("inline" in data):
        raise ConfigError("give exactly one of 'scenario' and 'inline'", "$")
    if "scenario" in data:
        sc = data["scenario"]
        if isinstance(sc, str):
            sc = {"name": sc}
        if not isinstance(sc, dict):
            raise ConfigError("scenario must be a name or an object", "$.scenario")
        name = _require(sc, "name", str, "$.scenario")
        params = sc.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("params must be an object", "$.scenario.params")
        try:
            scenario = catalog_get(name, **params)
        except (CatalogError, ExprError, TypeError) as exc:
            raise ConfigError(str(exc), "$.scenario") from None
    else:
        if not isinstance(data["inline"], dict):
            raise ConfigError("inline must be an object", "$.inline")
        scenario = _inline_scenario(data["inline"], "$.inline")

    checks = data.get("checks")
    if checks is None:
        checks = [e.check for e in scenario.expected]
    if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
        raise ConfigError("checks must be a list of names", "$.checks")
    for k, c in enumerate(checks):
        if c not in CHECKS:
            raise ConfigError(f"unknown check {c!r}", f"$.checks[{k}]")
        missing = missing_requirement(scenario, c)
        if missing:
            raise ConfigError(f"check {c!r} is not available: {missing}", f"$.checks[{k}]")

    sampling = data.get("sampling", {})
    if not isinstance(sampling, dict):
        raise ConfigError("sampling must be an object", "$.sampling")
    mode = sampling.get("mode", "random")
    if mode not in ("random", "grid"):
        raise ConfigError(f"unknown sampling mode {mode!r}", "$.sampling.mode")
    count = sampling.get("count", 10)
    if not isinstance(count, int) or count < 1:
        raise ConfigError("count must be a positive integer", "$.sampling.count")
    seed = sampling.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a non-negative integer", "$.sampling.seed")
    shape = sampling.get("shape", [1, 5, 5, 1])
    if (not isinstance(shape, list) or len(shape) != 4
            or not all(isinstance(s, int) and s >= 1 for s in shape)):
        raise ConfigError("shape needs four positive integers", "$.sampling.shape")
    domain = scenario.domain
    if "domain" in sampling:
        domain = _domain(sampling["domain"], 4, "$.sampling.domain")

    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("tolerances must be an object", "$.tolerances")
    tolerances = dict(tolerances)
    tolerances.update(tol_overrides or {})
    for k, v in tolerances.items():
        if k not in CHECKS:
            raise ConfigError(f"unknown check {k!r}", f"$.tolerances.{k}")
        if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
            raise ConfigError("tolerance must be a positive number", f"$.tolerances.{k}")

    output = data.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output must be an object", "$.output")
    return RunConfig(scenario, checks, mode, count, tuple(shape), seed, domain,
                     {k: float(v) for k, v in tolerances.items()}, bool(data.get("petrov_labels", False)),
                     output.get("report"), output.get("csv"))


def load_config(path, tol_overrides=None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(str(exc), str(path)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
    return parse_config(data, tol_overrides)


def parse_tol(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"expected name=value, got {item!r}", "--tol")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"not a number: {value!r}", "--tol") from None
    return out


# ---------------------------------------------------------------------------
# evaluation


def sample_points(cfg: RunConfig) -> np.ndarray:
    if cfg.mode == "random":
        scn = cfg.scenario
        box = Scenario(scn.name, scn.params, scn.coframe, scn.cr, cfg.domain, exclude=scn.exclude)
        return box.sample(np.random.default_rng(cfg.seed), cfg.count)
    axes = [np.linspace(lo, hi, n) if n > 1 else np.array([lo]) for (lo, hi), n in zip(cfg.domain, cfg.shape)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NULLFRAME_THREADS", "1")))
    except ValueError:
        return 1


def _map_points(fn, points):
    """Apply ``fn`` to every point, keeping input order."""
    n = _threads()
    if n == 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, points))


def _tolerance(cfg: RunConfig, name: str) -> tuple:
    exp = next((e for e in cfg.scenario.expected if e.check == name), None)
    exp = exp or Expectation(name, DEFAULT_TOLERANCES[name])
    return cfg.tolerances.get(name, exp.tol), exp.relative


def _evaluate_point(cfg: RunConfig, point):
    """Residuals of every configured check at one point, or None if it was skipped."""
    scn = cfg.scenario
    if scn.exclude is not None and scn.exclude(point):
        return None, "excluded"
    with np.errstate(divide="raise", invalid="raise", over="raise"):
        try:
            cond = frame_condition(scn.coframe, point)
            if not math.isfinite(cond) or cond > COND_LIMIT:
                return None, f"frame condition number {cond:.3g}"
            ctx = PointContext(scn, point)
            out = {name: CHECKS[name](ctx) for name in cfg.checks}
            label = ctx.petrov.label.value if cfg.petrov_labels else None
        except EVAL_ERRORS as exc:
            return None, f"{type(exc).__name__}: {exc}"
    return (out, label), None


def run_check(cfg: RunConfig) -> tuple:
    """Evaluate the configured checks; returns (report dict, exit code)."""
    points = sample_points(cfg)
    results = _map_points(lambda p: _evaluate_point(cfg, p), points)
    skipped = sum(1 for r, _ in results if r is None)
    checks = []
    for name in cfg.checks:
        tol, relative = _tolerance(cfg, name)
        vals = [r[0][name] for r, _ in results if r is not None]
        abs_max = max((v[0] for v in vals), default=0.0)
        rel_max = max((v[1] for v in vals), default=0.0)
        worst = rel_max if relative else abs_max
        checks.append({
            "name": name, "samples": len(vals), "max_abs_residual": abs_max, "max_rel_residual": rel_max,
            "tolerance": tol, "relative": relative, "pass": bool(vals) and worst < tol,
        })
    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg.scenario.name,
        "params": cfg.scenario.params,
        "sampling": {"mode": cfg.mode, "seed": cfg.seed, "points": len(points), "skipped": skipped},
        "checks": checks,
    }
    if cfg.petrov_labels or skipped:
        report["points"] = [
            {"index": k, "coords": [float(x) for x in p],
             **({"petrov": r[1]} if r is not None and cfg.petrov_labels else {}),
             **({"skipped": why} if r is None else {})}
            for k, (p, (r, why)) in enumerate(zip(points, results))
        ]
    eval_failed = skipped > SKIP_LIMIT * len(points)
    all_pass = all(c["pass"] for c in checks)
    report["pass"] = all_pass and not eval_failed
    code = EXIT_EVAL if eval_failed else (EXIT_OK if all_pass else EXIT_FAIL)
    return report, code


GRID_FIELDS = ["levi", "kappa_re", "kappa_im", "sigma_re", "sigma_im", "Omega", "Theta"] + [
    f"psi{k}_{part}" for k in range(5) for part in ("re", "im")] + ["petrov", "skipped"]


def _grid_row(scn: Scenario, point):
    with np.errstate(divide="raise", invalid="raise", over="raise"):
        try:
            cond = frame_condition(scn.coframe, point)
            if (scn.exclude is not None and scn.exclude(point)) or not math.isfinite(cond) or cond > COND_LIMIT:
                return None
            ctx = PointContext(scn, point)
            o, psi = ctx.optical, ctx.packet.psi
            row = [ctx.levi, o.kappa.real, o.kappa.imag, o.sigma.real, o.sigma.imag, o.Omega, o.expansion]
            for v in psi:
                row += [v.real, v.imag]
            return [repr(float(x)) for x in row] + [ctx.petrov.label.value, "0"]
        except EVAL_ERRORS:
            return None


def run_grid(cfg: RunConfig) -> tuple:
    """CSV table over the sample points; returns (csv text, exit code)."""
    points = sample_points(cfg)
    rows = _map_points(lambda p: _grid_row(cfg.scenario, p), points)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(cfg.scenario.chart) + GRID_FIELDS)
    skipped = 0
    for p, row in zip(points, rows):
        coords = [repr(float(x)) for x in p]
        if row is None:
            skipped += 1
            row = [""] * (len(GRID_FIELDS) - 1) + ["1"]
        writer.writerow(coords + row)
    code = EXIT_EVAL if skipped > SKIP_LIMIT * len(points) else EXIT_OK
    return buf.getvalue(), code


# ---------------------------------------------------------------------------
# entry point


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nullframe", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    cat = sub.add_parser("catalog", help="built-in scenarios")
    cat.add_argument("action", choices=["list"])
    for name, helptext in (("check", "run checks and print a JSON report"),
                           ("grid", "evaluate a grid and print a CSV table")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config", help="JSON configuration file")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
        p.add_argument("-o", "--output", help="write the report here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "catalog":
        for name, params in catalog_list():
            print(f"{name}\t{json.dumps(params, sort_keys=True)}")
        return EXIT_OK
    try:
        cfg = load_config(args.config, parse_tol(args.tol))
        if args.command == "grid" and cfg.mode != "grid":
            raise ConfigError("grid needs sampling.mode = 'grid'", "$.sampling.mode")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "check":
            report, code = run_check(cfg)
            _write(json.dumps(report, sort_keys=True, indent=2) + "\n", args.output or cfg.report_path)
        else:
            text, code = run_grid(cfg)
            _write(text, args.output or cfg.csv_path)
    except CatalogError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    return code


if __name__ == "__main__":
    sys.exit(main())
