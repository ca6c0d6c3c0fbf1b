"""Command-line front end: ``mdzv compute | compute-series | compute-integral | catalog | check``.

Exit codes: 0 success, 2 configuration error, 3 invalid input, 4 failed
comparison, 5 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from . import __version__
from . import checks
from .cone import Cone, cone_new
from .errors import ConfigParse, MDZVError
from .membrane import QuadratureSpec, mdzv_integral
from .moduli_catalog import build_catalog
from .numfield import DEFAULT_PRECISION, field_new
from .series import epsilon_pattern, mdzv_sum

EXIT_OK = 0
EXIT_COMPARISON = 4

METHODS = ("series", "integral", "both")


@dataclass
class JobConfig:
    min_poly: list[int] = field(default_factory=lambda: [-1, 1])
    integral_basis: list[list] | None = None
    generators: list[list[int]] = field(default_factory=lambda: [[1]])
    s: list[int] = field(default_factory=lambda: [2])
    method: str = "both"
    precision_bits: int = DEFAULT_PRECISION
    coeff_bound: int | None = None
    quadrature: dict = field(default_factory=dict)
    output: str = "json"
    out_path: str | None = None
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)

    def inputs(self) -> dict:
        d = dataclasses.asdict(self)
        for k in ("output", "out_path", "workers"):
            d.pop(k)
        return d


@dataclass
class MethodResult:
    method: str
    value: float
    error: float
    work: int
    seconds: float
    extra: dict = field(default_factory=dict)


@dataclass
class Report:
    inputs: dict
    results: dict[str, MethodResult]
    comparison: dict | None
    version: str
    precision_bits: int

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        results = {k: MethodResult(**v) for k, v in d["results"].items()}
        return cls(d["inputs"], results, d["comparison"], d["version"], d["precision_bits"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["field", "cone", "s", "method", "value", "error", "seconds"])
        fld = " ".join(map(str, self.inputs["min_poly"]))
        cone = ";".join(",".join(map(str, g)) for g in self.inputs["generators"])
        s = ",".join(map(str, self.inputs["s"]))
        for r in self.results.values():
            w.writerow([fld, cone, s, r.method, repr(r.value), repr(r.error), f"{r.seconds:.3f}"])
        return buf.getvalue()


# --- configuration -------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _rows(text: str) -> list[list[str]]:
    return [[x for x in row.replace(" ", "").split(",") if x] for row in text.split(";") if row.strip()]


def load_config_file(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigParse(f"cannot parse config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigParse("config must be a mapping at the top level")
    return data


def config_from_mapping(data: dict) -> JobConfig:
    """Accepts the nested layout (field/cone/series/quadrature sections)."""
    cfg = JobConfig()
    known = {"field", "cone", "s", "method", "precision_bits", "series", "quadrature", "output", "out_path", "workers"}
    unknown = set(data) - known
    if unknown:
        raise ConfigParse(f"unknown config keys: {sorted(unknown)}")
    try:
        fld = data.get("field") or {}
        if "min_poly" in fld:
            cfg.min_poly = [int(c) for c in fld["min_poly"]]
        if "integral_basis" in fld:
            cfg.integral_basis = [[str(v) for v in row] for row in fld["integral_basis"]]
        cone = data.get("cone") or {}
        if "generators" in cone:
            cfg.generators = [[int(v) for v in row] for row in cone["generators"]]
        if "s" in data:
            cfg.s = [int(v) for v in data["s"]]
        for key in ("method", "output", "out_path"):
            if key in data:
                setattr(cfg, key, data[key])
        if "precision_bits" in data:
            cfg.precision_bits = int(data["precision_bits"])
        if "workers" in data:
            cfg.workers = int(data["workers"])
        series = data.get("series") or {}
        if series.get("coeff_bound") is not None:
            cfg.coeff_bound = int(series["coeff_bound"])
        cfg.quadrature = dict(data.get("quadrature") or {})
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigParse(f"malformed config value: {exc}") from exc
    return cfg


def build_config(args: argparse.Namespace, method: str | None = None) -> JobConfig:
    cfg = config_from_mapping(load_config_file(args.config)) if args.config else JobConfig()
    try:
        if args.min_poly:
            cfg.min_poly = _int_list(args.min_poly)
        if args.basis:
            cfg.integral_basis = _rows(args.basis)
        if args.generators:
            cfg.generators = [[int(v) for v in row] for row in _rows(args.generators)]
        if args.s:
            cfg.s = _int_list(args.s)
    except ValueError as exc:
        raise ConfigParse(f"malformed flag value: {exc}") from exc
    if args.precision_bits is not None:
        cfg.precision_bits = args.precision_bits
    if args.coeff_bound is not None:
        cfg.coeff_bound = args.coeff_bound
    for flag, key in (("scheme", "scheme"), ("points", "points_per_axis"), ("cutoff", "upper_cutoff"),
                      ("samples", "sample_count")):
        v = getattr(args, flag)
        if v is not None:
            cfg.quadrature[key] = v
    if args.output:
        cfg.output = args.output
    if args.out:
        cfg.out_path = args.out
    if args.workers is not None:
        cfg.workers = args.workers
    if method:
        cfg.method = method
    if cfg.method not in METHODS:
        raise ConfigParse(f"method must be one of {METHODS}")
    if cfg.output not in ("json", "csv"):
        raise ConfigParse("output must be json or csv")
    unknown = set(cfg.quadrature) - {f.name for f in dataclasses.fields(QuadratureSpec)}
    if unknown:
        raise ConfigParse(f"unknown quadrature keys: {sorted(unknown)}")
    return cfg


def _make_cone(cfg: JobConfig) -> Cone:
    nf = field_new(cfg.min_poly, cfg.integral_basis, cfg.precision_bits)
    return cone_new(nf, cfg.generators)


# --- commands ------------------------------------------------------------------


def _run_series(cone: Cone, cfg: JobConfig) -> MethodResult:
    r = mdzv_sum(cone, cfg.s, cfg.coeff_bound)
    return MethodResult("series", r.value, r.tail_bound, r.terms_used, r.seconds,
                        {"coeff_bound": r.coeff_bound, "upper_bound": r.upper_bound})


def _run_integral(cone: Cone, cfg: JobConfig) -> MethodResult:
    spec = QuadratureSpec(**cfg.quadrature)
    r = mdzv_integral(cone, cfg.s, spec)
    return MethodResult("integral", r.value, r.error_estimate, r.nodes, r.seconds,
                        {"scheme": spec.scheme, "components": r.components})


def cmd_compute(cfg: JobConfig) -> Report:
    comp = epsilon_pattern(cfg.s)
    cone = _make_cone(cfg)
    runners = {"series": _run_series, "integral": _run_integral}
    wanted = ["series", "integral"] if cfg.method == "both" else [cfg.method]
    if len(wanted) > 1 and cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=min(cfg.workers, len(wanted))) as pool:
            futures = {m: pool.submit(runners[m], cone, cfg) for m in wanted}
            results = {m: f.result() for m, f in futures.items()}
    else:
        results = {m: runners[m](cone, cfg) for m in wanted}
    comparison = None
    if cfg.method == "both":
        a, b = results["series"].value, results["integral"].value
        diff = abs(a - b)
        bound = results["series"].error + results["integral"].error
        comparison = {
            "abs_diff": diff,
            "rel_diff": diff / abs(b) if b else float("inf"),
            "combined_bound": bound,
            "passed": diff <= bound,
        }
    inputs = cfg.inputs()
    inputs["epsilon"] = list(comp.epsilon)
    return Report(inputs, results, comparison, __version__, cfg.precision_bits)


def cmd_catalog(cfg: JobConfig) -> dict:
    return build_catalog(_make_cone(cfg), cfg.s).to_dict()


def cmd_check(suite: str, workers: int = 1) -> dict:
    names = checks.suite_names(suite)
    t0 = time.perf_counter()
    if workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(checks.run_suite, names))
    else:
        results = [checks.run_suite(n) for n in names]
    return {
        "suite": suite,
        "ok": all(r.ok for r in results),
        "seconds": time.perf_counter() - t0,
        "suites": [r.to_dict() for r in results],
        "version": __version__,
    }


# --- entry point ---------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON job file")
    common.add_argument("--precision-bits", type=int)
    common.add_argument("--min-poly", help="ascending coefficients, e.g. -2,0,1")
    common.add_argument("--basis", help="integral basis rows, e.g. '1,0;0,1'")
    common.add_argument("--generators", help="cone generators in the basis, e.g. '1,0;3,2'")
    common.add_argument("--s", help="composition, e.g. 1,2")
    common.add_argument("--coeff-bound", type=int)
    common.add_argument("--scheme", choices=["nested", "quasi-random"])
    common.add_argument("--points", type=int, help="quadrature points per axis")
    common.add_argument("--cutoff", type=float, help="upper cutoff T")
    common.add_argument("--samples", type=int, help="quasi-random sample count")
    common.add_argument("--output", choices=["json", "csv"])
    common.add_argument("--out", help="write output to this file")
    common.add_argument("--workers", type=int)

    p = argparse.ArgumentParser(prog="mdzv", description="Multiple Dedekind zeta values over cones.")
    p.add_argument("--version", action="version", version=f"mdzv {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="series and integral, with comparison")
    sub.add_parser("compute-series", parents=[common], help="nested series with tail bound")
    sub.add_parser("compute-integral", parents=[common], help="membrane integral")
    sub.add_parser("catalog", parents=[common], help="divisor catalog as JSON")
    chk = sub.add_parser("check", parents=[common], help="run property suites")
    chk.add_argument("suite", nargs="?", default="all", help=f"one of {', '.join(checks.SUITES)}, all")
    return p


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    method = {"compute": "both", "compute-series": "series", "compute-integral": "integral"}.get(args.command)
    try:
        cfg = build_config(args, method)
        if args.command == "check":
            result = cmd_check(args.suite, cfg.workers)
            _emit(json.dumps(result, indent=2, default=str), cfg.out_path)
            return EXIT_OK if result["ok"] else EXIT_COMPARISON
        if args.command == "catalog":
            _emit(json.dumps(cmd_catalog(cfg), indent=2), cfg.out_path)
            return EXIT_OK
        report = cmd_compute(cfg)
        _emit(report.to_csv() if cfg.output == "csv" else report.to_json(), cfg.out_path)
        if report.comparison is not None and not report.comparison["passed"]:
            return EXIT_COMPARISON
        return EXIT_OK
    except MDZVError as exc:
        payload: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("i", "j"):
            if hasattr(exc, attr):
                payload[attr] = getattr(exc, attr)
        sys.stderr.write(json.dumps(payload) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
