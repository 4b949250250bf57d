"""Command-line entry point.

Commands::

    bvexplicit constants
    bvexplicit verify <suite|all> [--x X --Q Q --Q1 Q1]
    bvexplicit scan

Configuration comes from an optional JSON file (``--config``) with flags
taking precedence.  The output directory defaults to ``$BVEXPLICIT_OUT``
and then to ``./bvexplicit-out``.

Exit codes: 0 success, 1 strict check failed (or a constant identity
broke), 2 usage or configuration error, 3 resource abort.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .arith_tables import DEFAULT_MEM_BUDGET, BudgetError
from .bounds import compute_constants, constant_identities
from .verifier import (
    SUITES,
    GridPoint,
    GridSpec,
    SuiteOptions,
    Workspace,
    bv_point_check,
    reports_to_csv,
    reports_to_json,
    required_x_max,
    run_suite,
    scan_rows,
    scan_to_csv,
)

OUT_ENV = "BVEXPLICIT_OUT"
DEFAULT_OUT = "bvexplicit-out"
IDENTITY_TOL = 1e-12

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    x_max: int | None = None
    grid: GridSpec = field(default_factory=GridSpec)
    c3: float | None = None
    e0_limit: int = 10 ** 6
    out: str | None = None
    formats: tuple = ("json", "csv")
    jobs: int = 1
    mem_budget: int = DEFAULT_MEM_BUDGET
    timings: bool = False
    seed: int = 20261015

    def validate(self) -> RunConfig:
        try:
            self.grid.validate()
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid grid: {exc}") from exc
        if self.x_max is not None and self.x_max < 4:
            raise ConfigError("x_max must be at least 4")
        if self.e0_limit < 1000:
            raise ConfigError("e0_limit must be at least 1000")
        if not self.formats or set(self.formats) - {"json", "csv"}:
            raise ConfigError(f"formats must be drawn from json, csv; got {self.formats}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.mem_budget <= 0:
            raise ConfigError("mem_budget must be positive")
        if self.c3 is not None and not (math.isfinite(self.c3) and self.c3 > 0):
            raise ConfigError("c3 must be a positive real")
        return self

    def out_dir(self) -> Path:
        return Path(self.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)

    def suite_options(self) -> SuiteOptions:
        return SuiteOptions(grid=self.grid, seed=self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = self.grid.to_dict()
        d["formats"] = list(self.formats)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        kw = dict(d)
        try:
            if "grid" in kw:
                kw["grid"] = GridSpec.from_dict(kw["grid"])
            if "formats" in kw:
                kw["formats"] = tuple(kw["formats"])
            for key in ("x_max", "e0_limit", "jobs", "mem_budget", "seed"):
                if kw.get(key) is not None:
                    kw[key] = int(kw[key])
            if kw.get("c3") is not None:
                kw["c3"] = float(kw["c3"])
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"malformed configuration: {exc}") from exc
        return cls(**kw)

    @classmethod
    def load(cls, path: str | os.PathLike) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
        return cls.from_dict(data)


def _load_grid(path: str) -> GridSpec:
    try:
        data = json.loads(Path(path).read_text())
        return GridSpec.from_dict(data)
    except (OSError, json.JSONDecodeError, TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"cannot read grid {path}: {exc}") from exc


def _workspace(config: RunConfig, x_max: int) -> Workspace:
    return Workspace(x_max, c3=config.c3, e0_limit=config.e0_limit, jobs=config.jobs,
                     mem_budget=config.mem_budget)


def _write_reports(config: RunConfig, stem: str, reports: list) -> list[Path]:
    out = config.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in config.formats:
        path = out / f"{stem}.json"
        path.write_text(reports_to_json(reports, config.timings))
        written.append(path)
    if "csv" in config.formats:
        path = out / f"{stem}.csv"
        path.write_text(reports_to_csv(reports, config.timings))
        written.append(path)
    return written


def constants_document(config: RunConfig) -> str:
    k = compute_constants(config.e0_limit, config.c3)
    return json.dumps({"constants": asdict(k), "identities": constant_identities(k)}, indent=2) + "\n"


def cmd_constants(config: RunConfig) -> int:
    config.validate()
    doc = constants_document(config)
    sys.stdout.write(doc)
    if "json" in config.formats:
        out = config.out_dir()
        out.mkdir(parents=True, exist_ok=True)
        (out / "constants.json").write_text(doc)
    residuals = json.loads(doc)["identities"]
    return EXIT_OK if all(r <= IDENTITY_TOL for r in residuals.values()) else EXIT_FAIL


def cmd_verify(suite: str, config: RunConfig, point: GridPoint | None = None) -> int:
    config.validate()
    if suite != "all" and suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}")
    if point is not None and suite != "bv":
        raise ConfigError("--x/--Q/--Q1 only apply to the bv suite")
    opts = config.suite_options()
    if point is not None:
        need = math.floor(point.x)
        if not (point.x >= 4 and 1 <= point.Q1 <= point.Q <= math.sqrt(point.x) * (1 + 1e-12)):
            raise ConfigError("need x >= 4 and 1 <= Q1 <= Q <= sqrt(x)")
    else:
        need = required_x_max(opts)
    x_max = config.x_max if config.x_max is not None else need
    if x_max < need:
        raise ConfigError(f"x_max={x_max} is below the {need} this run needs")

    stem = f"verify_{suite}"
    reports: list = []
    status = EXIT_OK
    try:
        ws = _workspace(config, x_max)
        if point is not None:
            reports.extend(r for r in bv_point_check(point, ws) if r.name == "bv_check")
        else:
            run_suite(suite, ws, opts, sink=reports)
    except (BudgetError, MemoryError) as exc:
        print(f"resource abort: {exc}", file=sys.stderr)
        status = EXIT_RESOURCE
    for path in _write_reports(config, stem, reports):
        print(path)
    failed = [r for r in reports if r.strict and not r.passed]
    for r in failed:
        print(f"FAIL {r.name} {r.params} lhs={r.lhs:.12g} rhs={r.rhs:.12g}", file=sys.stderr)
    print(f"{len(reports)} reports, {len(failed)} strict failures", file=sys.stderr)
    if status == EXIT_OK and failed:
        status = EXIT_FAIL
    return status


def scan_document(config: RunConfig) -> str:
    points = config.grid.points()
    if not points:
        return scan_to_csv([])
    need = math.floor(max(p.x for p in points))
    x_max = config.x_max if config.x_max is not None else need
    if x_max < need:
        raise ConfigError(f"x_max={x_max} is below the grid maximum {need}")
    return scan_to_csv(scan_rows(config.grid, _workspace(config, x_max)))


def cmd_scan(config: RunConfig) -> int:
    config.validate()
    try:
        doc = scan_document(config)
    except (BudgetError, MemoryError) as exc:
        print(f"resource abort: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    out = config.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    path = out / "scan.csv"
    path.write_text(doc)
    print(path)
    ratios = [float(line.rsplit(",", 1)[1]) for line in doc.splitlines()[1:]]
    return EXIT_OK if all(r < 1 for r in ratios) else EXIT_FAIL


def _number(text: str) -> float:
    return float(text)


def _integer(text: str) -> int:
    v = float(text)
    if not v.is_integer():
        raise argparse.ArgumentTypeError(f"expected an integer, got {text}")
    return int(v)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("--x-max", type=_integer, help="table size")
    common.add_argument("--grid", help="JSON grid file with xs, q_rules, q1_rules")
    common.add_argument("--c3", type=_number, help="override the cited constant c3")
    common.add_argument("--e0-limit", type=_integer, help="prime cutoff for the E0 product")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--format", choices=("json", "csv", "both"))
    common.add_argument("--jobs", type=_integer)
    common.add_argument("--mem-budget", type=_integer, help="bytes")
    common.add_argument("--seed", type=_integer)
    common.add_argument("--timings", action="store_true", default=None,
                        help="include wall times (output is then not reproducible)")

    parser = argparse.ArgumentParser(prog="bvexplicit", description="Numerical checks of explicit prime-distribution bounds.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="compute and export the explicit constants")
    v = sub.add_parser("verify", parents=[common], help="run a check suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--x", type=_number)
    v.add_argument("--Q", type=_number)
    v.add_argument("--Q1", type=_number)
    sub.add_parser("scan", parents=[common], help="emit lhs and both right-hand sides over the grid as CSV")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.load(args.config) if args.config else RunConfig()
    updates = {}
    if args.grid:
        updates["grid"] = _load_grid(args.grid)
    for name in ("x_max", "c3", "e0_limit", "out", "jobs", "mem_budget", "seed", "timings"):
        value = getattr(args, name)
        if value is not None:
            updates[name] = value
    if args.format:
        updates["formats"] = ("json", "csv") if args.format == "both" else (args.format,)
    return replace(config, **updates).validate()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if args.command == "constants":
            return cmd_constants(config)
        if args.command == "scan":
            return cmd_scan(config)
        coords = (args.x, args.Q, args.Q1)
        if any(c is not None for c in coords):
            if any(c is None for c in coords):
                raise ConfigError("--x, --Q and --Q1 go together")
            return cmd_verify(args.suite, config, GridPoint(args.x, args.Q, args.Q1, "cli", "cli"))
        return cmd_verify(args.suite, config)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
