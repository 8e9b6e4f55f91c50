"""``padic-dyn`` command line.

Exit codes: 0 success, 1 domain error, 2 verification failure, 3 usage error.
Reports go to stdout; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .dynamics import (attraction_bound, closed_form_iterate, find_periodic,
                       fixed_point_analysis, step)
from .errors import PAdicError
from .norm_geometry import (MapParams, ball_mapping_check, classify_start,
                            radius_iterate, trajectory_csv)
from .padic_core import DEFAULT_PRECISION, PAdicContext, agree, distance
from .radius import RadiusExp
from .roots import cube_roots, roots_of_unity
from .verification import run_battery, suites_for

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2, 3
COMMANDS = ("norm", "roots", "fixed-points", "iterate", "classify", "periodic", "bound", "verify")
FORMATS = ("json", "csv", "pretty")

DEFAULTS = {
    "prime": None, "precision": DEFAULT_PRECISION, "a": "1", "q": 2, "m": None,
    "radius": None, "steps": 50, "samples": 20, "seed": 0, "format": "json",
    "x": None, "y": None, "k": None,
}
INT_KEYS = {"prime", "precision", "q", "m", "steps", "samples", "seed", "k"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


@dataclass
class CliConfig:
    command: str
    prime: int | None
    precision: int
    a: str
    q: int
    m: int | None
    radius: str | None
    steps: int
    samples: int
    seed: int
    format: str
    x: str | None
    y: str | None
    k: int | None

    def context(self) -> PAdicContext:
        if self.prime is None:
            raise UsageError(f"{self.command}: --prime is required")
        return PAdicContext(self.prime, self.precision)

    def params(self) -> MapParams:
        ctx = self.context()
        if self.a.startswith("v:"):
            return MapParams(ctx.prime, int(self.a[2:]), None, self.q)
        return MapParams.from_a(parse_number(self.a, ctx), self.q)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not an exact rational: {text!r}") from exc


def parse_number(text: str, ctx: PAdicContext):
    value = parse_rational(text)
    return ctx(value.numerator, value.denominator)


def read_config(path: str) -> dict:
    """``key=value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prime", type=int)
    common.add_argument("--precision", type=int)
    common.add_argument("--a", help="coefficient: n, n/m, or v:k (valuation only)")
    common.add_argument("--q", type=int)
    common.add_argument("--m", type=int, help="period or iterate exponent")
    common.add_argument("--radius", help="radius exponent e (radius p^-e), integer or num/den")
    common.add_argument("--steps", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--x", help="point as n or n/m")
    common.add_argument("--y", help="second point (norm: distance)")
    common.add_argument("--k", type=int, help="roots: order of roots of unity")

    parser = _Parser(prog="padic-dyn", description="Exact p-adic dynamics of f(x) = a/x^q.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve(argv: list[str]) -> CliConfig:
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError(build_parser().format_usage())
    merged = dict(DEFAULTS)
    env_seed = os.environ.get("PADIC_DYN_SEED")
    if env_seed is not None:
        merged["seed"] = env_seed
    if ns.config:
        merged.update(read_config(ns.config))
    merged.update({k: v for k, v in vars(ns).items() if k in DEFAULTS and v is not None})
    for key in INT_KEYS:
        if merged[key] is not None:
            try:
                merged[key] = int(merged[key])
            except (TypeError, ValueError) as exc:
                raise UsageError(f"{key} must be an integer, got {merged[key]!r}") from exc
    if merged["format"] not in FORMATS:
        raise UsageError(f"format must be one of {FORMATS}")
    if not 8 <= merged["precision"] <= 4096:
        raise UsageError("precision must lie in [8, 4096]")
    if merged["q"] < 1:
        raise UsageError("q must be >= 1")
    return CliConfig(command=ns.command, **merged)


# -- subcommands ------------------------------------------------------------

def _radius(cfg: CliConfig, prime: int) -> RadiusExp:
    if cfg.radius is None:
        raise UsageError(f"{cfg.command}: --radius is required")
    return RadiusExp.of(prime, parse_rational(cfg.radius))


def cmd_norm(cfg: CliConfig) -> dict:
    ctx = cfg.context()
    x = parse_number(cfg.x if cfg.x is not None else cfg.a, ctx)
    out = {"x": x.to_json(), "norm": x.norm().to_json()}
    if cfg.y is not None:
        y = parse_number(cfg.y, ctx)
        out.update({"y": y.to_json(), "distance": distance(x, y).to_json()})
    return out


def cmd_roots(cfg: CliConfig) -> dict:
    ctx = cfg.context()
    if cfg.k is not None:
        return roots_of_unity(cfg.k, ctx).to_json()
    return cube_roots(parse_number(cfg.a, ctx)).to_json()


def cmd_fixed_points(cfg: CliConfig) -> dict:
    return fixed_point_analysis(cfg.params()).to_json()


def cmd_iterate(cfg: CliConfig):
    params = cfg.params()
    if cfg.radius is not None:
        traj = radius_iterate(params, _radius(cfg, params.prime), cfg.steps)
        return trajectory_csv(traj) if cfg.format == "csv" else traj.to_json()
    if cfg.x is None:
        raise UsageError("iterate: give --x (exact orbit) or --radius (norm-level orbit)")
    x = parse_number(cfg.x, cfg.context())
    points, y = [x], x
    for n in range(1, cfg.steps + 1):
        y = step(params, y)
        if not agree(y, closed_form_iterate(params, x, n)):
            raise AssertionError(f"closed form disagrees with stepping at n={n}")
        points.append(y)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "v", "unit", "digits"])
        for n, pt in enumerate(points):
            j = pt.to_json()
            w.writerow([n, j["v"], j["unit"], j["digits"]])
        return buf.getvalue()
    return {"x": x.to_json(), "orbit": [pt.to_json() for pt in points],
            "norms": [pt.norm().to_json() for pt in points]}


def cmd_classify(cfg: CliConfig) -> dict:
    params = cfg.params()
    r = _radius(cfg, params.prime)
    region = classify_start(params, r)
    return {"alpha": params.alpha().to_json(), "radius": r.to_json(), "region": region.name,
            "even_limit": region.even_limit, "odd_limit": region.odd_limit,
            "image": ball_mapping_check(params, r).to_json()}


def cmd_periodic(cfg: CliConfig) -> dict:
    if cfg.m is None:
        raise UsageError("periodic: --m is required")
    return find_periodic(cfg.params(), cfg.m).to_json()


def cmd_bound(cfg: CliConfig) -> dict:
    if cfg.m is None:
        raise UsageError("bound: --m is required")
    ctx = cfg.context()
    return attraction_bound(cfg.m, _radius(cfg, ctx.prime), ctx.prime).to_json()


def cmd_verify(cfg: CliConfig) -> dict:
    if cfg.prime is None:
        reports = run_battery(cfg.seed, cfg.samples, cfg.steps, cfg.precision)
    else:
        reports = suites_for(cfg.params(), cfg.samples, cfg.steps, cfg.seed)
    return {"seed": cfg.seed, "reports": [r.to_json() for r in reports],
            "pass": all(r.passed for r in reports)}


HANDLERS = {
    "norm": cmd_norm, "roots": cmd_roots, "fixed-points": cmd_fixed_points,
    "iterate": cmd_iterate, "classify": cmd_classify, "periodic": cmd_periodic,
    "bound": cmd_bound, "verify": cmd_verify,
}


def render(result, fmt: str) -> str:
    if isinstance(result, str):
        return result
    if fmt == "csv":
        raise UsageError("csv output is available for iterate only")
    if fmt == "pretty":
        return json.dumps(result, sort_keys=True, indent=2) + "\n"
    return json.dumps(result, sort_keys=True, separators=(",", ":")) + "\n"


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = resolve(argv)
        result = HANDLERS[cfg.command](cfg)
        stdout.write(render(result, cfg.format))
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except PAdicError as exc:
        stdout.write(render({"error": type(exc).__name__, "message": str(exc)}, "json"))
        stderr.write(f"padic-dyn: {exc}\n")
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    if cfg.command == "verify" and not result["pass"]:
        return EXIT_VERIFY
    return EXIT_OK


def main() -> None:
    sys.exit(run())
