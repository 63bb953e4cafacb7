"""Command-line front end.

Usage::

    rearrange <command> [--config PATH] [options]

Commands: ``rearrange``, ``converge``, ``oracle``, ``check``,
``counterexample``. Settings come from a flat ``key = value`` config file and
are overridden by flags. Exit status is 0 on success, 1 for configuration
errors and 2 for numerical failures; errors are reported as one line on
stderr, ``error: <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from . import diagnostics, oracle
from .domain import domain_from_text
from .errors import ConfigurationError, NumericalError, RangeError, RearrangementError
from .expr import field_from_text
from .grid import Grid, GridSpec, Rectangle, au_deviation
from .multi_index import MultiIndex, product_count
from .rearrange import RearrangementSpline, sample_sort

KEYS = {
    "dimension", "field", "domain", "lower", "upper", "n", "n_list", "placement", "seed",
    "probes", "oracle_res", "out", "reference_integral", "quadrature_points", "hat_width",
    "hat_count", "counterexample", "timings",
}


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    config = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from exc
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in KEYS:
                raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
            config[key] = value
    return config


def _floats(text, what):
    try:
        return [float(v) for v in re.split(r"[,\s]+", text.strip()) if v]
    except ValueError:
        raise ConfigurationError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _index(text, d, what) -> MultiIndex:
    parts = [p for p in re.split(r"[x,\s]+", text.strip()) if p]
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ConfigurationError(f"{what}: expected integers, got {text!r}") from None
    if len(values) == 1 and d > 1:
        values = values * d
    if len(values) != d:
        raise ConfigurationError(f"{what}: expected {d} entries, got {text!r}")
    n = MultiIndex(values)
    product_count(n)
    return n


def _index_list(text, d, what) -> list[MultiIndex]:
    items = [p for p in re.split(r"[;\s]+", text.strip()) if p]
    if d == 1 and len(items) == 1:
        items = [p for p in items[0].split(",") if p]
    return [_index(item, d, what) for item in items]


class Settings:
    """Resolved run configuration."""

    def __init__(self, raw: dict):
        self.raw = raw
        lower = _floats(raw["lower"], "lower") if "lower" in raw else None
        upper = _floats(raw["upper"], "upper") if "upper" in raw else None
        if "dimension" in raw:
            try:
                d = int(raw["dimension"])
            except ValueError:
                raise ConfigurationError(f"dimension: expected an integer, got {raw['dimension']!r}") from None
        elif lower is not None:
            d = len(lower)
        elif upper is not None:
            d = len(upper)
        else:
            d = 1
        if d < 1:
            raise ConfigurationError("dimension must be >= 1")
        self.d = d
        lower = [0.0] * d if lower is None else lower
        upper = [1.0] * d if upper is None else upper
        if len(lower) != d or len(upper) != d:
            raise ConfigurationError(f"lower/upper must have {d} entries")
        self.rect = Rectangle(tuple(lower), tuple(upper))
        self.field_text = raw.get("field", "identity")
        self.field = field_from_text(self.field_text, d)
        self.domain_text = raw.get("domain", "box")
        self.domain = domain_from_text(self.domain_text, self.rect)
        self.n = _index(raw["n"], d, "n") if "n" in raw else None
        self.n_list = _index_list(raw["n_list"], d, "n_list") if "n_list" in raw else None
        self.placement = raw.get("placement", "reference")
        self.seed = None
        if raw.get("seed") not in (None, ""):
            try:
                self.seed = int(raw["seed"], 0)
            except ValueError:
                raise ConfigurationError(f"seed: expected an integer, got {raw['seed']!r}") from None
        self.probes = _floats(raw["probes"], "probes") if "probes" in raw else None
        self.oracle_res = _index(raw["oracle_res"], d, "oracle_res") if "oracle_res" in raw else None
        self.out = raw.get("out", ".")
        self.reference_integral = (
            float(raw["reference_integral"]) if raw.get("reference_integral") else None
        )
        self.quadrature_points = int(raw.get("quadrature_points", 2048))
        self.hat_width = float(raw.get("hat_width", 0.25))
        self.hat_count = int(raw.get("hat_count", 9))
        self.counterexample = _flag(raw.get("counterexample"))
        self.timings = _flag(raw.get("timings"))
        GridSpec(self.rect, self.n or MultiIndex((1,) * d), self.placement, self.seed)

    def require_n(self) -> MultiIndex:
        if self.n is None:
            raise ConfigurationError("this command needs n")
        return self.n


def _flag(value) -> bool:
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_path(s: Settings, name: str) -> str:
    os.makedirs(s.out, exist_ok=True)
    return os.path.join(s.out, name)


def cmd_rearrange(s: Settings, echo) -> list[str]:
    n = s.require_n()
    grid = Grid(GridSpec(s.rect, n, s.placement, s.seed))
    spline = RearrangementSpline(sample_sort(s.field, grid, s.domain))
    count = spline.omega + 1
    meta = {
        "field": s.field.label,
        "domain": s.domain.label,
        "n": list(n),
        "N": len(grid),
        "placement": s.placement,
        "seed": s.seed,
        "grid_digest": grid.spec.digest(),
        "omega": spline.omega,
        "inside_count": count,
        "grid_fraction": count / len(grid),
        "au_deviation": au_deviation(grid),
    }
    paths = [_out_path(s, "spline.csv"), _out_path(s, "step.csv"), _out_path(s, "metadata.json")]
    spline.write_csv(paths[0])
    spline.step().write_csv(paths[1])
    _write_json(paths[2], meta)
    echo(f"omega={spline.omega} inside={count}/{len(grid)} fraction={meta['grid_fraction']:.6g}")
    return paths


def cmd_converge(s: Settings, echo) -> list[str]:
    if s.counterexample:
        return cmd_counterexample(s, echo)
    if not s.n_list:
        raise ConfigurationError("converge needs n_list")
    report = diagnostics.convergence_study(
        s.field, s.domain, s.rect, s.n_list, s.placement, s.seed, s.probes, s.oracle_res
    )
    paths = [_out_path(s, "convergence.csv"), _out_path(s, "convergence.json")]
    report.write_csv(paths[0])
    report.write_json(paths[1], include_runtime=s.timings)
    for rec in report.records:
        if rec.error:
            echo(f"n={rec.n} error: {rec.error}")
        else:
            echo(f"n={rec.n} omega={rec.omega} sup_error={rec.sup_error:.6g} ({rec.runtime:.3f}s)")
    return paths


def cmd_oracle(s: Settings, echo) -> list[str]:
    res = s.oracle_res or oracle.default_resolution(s.d)
    cdf = oracle.empirical_cdf(s.field, s.domain, res)
    y = np.asarray(diagnostics.DEFAULT_PROBES if s.probes is None else s.probes, dtype=np.float64)
    q = oracle.quantile_closed(cdf, y)
    paths = [_out_path(s, "cdf.csv"), _out_path(s, "quantile.csv")]
    cdf.write_csv(paths[0])
    oracle.write_quantiles_csv(paths[1], y, q)
    echo(f"resolution={res} inside={cdf.count} thresholds={cdf.thresholds.size}")
    return paths


def cmd_check(s: Settings, echo) -> list[str]:
    n = s.require_n()
    grid = Grid(GridSpec(s.rect, n, s.placement, s.seed))
    spline = RearrangementSpline(sample_sort(s.field, grid, s.domain))
    lo, hi = float(spline.values[0]), float(spline.values[-1])
    tests = [diagnostics.one] + diagnostics.hat_family(np.linspace(lo, hi, s.hat_count), s.hat_width)
    disc = diagnostics.equimeasurability_discrepancies(
        s.field, s.domain, spline, tests, s.quadrature_points
    )
    fraction, target, gap = diagnostics.grid_fraction_check(grid, s.domain)
    result = {
        "n": list(n),
        "omega": spline.omega,
        "equimeasurability": {
            "max_discrepancy": float(disc.max()),
            "hat_width": s.hat_width,
            "hat_count": s.hat_count,
            "quadrature_points": s.quadrature_points,
        },
        "grid_fraction": {"fraction": fraction, "target": target, "gap": gap},
        "riemann": None,
        "tolerance_note": diagnostics.TOLERANCE_NOTE,
    }
    if s.reference_integral is not None:
        err = diagnostics.riemann_sum_check(s.field, grid, s.rect, s.reference_integral)
        result["riemann"] = {"reference_integral": s.reference_integral, "error": err}
    path = _out_path(s, "check.json")
    _write_json(path, result)
    echo(f"equimeasurability={disc.max():.3g} fraction_gap={gap:.3g}"
         + ("" if result["riemann"] is None else f" riemann={result['riemann']['error']:.3g}"))
    return [path]


def cmd_counterexample(s: Settings, echo) -> list[str]:
    n_list = s.n_list or [MultiIndex((100,)), MultiIndex((10000,))]
    if s.d != 1:
        raise ConfigurationError("the counterexample is one-dimensional")
    field = s.field if "field" in s.raw else None
    report = diagnostics.dirichlet_counterexample(n_list, s.probes, field=field)
    paths = [_out_path(s, "counterexample.csv"), _out_path(s, "counterexample.json")]
    report.write_csv(paths[0])
    report.write_json(paths[1])
    for rec in report.records:
        echo(f"n={rec.n} max|f_n - 1|={rec.max_deviation_from_one:.3g} "
             f"gap={min(rec.gaps):.3g}..{max(rec.gaps):.3g}")
    echo("non-convergent at every probe" if report.fails_everywhere
         else f"non-convergent probes: {report.nonconvergent_probes}")
    return paths


COMMANDS = {
    "rearrange": cmd_rearrange,
    "converge": cmd_converge,
    "oracle": cmd_oracle,
    "check": cmd_check,
    "counterexample": cmd_counterexample,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--dimension", type=str)
    common.add_argument("--field", help="expression in x1..xd, or identity / dirichlet / constant(c)")
    common.add_argument("--domain", help="box, disk(...), annulus(...), lshape, union(...), expr:TEXT ...")
    common.add_argument("--lower", help="lower rectangle corner, comma separated")
    common.add_argument("--upper", help="upper rectangle corner, comma separated")
    common.add_argument("--n", help="grid size, e.g. 1000 or 256x256")
    common.add_argument("--n-list", dest="n_list", help="refinement list, e.g. '32x32;64x64' or 10,100,1000 in 1-d")
    common.add_argument("--placement", choices=["reference", "midpoint", "jittered", "corner"])
    common.add_argument("--seed")
    common.add_argument("--probes", help="comma-separated levels in [0, 1]")
    common.add_argument("--oracle-res", dest="oracle_res")
    common.add_argument("--reference-integral", dest="reference_integral")
    common.add_argument("--quadrature-points", dest="quadrature_points")
    common.add_argument("--counterexample", action="store_const", const="true", default=None)
    common.add_argument("--timings", action="store_const", const="true", default=None,
                        help="include runtimes in JSON summaries (breaks byte-identical output)")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="rearrange", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    echo = (lambda msg: None) if args.quiet else print
    try:
        raw = read_config(args.config) if args.config else {}
        for key in KEYS:
            value = getattr(args, key, None)
            if value is not None:
                raw[key] = value
        settings = Settings(raw)
        COMMANDS[args.command](settings, echo)
    except (ConfigurationError, RangeError) as exc:
        print(f"error: config: {_one_line(exc)}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"error: numerical: {_one_line(exc)}", file=sys.stderr)
        return 2
    except RearrangementError as exc:
        print(f"error: config: {_one_line(exc)}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: config: {_one_line(exc)}", file=sys.stderr)
        return 1
    return 0


def _one_line(exc) -> str:
    return " ".join(str(exc).split())


if __name__ == "__main__":
    sys.exit(main())
