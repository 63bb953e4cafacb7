"""Finite-n checks of the limit statements behind the construction.

* :func:`convergence_study` compares splines on a refinement sequence with the
  counting oracle (or a closed-form reference) at probe levels.
* :func:`equimeasurability_check` compares grid averages of F(f) with
  integrals of F applied to a rearrangement.
* :func:`riemann_sum_check` and :func:`grid_fraction_check` measure how far
  grid averages are from their integral limits.
* :func:`dirichlet_counterexample` shows the construction failing for a
  function that is discontinuous everywhere.

None of the tolerances used here come with a proven rate; they are
engineering choices.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson

from . import oracle
from .domain import RegularSet, estimate_measure, inside_mask, rectangle
from .errors import ConfigurationError, NumericalError, RangeError
from .expr import ScalarField
from .grid import Grid, GridSpec, Rectangle
from .multi_index import MultiIndex, product_count
from .rearrange import RearrangementSpline, in_domain_values, rearrange_pipeline

log = logging.getLogger(__name__)

DEFAULT_PROBES = tuple(k / 20 for k in range(1, 20))
ORACLE_FACTOR = 8
MONOTONE_SLACK = 1.5
TOLERANCE_NOTE = "tolerances are engineering choices; no convergence rate is claimed"


def _fmt(v) -> str:
    return format(float(v), ".17g")


@dataclass
class ConvergenceRecord:
    n: MultiIndex
    omega: int | None
    probes: list[tuple[float, float, float, float]] = field(default_factory=list)
    sup_error: float | None = None
    runtime: float = 0.0
    error: str | None = None


@dataclass
class ConvergenceReport:
    records: list[ConvergenceRecord]
    reference: str
    oracle_resolution: MultiIndex | None = None

    def sup_errors(self) -> list[float | None]:
        return [r.sup_error for r in self.records]

    def is_non_increasing(self, slack: float = MONOTONE_SLACK) -> bool:
        """Each sup error is at most ``slack`` times the previous one."""
        errs = [e for e in self.sup_errors() if e is not None]
        return all(b <= slack * a for a, b in zip(errs, errs[1:]))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "omega", "y", "spline", "reference", "abs_error"])
            for rec in self.records:
                for y, s, q, e in rec.probes:
                    w.writerow([str(rec.n), rec.omega, _fmt(y), _fmt(s), _fmt(q), _fmt(e)])

    def summary(self, include_runtime: bool = False) -> dict:
        out = {
            "reference": self.reference,
            "oracle_resolution": None if self.oracle_resolution is None else list(self.oracle_resolution),
            "tolerance_note": TOLERANCE_NOTE,
            "records": [],
        }
        for rec in self.records:
            item = {
                "n": list(rec.n),
                "omega": rec.omega,
                "sup_error": rec.sup_error,
                "error": rec.error,
            }
            if include_runtime:
                item["runtime_s"] = rec.runtime
            out["records"].append(item)
        return out

    def write_json(self, path, include_runtime: bool = False) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(include_runtime), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _probe_levels(probes) -> np.ndarray:
    y = np.asarray(DEFAULT_PROBES if probes is None else probes, dtype=np.float64).reshape(-1)
    if y.size == 0 or np.any((y < 0) | (y > 1)) or np.any(np.isnan(y)):
        raise RangeError("probe levels must lie in [0, 1]")
    return y


def _oracle_resolution(n_list, d: int, factor: int = ORACLE_FACTOR) -> MultiIndex:
    top = np.max(np.asarray([tuple(n) for n in n_list]), axis=0) * factor
    res = [int(v) for v in top]
    while product_count(res) > oracle.MAX_POINTS:
        res = [max(1, v * 3 // 4) for v in res]
    if [int(v) for v in top] != res:
        log.warning("oracle resolution capped at %s (requested %s)", res, list(top))
    return MultiIndex(res)


def convergence_study(f: ScalarField, region: RegularSet, rect: Rectangle, n_list: Sequence,
                      placement: str = "reference", seed: int | None = None, probes=None,
                      oracle_resolution=None, reference: Callable | None = None,
                      reference_label: str | None = None) -> ConvergenceReport:
    """Spline error at probe levels along a refinement sequence.

    The reference is the counting oracle on a midpoint grid ``ORACLE_FACTOR``
    times finer than the largest ``n`` unless ``reference`` (a vectorized
    callable on [0, 1]) is supplied. Probes at y = 0 use the oracle's lower
    limit. Numerical failures for one ``n`` are recorded and do not stop the
    study.
    """
    ns = [MultiIndex(n) for n in n_list]
    if not ns:
        raise ConfigurationError("n_list is empty")
    sizes = [product_count(n) for n in ns]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ConfigurationError("n_list must be strictly increasing in N(n)")
    y = _probe_levels(probes)

    resolution = None
    if reference is None:
        resolution = (
            _oracle_resolution(ns, region.d) if oracle_resolution is None else MultiIndex(oracle_resolution)
        )
        cdf = oracle.empirical_cdf(f, region, resolution)
        ref_values = np.asarray(oracle.quantile_closed(cdf, y), dtype=np.float64)
        label = reference_label or "oracle"
    else:
        ref_values = np.asarray(reference(y), dtype=np.float64).reshape(y.shape)
        label = reference_label or "closed_form"

    records = []
    for n in ns:
        t0 = time.perf_counter()
        rec = ConvergenceRecord(n=n, omega=None)
        try:
            spline = rearrange_pipeline(f, region, rect, n, placement, seed)
        except NumericalError as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
        else:
            values = spline(y)
            err = np.abs(values - ref_values)
            rec.omega = spline.omega
            rec.probes = [tuple(map(float, row)) for row in zip(y, values, ref_values, err)]
            rec.sup_error = float(err.max())
        rec.runtime = time.perf_counter() - t0
        records.append(rec)
    return ConvergenceReport(records, label, resolution)


def hat(center: float, width: float) -> Callable[[np.ndarray], np.ndarray]:
    """u -> max(0, 1 - |u - center| / width)."""
    if width <= 0:
        raise ConfigurationError(f"hat width must be positive, got {width}")

    def F(u):
        return np.maximum(0.0, 1.0 - np.abs(np.asarray(u) - center) / width)

    F.__name__ = f"hat({center}, {width})"
    return F


def hat_family(centers, width: float) -> list[Callable]:
    return [hat(float(c), width) for c in centers]


def one(u):
    return np.ones_like(np.asarray(u, dtype=np.float64))


def equimeasurability_discrepancies(f: ScalarField, region: RegularSet, rearrangement: Callable,
                                    test_functions, quadrature_points: int = 2048,
                                    grid: Grid | None = None) -> np.ndarray:
    """Per test function ``|mean_i F(f(x_i)) - int_0^1 F(g(y)) dy|``.

    The grid mean runs over the in-domain points of ``grid``; without a grid,
    ``rearrangement`` must be a :class:`RearrangementSpline` and its samples
    (the same multiset) are used. The integral is composite Simpson with
    ``quadrature_points`` subintervals (even, >= 2).
    """
    if quadrature_points < 2 or quadrature_points % 2:
        raise ConfigurationError(f"quadrature_points must be even and >= 2, got {quadrature_points}")
    if grid is not None:
        samples = in_domain_values(f, grid, region)
        if samples.size == 0:
            raise ConfigurationError("no grid points inside the domain")
    elif isinstance(rearrangement, RearrangementSpline):
        samples = rearrangement.values
    else:
        raise ConfigurationError("pass a grid unless the rearrangement is a RearrangementSpline")
    y = np.linspace(0.0, 1.0, quadrature_points + 1)
    g = np.asarray(rearrangement(y), dtype=np.float64)
    out = []
    for F in test_functions:
        lhs = float(np.mean(F(samples)))
        rhs = float(simpson(F(g), x=y))
        out.append(abs(lhs - rhs))
    return np.asarray(out)


def equimeasurability_check(f: ScalarField, region: RegularSet, rearrangement: Callable,
                            test_functions, quadrature_points: int = 2048,
                            grid: Grid | None = None) -> float:
    """Largest discrepancy over ``test_functions``; see :func:`equimeasurability_discrepancies`."""
    return float(np.max(equimeasurability_discrepancies(
        f, region, rearrangement, test_functions, quadrature_points, grid)))


def riemann_sum_check(f: ScalarField, grid: Grid, rect: Rectangle, reference_integral: float) -> float:
    """|(1/N) sum_i f(x_i) - reference_integral / volume(rect)| over all grid points."""
    total = 0.0
    for _, pts in grid.chunks():
        total += float(np.sum(f(pts)))
    return abs(total / len(grid) - reference_integral / rect.volume)


def grid_fraction_check(grid: Grid, region: RegularSet) -> tuple[float, float, float]:
    """(#I_n / N(n), mu(region) / mu(rect), gap)."""
    fraction = float(inside_mask(grid, region).sum()) / len(grid)
    if region.exact_measure is not None:
        measure = region.exact_measure
    else:
        measure = estimate_measure(region, MultiIndex(4 * v for v in grid.n))
    target = measure / grid.rect.volume
    return fraction, target, abs(fraction - target)


@dataclass
class CounterexampleRecord:
    n: MultiIndex
    omega: int
    max_deviation_from_one: float
    gaps: list[float]
    equimeasurability: float


@dataclass
class CounterexampleReport:
    field: str
    reference_value: float
    probes: list[float]
    records: list[CounterexampleRecord]
    tolerance: float

    @property
    def nonconvergent_probes(self) -> list[float]:
        """Probes whose gap to the reference never drops below the tolerance."""
        return [y for k, y in enumerate(self.probes)
                if all(rec.gaps[k] > self.tolerance for rec in self.records)]

    @property
    def fails_everywhere(self) -> bool:
        return len(self.nonconvergent_probes) == len(self.probes)

    def summary(self) -> dict:
        return {
            "field": self.field,
            "reference_value": self.reference_value,
            "probes": self.probes,
            "tolerance": self.tolerance,
            "tolerance_note": TOLERANCE_NOTE,
            "nonconvergent_probes": self.nonconvergent_probes,
            "fails_everywhere": self.fails_everywhere,
            "records": [
                {
                    "n": list(rec.n),
                    "omega": rec.omega,
                    "max_deviation_from_one": rec.max_deviation_from_one,
                    "max_gap": max(rec.gaps),
                    "min_gap": min(rec.gaps),
                    "equimeasurability": rec.equimeasurability,
                }
                for rec in self.records
            ],
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "omega", "y", "gap"])
            for rec in self.records:
                for y, g in zip(self.probes, rec.gaps):
                    w.writerow([str(rec.n), rec.omega, _fmt(y), _fmt(g)])

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def dirichlet_counterexample(n_list=(100, 10000), probes=None, field: ScalarField | None = None,
                             reference_value: float | None = None,
                             tolerance: float = 0.5) -> CounterexampleReport:
    """Rearrange the rational-indicator marker on [0, 1] with reference grids i/n.

    The samples are all 1, so every spline is identically 1, while the
    function is 0 almost everywhere and its rearrangement is identically 0.
    ``field`` swaps in another 1-d field (e.g. a constant 0 control).
    """
    field = ScalarField.dirichlet_marker(1) if field is None else field
    if reference_value is None:
        reference_value = field.ae_value if field.ae_value is not None else 0.0
    y = _probe_levels(probes)
    unit = Rectangle((0.0,), (1.0,))
    region = rectangle((0.0,), (1.0,), label="[0, 1]")
    Fs = [hat(reference_value, 0.5)]
    records = []
    for n in n_list:
        n = MultiIndex(n)
        grid = Grid(GridSpec(unit, n, "reference"))
        spline = rearrange_pipeline(field, region, unit, n, "reference")
        values = spline(y)
        ref_fn = lambda t: np.full(np.shape(t), reference_value)  # noqa: E731
        records.append(CounterexampleRecord(
            n=n,
            omega=spline.omega,
            # the spline is piecewise linear, so its extremes are at the knots
            max_deviation_from_one=float(np.max(np.abs(spline.values - 1.0))),
            gaps=[float(v) for v in np.abs(values - reference_value)],
            equimeasurability=equimeasurability_check(field, region, ref_fn, Fs, 2048, grid=grid),
        ))
    return CounterexampleReport(field.label, float(reference_value), [float(v) for v in y],
                                records, tolerance)
