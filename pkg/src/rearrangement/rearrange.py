"""Monotone rearrangement from sorted grid samples.

Sample f at the grid points that fall in the domain, sort the values into
``s_0 <= ... <= s_omega`` and interpolate them linearly over the nodes
``0, 1/omega, ..., 1``. The result :class:`RearrangementSpline` converges to
the quantile function of f as the grid is refined, for a.e.-continuous f on
a regular set. :class:`StepRearrangement` is the companion step function
taking the value ``s_i`` on ``(i/(omega+1), (i+1)/(omega+1)]``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .domain import RegularSet, chunk_mask, require_samples
from .errors import ConfigurationError, RangeError
from .expr import ScalarField
from .grid import Grid, GridSpec, Rectangle, generate
from .multi_index import MultiIndex


@dataclass(frozen=True)
class SampleVector:
    values: np.ndarray
    provenance: tuple[str, str] = ("", "")

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if v.size < 2:
            require_samples(v.size, self.provenance[1] or "samples")
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("sample values must be finite")
        if np.any(np.diff(v) < 0):
            raise ConfigurationError("sample values must be non-decreasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def omega(self) -> int:
        return self.values.size - 1

    @classmethod
    def from_unsorted(cls, values, provenance=("", "")) -> "SampleVector":
        return cls(np.sort(np.asarray(values, dtype=np.float64), kind="stable"), provenance)


def _probe_array(y) -> tuple[np.ndarray, bool]:
    arr = np.asarray(y, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = arr.reshape(-1)
    if not np.all((flat >= 0.0) & (flat <= 1.0)):
        bad = flat[~((flat >= 0.0) & (flat <= 1.0))][0]
        raise RangeError(f"evaluation point {bad!r} is outside [0, 1]")
    return flat, scalar


class _Rearrangement:
    def __init__(self, samples: SampleVector):
        if not isinstance(samples, SampleVector):
            samples = SampleVector(samples)
        self.samples = samples

    @property
    def omega(self) -> int:
        return self.samples.omega

    @property
    def values(self) -> np.ndarray:
        return self.samples.values

    def __call__(self, y, backend=None):
        flat, scalar = _probe_array(y)
        out = self._kernel(self.samples.values, flat, backend=backend)
        return float(out[0]) if scalar else out.reshape(np.shape(y))


class RearrangementSpline(_Rearrangement):
    """Continuous piecewise-linear, non-decreasing interpolant on [0, 1]."""

    _kernel = staticmethod(kernels.spline_eval)

    def nodes(self) -> np.ndarray:
        return np.arange(self.omega + 1, dtype=np.float64) / self.omega

    def step(self) -> "StepRearrangement":
        return StepRearrangement(self.samples)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["l", "y", "s"])
            for ell, (y, s) in enumerate(zip(self.nodes(), self.values)):
                w.writerow([ell, _fmt(y), _fmt(s)])


class StepRearrangement(_Rearrangement):
    """Left-continuous step function; value s_0 at y = 0."""

    _kernel = staticmethod(kernels.step_eval)

    def write_csv(self, path) -> None:
        m = self.omega + 1
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["i", "y_lo", "y_hi", "s"])
            for i, s in enumerate(self.values):
                w.writerow([i, _fmt(i / m), _fmt((i + 1) / m), _fmt(s)])


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def eval_spline(spline: RearrangementSpline, y):
    return spline(y)


def eval_step(step: StepRearrangement, y):
    return step(y)


def in_domain_values(f: ScalarField, grid: Grid, region: RegularSet) -> np.ndarray:
    """f at the grid points inside the region, in lexicographic index order."""
    if f.d != grid.d:
        raise ConfigurationError(f"field is {f.d}-dimensional but the grid is {grid.d}-dimensional")
    parts = []
    for _, pts in grid.chunks():
        sel = chunk_mask(grid, region, pts)
        if sel.any():
            parts.append(f(pts[sel]))
    return np.concatenate(parts) if parts else np.zeros(0)


def sample_sort(f: ScalarField, grid: Grid, region: RegularSet) -> SampleVector:
    values = in_domain_values(f, grid, region)
    require_samples(values.size, region.label)
    return SampleVector.from_unsorted(values, (grid.spec.digest(), region.label))


def rearrange_pipeline(f: ScalarField, region: RegularSet, rect: Rectangle, n,
                       placement: str = "reference", seed: int | None = None) -> RearrangementSpline:
    """Grid -> in-domain samples -> sort -> spline."""
    grid = generate(GridSpec(rect, MultiIndex(n), placement, seed))
    return RearrangementSpline(sample_sort(f, grid, region))
