"""Brute-force reference for the quantile function.

Counts how many midpoint-grid points of the domain satisfy ``f <= u`` to
tabulate the distribution function F, then inverts it directly as
``inf{u : F(u) >= y}``. No splines or interpolation are involved, so this
path is independent of :mod:`rearrangement.rearrange`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .domain import RegularSet, chunk_mask, require_samples
from .errors import ConfigurationError, RangeError
from .expr import ScalarField
from .grid import Grid, GridSpec
from .multi_index import MultiIndex

DEFAULT_PER_DIM = 4096
MAX_POINTS = 1 << 24


def default_resolution(d: int, per_dim: int = DEFAULT_PER_DIM) -> MultiIndex:
    """``per_dim`` points per axis, shrunk until the total fits in 2^24."""
    per_dim = max(1, int(per_dim))
    while per_dim > 1 and per_dim**d > MAX_POINTS:
        per_dim -= 1
    return MultiIndex((per_dim,) * d)


@dataclass(frozen=True)
class DistributionEstimate:
    thresholds: np.ndarray
    values: np.ndarray
    resolution: MultiIndex | None = None
    count: int = 0

    def __post_init__(self):
        u = np.array(self.thresholds, dtype=np.float64).reshape(-1)
        F = np.array(self.values, dtype=np.float64).reshape(-1)
        if u.size == 0 or u.shape != F.shape:
            raise ConfigurationError("thresholds and values must be non-empty and of equal length")
        if np.any(np.diff(u) <= 0):
            raise ConfigurationError("thresholds must be strictly increasing")
        if np.any(np.diff(F) < 0) or F[0] < 0 or F[-1] != 1.0:
            raise ConfigurationError("values must be non-decreasing in [0, 1] and end at 1")
        u.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "thresholds", u)
        object.__setattr__(self, "values", F)

    def __call__(self, u) -> np.ndarray:
        """F at arbitrary ``u`` (right-continuous step interpolation of the table)."""
        u = np.asarray(u, dtype=np.float64)
        k = np.searchsorted(self.thresholds, u, side="right") - 1
        return np.where(k >= 0, self.values[np.clip(k, 0, None)], 0.0)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "F"])
            for u, F in zip(self.thresholds, self.values):
                w.writerow([format(float(u), ".17g"), format(float(F), ".17g")])


def counting_values(f: ScalarField, region: RegularSet, resolution) -> np.ndarray:
    """Sorted values of f on the midpoint grid of ``region.bounding`` restricted to the region."""
    resolution = MultiIndex(resolution)
    if len(resolution) != region.d or f.d != region.d:
        raise ConfigurationError(
            f"dimension mismatch: field {f.d}, domain {region.d}, resolution {len(resolution)}"
        )
    grid = Grid(GridSpec(region.bounding, resolution, "midpoint"))
    parts = []
    for _, pts in grid.chunks():
        sel = chunk_mask(grid, region, pts)
        if sel.any():
            parts.append(f(pts[sel]))
    values = np.concatenate(parts) if parts else np.zeros(0)
    require_samples(values.size, region.label, minimum=1)
    values.sort()
    return values


def tabulate(values: np.ndarray, thresholds=None, resolution=None) -> DistributionEstimate:
    """Tabulate F from already-sorted samples; thresholds default to the distinct values."""
    values = np.asarray(values, dtype=np.float64)
    if thresholds is None:
        u = np.unique(values)
    else:
        u = np.asarray(thresholds, dtype=np.float64).reshape(-1)
        if u.size == 0 or np.any(np.diff(u) <= 0):
            raise ConfigurationError("thresholds must be strictly increasing")
        if u[0] > values[0] or u[-1] < values[-1]:
            raise ConfigurationError(
                f"thresholds [{u[0]}, {u[-1]}] do not cover the sampled range [{values[0]}, {values[-1]}]"
            )
    counts = np.searchsorted(values, u, side="right")
    return DistributionEstimate(u, counts / values.size, resolution, int(values.size))


def empirical_cdf(f: ScalarField, region: RegularSet, resolution, thresholds=None) -> DistributionEstimate:
    """F(u_k) = #{midpoint points in the region with f <= u_k} / #{midpoint points in the region}."""
    resolution = MultiIndex(resolution)
    return tabulate(counting_values(f, region, resolution), thresholds, resolution)


def _y_array(y, allow_zero=False):
    arr = np.asarray(y, dtype=np.float64)
    flat = arr.reshape(-1)
    lo_ok = flat >= 0.0 if allow_zero else flat > 0.0
    ok = lo_ok & (flat <= 1.0)
    if not ok.all():
        interval = "[0, 1]" if allow_zero else "(0, 1]"
        raise RangeError(f"quantile level {flat[~ok][0]!r} is outside {interval}")
    return arr, flat


def generalized_inverse(cdf: DistributionEstimate, y):
    """Smallest tabulated threshold u_k with F(u_k) >= y, for y in (0, 1]."""
    arr, flat = _y_array(y)
    k = kernels.inverse_cdf(cdf.values, flat)
    out = cdf.thresholds[k]
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def lower_limit(cdf: DistributionEstimate) -> float:
    """Limit of the generalized inverse as y -> 0+: the first threshold carrying mass."""
    k = int(np.flatnonzero(cdf.values > 0)[0])
    return float(cdf.thresholds[k])


def quantile_closed(cdf: DistributionEstimate, y):
    """Like :func:`generalized_inverse` but also defined at y = 0 via the lower limit."""
    arr, flat = _y_array(y, allow_zero=True)
    out = np.empty_like(flat)
    zero = flat == 0.0
    out[zero] = lower_limit(cdf) if zero.any() else 0.0
    if (~zero).any():
        out[~zero] = cdf.thresholds[kernels.inverse_cdf(cdf.values, flat[~zero])]
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def oracle_quantile(f: ScalarField, region: RegularSet, y, resolution=None):
    """Quantile of f at level(s) y in (0, 1] by direct counting."""
    resolution = default_resolution(region.d) if resolution is None else MultiIndex(resolution)
    _y_array(y)
    return generalized_inverse(empirical_cdf(f, region, resolution), y)


def write_quantiles_csv(path, y, q) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y", "quantile"])
        for yy, qq in zip(np.reshape(y, -1), np.reshape(q, -1)):
            w.writerow([format(float(yy), ".17g"), format(float(qq), ".17g")])

