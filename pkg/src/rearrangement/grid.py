"""Rectangles, standard partitions and asymptotically uniform grids.

A grid on ``[a, b]`` with ``n`` points per axis has one point per cell of the
uniform partition. The reference node of cell ``i`` is its upper corner
``a + i (b - a) / n``; the other placements move the point inside the same
closed cell, so every generated grid is subordinate to a standard partition.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

from . import kernels
from .errors import ConfigurationError, InvalidIndexError
from .multi_index import IndexRange, MultiIndex, ones, product_count

PLACEMENTS = ("reference", "midpoint", "jittered", "corner")
JITTER_RHO = 0.9


def _as_point(x) -> tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1:
        raise ConfigurationError(f"expected a point, got shape {arr.shape}")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class Rectangle:
    """The closed box ``[a, b]`` in R^d."""

    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self):
        a, b = _as_point(self.a), _as_point(self.b)
        if len(a) != len(b):
            raise ConfigurationError(f"corner dimensions differ: {len(a)} vs {len(b)}")
        if not all(np.isfinite(a + b)):
            raise ConfigurationError("rectangle corners must be finite")
        if any(lo > hi for lo, hi in zip(a, b)):
            raise ConfigurationError(f"need a <= b componentwise, got a={a}, b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def unit(cls, d: int) -> "Rectangle":
        return cls((0.0,) * d, (1.0,) * d)

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.b) - np.asarray(self.a)

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def contains(self, points) -> np.ndarray:
        """Closed-box membership for an ``(N, d)`` array of points."""
        pts = np.atleast_2d(points)
        return np.all((pts >= np.asarray(self.a)) & (pts <= np.asarray(self.b)), axis=1)

    def includes(self, other: "Rectangle") -> bool:
        return all(a1 <= a2 for a1, a2 in zip(self.a, other.a)) and all(
            b2 <= b1 for b1, b2 in zip(self.b, other.b)
        )


def _lower(rect: Rectangle, n, idx) -> np.ndarray:
    """Lower cell corners a + (i - 1)(b - a)/n for 1-based ``idx`` of shape (N, d)."""
    return np.asarray(rect.a) + ((idx - 1) * rect.widths) / np.asarray(n)


def _upper(rect: Rectangle, n, idx) -> np.ndarray:
    return np.asarray(rect.a) + (idx * rect.widths) / np.asarray(n)


def _check_index(rect: Rectangle, n) -> MultiIndex:
    n = MultiIndex(n)
    product_count(n)
    if len(n) != rect.d:
        raise ConfigurationError(f"n has {len(n)} entries but the rectangle is {rect.d}-dimensional")
    return n


def cell(rect: Rectangle, n, i) -> Rectangle:
    """Closed cell ``[a + (i-1)(b-a)/n, a + i(b-a)/n]`` of the uniform partition.

    As a member of the standard partition the cell owns its upper faces, and
    its lower faces only where it touches the lower faces of ``rect``; see
    :func:`cell_of`.
    """
    n = _check_index(rect, n)
    i = MultiIndex(i)
    if len(i) != len(n) or i not in IndexRange(ones(len(n)), n):
        raise InvalidIndexError(f"cell index {tuple(i)} outside 1..{tuple(n)}")
    idx = np.asarray(i, dtype=np.int64)[None, :]
    return Rectangle(_lower(rect, n, idx)[0], _upper(rect, n, idx)[0])


def cell_of(rect: Rectangle, n, x) -> MultiIndex:
    """Index of the standard-partition cell that contains ``x``.

    Cells are ``(lo, hi]`` per coordinate, except the first one, which is
    ``[a_j, hi]``.
    """
    n = _check_index(rect, n)
    x = np.asarray(_as_point(x))
    if len(x) != rect.d or not rect.contains(x[None, :])[0]:
        raise InvalidIndexError(f"point {tuple(x)} is not in the rectangle")
    out = []
    for j, nj in enumerate(n):
        k = np.arange(1, nj + 1)
        upper = rect.a[j] + (k * (rect.b[j] - rect.a[j])) / nj
        # first k with x_j <= upper_k
        out.append(int(np.searchsorted(upper, x[j], side="left")) + 1)
    return MultiIndex(out)


@dataclass(frozen=True)
class GridSpec:
    rect: Rectangle
    n: MultiIndex
    placement: str = "reference"
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "n", _check_index(self.rect, self.n))
        if self.placement not in PLACEMENTS and self.placement != "custom":
            raise ConfigurationError(
                f"unknown placement {self.placement!r}; expected one of {', '.join(PLACEMENTS)}"
            )
        if self.placement == "jittered":
            if self.seed is None:
                raise ConfigurationError("jittered placement requires a seed")
            seed = int(self.seed)
            if not -(1 << 63) <= seed < (1 << 64):
                raise ConfigurationError(f"seed {seed} does not fit in 64 bits")
            object.__setattr__(self, "seed", seed)

    @property
    def d(self) -> int:
        return self.rect.d

    @property
    def size(self) -> int:
        return product_count(self.n)

    def digest(self) -> str:
        text = f"{self.rect.a!r}|{self.rect.b!r}|{tuple(self.n)!r}|{self.placement}|{self.seed!r}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def grid_indices(n, start: int = 0, stop: int | None = None) -> np.ndarray:
    """1-based multi-indices at lexicographic positions ``start:stop``."""
    n = tuple(n)
    stop = product_count(n) if stop is None else stop
    flat = np.arange(start, stop, dtype=np.int64)
    return np.stack(np.unravel_index(flat, n), axis=1).astype(np.int64) + 1


def grid_points(spec: GridSpec, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Points of the grid at lexicographic positions ``start:stop`` as an (N, d) array."""
    stop = spec.size if stop is None else stop
    idx = grid_indices(spec.n, start, stop)
    rect, n = spec.rect, np.asarray(spec.n)
    if spec.placement == "reference":
        return _upper(rect, n, idx)
    if spec.placement == "corner":
        return _lower(rect, n, idx)
    centers = np.asarray(rect.a) + ((idx - 0.5) * rect.widths) / n
    if spec.placement == "midpoint":
        return centers
    if spec.placement == "jittered":
        half = JITTER_RHO * 0.5 * (rect.widths / n)
        unit = kernels.jitter_unit(spec.seed, start, stop - start, spec.d)
        return centers + unit * half
    raise ConfigurationError(f"cannot generate points for placement {spec.placement!r}")


@dataclass(frozen=True)
class Grid:
    """N(n) points in lexicographic index order.

    Points are computed lazily; large grids can be traversed with
    :meth:`chunks` without materializing the full array.
    """

    spec: GridSpec
    explicit_points: np.ndarray | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_points(cls, rect: Rectangle, n, points) -> "Grid":
        """Wrap an arbitrary point sequence (for analysis, e.g. :func:`au_deviation`)."""
        spec = GridSpec(rect, MultiIndex(n), "custom")
        pts = np.asarray(points, dtype=np.float64)
        if pts.shape != (spec.size, spec.d):
            raise ConfigurationError(f"expected {(spec.size, spec.d)} points, got {pts.shape}")
        return cls(spec, pts)

    @property
    def rect(self) -> Rectangle:
        return self.spec.rect

    @property
    def n(self) -> MultiIndex:
        return self.spec.n

    @property
    def d(self) -> int:
        return self.spec.d

    def __len__(self) -> int:
        return self.spec.size

    @cached_property
    def points(self) -> np.ndarray:
        if self.explicit_points is not None:
            return self.explicit_points
        pts = grid_points(self.spec)
        pts.setflags(write=False)
        return pts

    @cached_property
    def indices(self) -> np.ndarray:
        return grid_indices(self.spec.n)

    def chunks(self, size: int = 1 << 20) -> Iterator[tuple[int, np.ndarray]]:
        """Yield ``(start, points)`` blocks of at most ``size`` points."""
        total = len(self)
        for start in range(0, total, size):
            stop = min(start + size, total)
            if self.explicit_points is not None or "points" in self.__dict__:
                yield start, self.points[start:stop]
            else:
                yield start, grid_points(self.spec, start, stop)


def generate(spec: GridSpec) -> Grid:
    return Grid(spec)


def au_deviation(grid: Grid) -> float:
    """Max-norm distance between grid points and the reference nodes a + i(b-a)/n."""
    worst = 0.0
    for start, pts in grid.chunks():
        idx = grid_indices(grid.n, start, start + len(pts))
        ref = _upper(grid.rect, np.asarray(grid.n), idx)
        worst = max(worst, float(np.max(np.abs(pts - ref))))
    return worst


def cells_containing(grid: Grid) -> np.ndarray:
    """Boolean mask: does each point lie in its own closed cell?"""
    idx = grid.indices
    lo = _lower(grid.rect, np.asarray(grid.n), idx)
    hi = _upper(grid.rect, np.asarray(grid.n), idx)
    pts = grid.points
    return np.all((pts >= lo) & (pts <= hi), axis=1)


def write_grid_csv(grid: Grid, path) -> None:
    d = grid.d
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"i_{j + 1}" for j in range(d)] + [f"x_{j + 1}" for j in range(d)])
        for start, pts in grid.chunks():
            idx = grid_indices(grid.n, start, start + len(pts))
            for row_i, row_x in zip(idx, pts):
                w.writerow([int(v) for v in row_i] + [format(float(v), ".17g") for v in row_x])

