"""Regular sets: bounded domains with a membership predicate.

A :class:`RegularSet` carries a bounding rectangle, a vectorized indicator
``(N, d) -> bool`` and, when known, its exact measure. Built-in sets use
closed-set conventions on their boundary. Connectivity is declared metadata,
never computed.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, InsufficientSamplesError
from .expr import evaluate_many, parse, to_text
from .grid import Grid, GridSpec, Rectangle
from .multi_index import MultiIndex, product_count

Indicator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RegularSet:
    bounding: Rectangle
    indicator: Indicator
    exact_measure: float | None = None
    label: str = "set"
    connected: bool = False

    def __post_init__(self):
        if self.exact_measure is not None:
            m = float(self.exact_measure)
            if not 0 < m <= self.bounding.volume * (1 + 1e-12):
                raise ConfigurationError(
                    f"exact measure {m} of {self.label!r} not in (0, {self.bounding.volume}]"
                )
            object.__setattr__(self, "exact_measure", m)

    @property
    def d(self) -> int:
        return self.bounding.d

    def mask(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.d:
            raise ConfigurationError(
                f"{self.label!r} is {self.d}-dimensional, got points of shape {pts.shape}"
            )
        out = np.asarray(self.indicator(pts), dtype=bool)
        if out.shape != (pts.shape[0],):
            raise ConfigurationError(f"indicator of {self.label!r} returned shape {out.shape}")
        return out

    def contains(self, x) -> bool:
        point = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return bool(self.mask(point.reshape(1, -1))[0])

    def measure(self, resolution=None) -> float:
        """Exact measure when declared, else a midpoint-count estimate."""
        if self.exact_measure is not None:
            return self.exact_measure
        if resolution is None:
            resolution = (max(2, int(2 ** (22 / self.d))),) * self.d
        return estimate_measure(self, resolution)


def contains(region: RegularSet, x) -> bool:
    return region.contains(x)


def inside_mask(grid: Grid, region: RegularSet) -> np.ndarray:
    """Membership of every grid point, in lexicographic order."""
    parts = [chunk_mask(grid, region, pts) for _, pts in grid.chunks()]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=bool)


def chunk_mask(grid: Grid, region: RegularSet, pts: np.ndarray) -> np.ndarray:
    """Membership of a block of ``grid``'s points; checks that inside points lie in the grid rectangle."""
    if grid.d != region.d:
        raise ConfigurationError(
            f"grid is {grid.d}-dimensional but {region.label!r} is {region.d}-dimensional"
        )
    inside = region.mask(pts)
    if inside.any() and not grid.rect.contains(pts[inside]).all():
        raise ConfigurationError(f"{region.label!r} has sampled points outside the grid rectangle")
    return inside


def indices_in(grid: Grid, region: RegularSet) -> np.ndarray:
    """The 1-based indices i with x_i in the region, as a (k, d) array in lexicographic order."""
    return grid.indices[inside_mask(grid, region)]


def estimate_measure(region: RegularSet, resolution) -> float:
    """volume(bounding) times the fraction of midpoint-grid points inside."""
    resolution = MultiIndex(resolution)
    spec = GridSpec(region.bounding, resolution, "midpoint")
    count = int(inside_mask(Grid(spec), region).sum())
    return region.bounding.volume * count / product_count(resolution)


def require_samples(count: int, label: str, minimum: int = 2) -> None:
    if count < minimum:
        raise InsufficientSamplesError(
            f"{label!r}: {count} grid point(s) inside the domain, need at least {minimum}"
        )


# --- built-in sets ----------------------------------------------------------


def ball_volume(d: int, r: float) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * r**d


def rectangle(a, b, label=None) -> RegularSet:
    rect = Rectangle(tuple(a), tuple(b))
    lo, hi = np.asarray(rect.a), np.asarray(rect.b)

    def indicator(X):
        return np.all((X >= lo) & (X <= hi), axis=1)

    vol = rect.volume
    return RegularSet(rect, indicator, vol if vol > 0 else None,
                      label or f"rectangle({rect.a}, {rect.b})", connected=True)


def disk(center, radius: float, label=None) -> RegularSet:
    """Closed ball ``{|x - c|_2 <= r}``."""
    c = np.asarray(center, dtype=np.float64).reshape(-1)
    r = float(radius)
    if r <= 0:
        raise ConfigurationError(f"radius must be positive, got {r}")
    d = c.shape[0]
    r2 = r * r

    def indicator(X):
        return np.sum((X - c) ** 2, axis=1) <= r2

    return RegularSet(Rectangle(tuple(c - r), tuple(c + r)), indicator, ball_volume(d, r),
                      label or f"disk({tuple(c)}, {r})", connected=True)


def annulus(center, r_inner: float, r_outer: float, label=None) -> RegularSet:
    """Closed shell ``{r_inner <= |x - c|_2 <= r_outer}``."""
    c = np.asarray(center, dtype=np.float64).reshape(-1)
    r0, r1 = float(r_inner), float(r_outer)
    if not 0 <= r0 < r1:
        raise ConfigurationError(f"need 0 <= r_inner < r_outer, got {r0}, {r1}")
    d = c.shape[0]

    def indicator(X):
        s = np.sum((X - c) ** 2, axis=1)
        return (s >= r0 * r0) & (s <= r1 * r1)

    return RegularSet(Rectangle(tuple(c - r1), tuple(c + r1)), indicator,
                      ball_volume(d, r1) - ball_volume(d, r0),
                      label or f"annulus({tuple(c)}, {r0}, {r1})", connected=d >= 2)


def l_shape(origin=(0.0, 0.0), size: float = 1.0, cut: float = 0.5, label=None) -> RegularSet:
    """The square ``origin + [0, size]^2`` minus its open upper-right corner block.

    Closed: ``{x in square : x1 - o1 <= cut or x2 - o2 <= cut}``.
    """
    o = np.asarray(origin, dtype=np.float64).reshape(2)
    size, cut = float(size), float(cut)
    if not 0 < cut < size:
        raise ConfigurationError(f"need 0 < cut < size, got cut={cut}, size={size}")

    def indicator(X):
        u = X - o
        in_square = np.all((u >= 0) & (u <= size), axis=1)
        return in_square & ((u[:, 0] <= cut) | (u[:, 1] <= cut))

    measure = size * size - (size - cut) ** 2
    return RegularSet(Rectangle(tuple(o), tuple(o + size)), indicator, measure,
                      label or "l_shape", connected=True)


def _hull(rects):
    a = np.min([r.a for r in rects], axis=0)
    b = np.max([r.b for r in rects], axis=0)
    return Rectangle(tuple(a), tuple(b))


def _check_dims(sets):
    if len({s.d for s in sets}) != 1:
        raise ConfigurationError("cannot combine sets of different dimensions")


def union(*sets: RegularSet) -> RegularSet:
    _check_dims(sets)

    def indicator(X):
        out = np.zeros(X.shape[0], dtype=bool)
        for s in sets:
            out |= s.mask(X)
        return out

    return RegularSet(_hull([s.bounding for s in sets]), indicator, None,
                      "union(" + ", ".join(s.label for s in sets) + ")")


def intersection(*sets: RegularSet) -> RegularSet:
    _check_dims(sets)
    a = np.max([s.bounding.a for s in sets], axis=0)
    b = np.min([s.bounding.b for s in sets], axis=0)
    if np.any(a > b):
        raise ConfigurationError("intersection has empty bounding box")

    def indicator(X):
        out = np.ones(X.shape[0], dtype=bool)
        for s in sets:
            out &= s.mask(X)
        return out

    return RegularSet(Rectangle(tuple(a), tuple(b)), indicator, None,
                      "intersection(" + ", ".join(s.label for s in sets) + ")")


def difference(base: RegularSet, *removed: RegularSet) -> RegularSet:
    _check_dims((base,) + removed)

    def indicator(X):
        out = base.mask(X).copy()
        for s in removed:
            out &= ~s.mask(X)
        return out

    return RegularSet(base.bounding, indicator, None,
                      "difference(" + ", ".join(s.label for s in (base,) + removed) + ")")


def from_expression(text: str, bounding: Rectangle, label=None) -> RegularSet:
    """Domain ``{x in bounding : expr(x) > 0}``."""
    ast = parse(text, bounding.d)
    lo, hi = np.asarray(bounding.a), np.asarray(bounding.b)
    d = bounding.d

    def indicator(X):
        in_box = np.all((X >= lo) & (X <= hi), axis=1)
        out = np.zeros(X.shape[0], dtype=bool)
        if in_box.any():
            out[in_box] = evaluate_many(ast, X[in_box], d) > 0
        return out

    return RegularSet(bounding, indicator, None, label or f"expr:{to_text(ast)}")


# --- config text -------------------------------------------------------------

_DOMAIN_TOKEN = re.compile(r"\s*(?:(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[(),]))")


def domain_from_text(text: str, bounding: Rectangle) -> RegularSet:
    """Parse a domain description.

    Forms: ``box`` (the bounding rectangle itself), ``rectangle(a1..ad, b1..bd)``,
    ``disk(c1..cd, r)``, ``annulus(c1..cd, r_in, r_out)``,
    ``lshape`` / ``lshape(o1, o2, size, cut)``, ``union(A, B, ...)``,
    ``intersection(A, B, ...)``, ``difference(A, B, ...)`` and
    ``expr:TEXT`` (inside where TEXT evaluates to a positive number).
    """
    text = text.strip()
    if text.startswith("expr:"):
        return from_expression(text[5:], bounding)
    tokens = []
    pos = 0
    while pos < len(text):
        if not text[pos:].strip():
            break
        m = _DOMAIN_TOKEN.match(text, pos)
        if m is None:
            raise ConfigurationError(f"cannot parse domain {text!r} at position {pos}")
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    k = 0

    def node():
        nonlocal k
        kind, val, p = tokens[k]
        k += 1
        if kind == "num":
            return float(val)
        if kind != "name":
            raise ConfigurationError(f"domain {text!r}: unexpected {val or 'end'!r} at position {p}")
        args = []
        if tokens[k][1] == "(":
            k += 1
            while True:
                args.append(node())
                kind2, val2, p2 = tokens[k]
                k += 1
                if val2 == ")":
                    break
                if val2 != ",":
                    raise ConfigurationError(f"domain {text!r}: expected ',' or ')' at position {p2}")
        return _build(val, args, bounding)

    result = node()
    if tokens[k][0] != "end":
        raise ConfigurationError(f"domain {text!r}: trailing input at position {tokens[k][2]}")
    if not isinstance(result, RegularSet):
        raise ConfigurationError(f"domain {text!r} is a number, not a set")
    return result


def _build(name, args, bounding):
    d = bounding.d
    nums = [a for a in args if not isinstance(a, RegularSet)]
    sets = [a for a in args if isinstance(a, RegularSet)]

    def need(count):
        if sets or len(nums) != count:
            raise ConfigurationError(f"{name} in dimension {d} takes {count} numbers, got {len(args)} arguments")

    if name == "box":
        if args:
            raise ConfigurationError("box takes no arguments")
        return rectangle(bounding.a, bounding.b, label="box")
    if name == "rectangle":
        need(2 * d)
        return rectangle(nums[:d], nums[d:])
    if name == "disk":
        need(d + 1)
        return disk(nums[:d], nums[d])
    if name == "annulus":
        need(d + 2)
        return annulus(nums[:d], nums[d], nums[d + 1])
    if name == "lshape":
        if d != 2:
            raise ConfigurationError("lshape is two-dimensional")
        if not args:
            return l_shape()
        need(4)
        return l_shape(nums[:2], nums[2], nums[3])
    if name in ("union", "intersection", "difference"):
        if nums or len(sets) < 2:
            raise ConfigurationError(f"{name} takes at least two sets")
        return {"union": union, "intersection": intersection, "difference": difference}[name](*sets)
    raise ConfigurationError(f"unknown domain {name!r}")
