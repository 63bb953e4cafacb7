"""Multi-indices, lexicographic index ranges and the product count N(n).

Indices are 1-based throughout, so a grid with ``n = (n_1, ..., n_d)`` is
indexed by ``i = (1, ..., 1), ..., n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import InvalidIndexError


class MultiIndex(tuple):
    """A d-tuple of integers.

    Equality is tuple equality and ``<`` / ``>`` keep the lexicographic tuple
    order; the componentwise partial order is exposed via :meth:`le`.
    """

    def __new__(cls, entries: Iterable[int] | int):
        if isinstance(entries, (int, np.integer)):
            entries = (entries,)
        values = []
        for v in entries:
            if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, np.integer)):
                if isinstance(v, (float, np.floating)) and float(v).is_integer():
                    v = int(v)
                else:
                    raise InvalidIndexError(f"multi-index entries must be integers, got {v!r}")
            values.append(int(v))
        if not values:
            raise InvalidIndexError("multi-index must have at least one entry")
        return super().__new__(cls, values)

    @property
    def d(self) -> int:
        return len(self)

    def le(self, other: Iterable[int]) -> bool:
        """Componentwise ``self <= other``."""
        other = MultiIndex(other)
        _check_same_size(self, other)
        return all(h <= k for h, k in zip(self, other))

    def __add__(self, other):
        other = MultiIndex(other)
        _check_same_size(self, other)
        return MultiIndex(h + k for h, k in zip(self, other))

    def __sub__(self, other):
        other = MultiIndex(other)
        _check_same_size(self, other)
        return MultiIndex(h - k for h, k in zip(self, other))

    def __repr__(self):
        return f"MultiIndex({tuple(self)!r})"

    def __str__(self):
        return "x".join(str(v) for v in self)


def _check_same_size(h, k):
    if len(h) != len(k):
        raise InvalidIndexError(f"multi-index sizes differ: {len(h)} vs {len(k)}")


def ones(d: int) -> MultiIndex:
    return MultiIndex((1,) * d)


def product_count(n: Iterable[int] | int) -> int:
    """Return N(n), the product of the entries of ``n``.

    >>> product_count((3, 4))
    12
    """
    n = MultiIndex(n)
    if any(v < 1 for v in n):
        raise InvalidIndexError(f"entries of n must be >= 1, got {tuple(n)}")
    return math.prod(n)


@dataclass(frozen=True)
class IndexRange:
    """The inclusive d-index range ``{low, ..., high}``.

    Iteration is lexicographic with the last coordinate varying fastest.
    """

    low: MultiIndex
    high: MultiIndex

    def __post_init__(self):
        object.__setattr__(self, "low", MultiIndex(self.low))
        object.__setattr__(self, "high", MultiIndex(self.high))
        _check_same_size(self.low, self.high)
        if not self.low.le(self.high):
            raise InvalidIndexError(f"empty range: {tuple(self.low)} is not <= {tuple(self.high)}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(k - h + 1 for h, k in zip(self.low, self.high))

    def __len__(self) -> int:
        return product_count(self.shape)

    def __iter__(self) -> Iterator[MultiIndex]:
        axes = [range(h, k + 1) for h, k in zip(self.low, self.high)]
        for entries in itertools.product(*axes):
            yield MultiIndex(entries)

    def __contains__(self, i) -> bool:
        try:
            i = MultiIndex(i)
        except InvalidIndexError:
            return False
        return len(i) == len(self.low) and self.low.le(i) and i.le(self.high)

    def as_array(self) -> np.ndarray:
        """All indices as an ``(N, d)`` int64 array in lexicographic order."""
        flat = np.arange(len(self), dtype=np.int64)
        cols = np.unravel_index(flat, self.shape)
        return np.stack(cols, axis=1).astype(np.int64) + np.asarray(self.low, dtype=np.int64)


def lex_iterate(index_range: IndexRange) -> list[MultiIndex]:
    """Return the indices of ``index_range`` in lexicographic order."""
    return list(index_range)


def flat_position(i: Iterable[int], n: Iterable[int]) -> int:
    """0-based position of ``i`` in the lexicographic enumeration of ``{1, ..., n}``."""
    i, n = MultiIndex(i), MultiIndex(n)
    _check_same_size(i, n)
    if not (ones(len(n)).le(i) and i.le(n)):
        raise InvalidIndexError(f"index {tuple(i)} outside 1..{tuple(n)}")
    pos = 0
    for ij, nj in zip(i, n):
        pos = pos * nj + (ij - 1)
    return pos
