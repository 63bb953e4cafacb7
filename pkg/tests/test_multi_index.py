import itertools

import pytest
from hypothesis import given, settings, strategies as st

from rearrangement.errors import InvalidIndexError
from rearrangement.multi_index import IndexRange, MultiIndex, flat_position, lex_iterate, product_count


@pytest.mark.parametrize("n, expected", [((3, 4), 12), ((5,), 5), ((2, 2, 2), 8)])
def test_product_count(n, expected):
    assert product_count(n) == expected


@pytest.mark.parametrize("n", [(0, 3), (-1,), (2, 0, 1)])
def test_product_count_rejects_nonpositive(n):
    with pytest.raises(InvalidIndexError):
        product_count(n)


def test_lex_order_matches_two_dimensional_layout():
    got = lex_iterate(IndexRange((1, 1), (2, 2)))
    assert [tuple(i) for i in got] == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_singleton_and_one_dimensional_ranges():
    assert [tuple(i) for i in lex_iterate(IndexRange((7, 3), (7, 3)))] == [(7, 3)]
    assert [tuple(i) for i in lex_iterate(IndexRange((1,), (3,)))] == [(1,), (2,), (3,)]


def test_empty_range_rejected():
    with pytest.raises(InvalidIndexError):
        IndexRange((2, 1), (1, 5))


def test_componentwise_order():
    h = MultiIndex((1, 2))
    assert h.le((1, 3)) and h.le((1, 2)) and not h.le((0, 5))


def test_non_integer_entries_rejected():
    with pytest.raises(InvalidIndexError):
        MultiIndex((1.5, 2))


ranges = st.integers(1, 3).flatmap(
    lambda d: st.tuples(
        st.lists(st.integers(-3, 3), min_size=d, max_size=d),
        st.lists(st.integers(0, 3), min_size=d, max_size=d),
    )
)


@settings(max_examples=200)
@given(ranges)
def test_lex_iterate_is_sorted_bijection(data):
    low, extent = data
    high = [l + e for l, e in zip(low, extent)]
    r = IndexRange(low, high)
    seq = [tuple(i) for i in lex_iterate(r)]
    assert len(seq) == product_count([e + 1 for e in extent]) == len(r)
    assert all(a < b for a, b in zip(seq, seq[1:]))
    box = set(itertools.product(*[range(l, h + 1) for l, h in zip(low, high)]))
    assert set(seq) == box
    assert r.as_array().tolist() == [list(i) for i in seq]


def test_flat_position_inverts_enumeration():
    n = (3, 2, 4)
    for pos, i in enumerate(IndexRange((1, 1, 1), n)):
        assert flat_position(i, n) == pos
