from itertools import product

import pytest
from hypothesis import given, strategies as st

from z2ngeom.degrees import (
    Degree,
    GradedDimension,
    RankMismatch,
    is_even,
    nonzero_degrees,
    scalar_product,
    standard_order,
)


def d(s):
    return Degree.parse(s)


def all_degrees(n):
    return [Degree(bits) for bits in product((0, 1), repeat=n)]


degree_pairs = st.integers(1, 4).flatmap(
    lambda n: st.tuples(*[st.tuples(*[st.integers(0, 1)] * n).map(Degree)] * 3)
)


def test_scalar_product_examples():
    assert scalar_product(d("011"), d("101")) == 1
    assert scalar_product(d("11"), d("11")) == 0
    for g in all_degrees(3):
        assert scalar_product(g, Degree.zero(3)) == 0


def test_parity_examples():
    assert is_even(d("000"))
    assert is_even(d("011"))
    assert not is_even(d("111"))


def test_standard_order_small_ranks():
    assert [str(g) for g in standard_order(1)] == ["0", "1"]
    assert [str(g) for g in standard_order(2)] == ["00", "11", "01", "10"]


def test_standard_order_rank_three():
    expected = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)]
    assert [g.bits for g in standard_order(3)] == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_standard_order_is_sorted_permutation(n):
    order = standard_order(n)
    assert sorted(g.bits for g in order) == sorted(g.bits for g in all_degrees(n))
    evens = [g.bits for g in order if g.is_even()]
    odds = [g.bits for g in order if not g.is_even()]
    assert [g.bits for g in order] == evens + odds
    assert evens == sorted(evens) and odds == sorted(odds)
    assert nonzero_degrees(n) == order[1:]


@given(degree_pairs)
def test_scalar_product_symmetric_and_biadditive(triple):
    a, b, c = triple
    assert scalar_product(a, b) == scalar_product(b, a)
    assert scalar_product(a + b, c) == (scalar_product(a, c) + scalar_product(b, c)) % 2
    assert is_even(a) == (scalar_product(a, a) == 0)


def test_rank_mismatch():
    with pytest.raises(RankMismatch):
        scalar_product(d("01"), d("011"))
    with pytest.raises(RankMismatch):
        d("01") + d("1")


def test_degree_parse_rejects_junk():
    with pytest.raises(ValueError):
        Degree.parse("012")
    with pytest.raises(ValueError):
        Degree.parse("")


def test_graded_dimension_text_round_trip():
    dim = GradedDimension(2, (1, 0, 1))
    assert str(dim) == "2|(1,0,1)"
    assert GradedDimension.parse("2|(1,0,1)") == dim
    assert dim.rank == 2 and dim.total_parameters == 2


def test_graded_dimension_sum():
    assert GradedDimension(2, (1, 0, 1)) + GradedDimension(1, (0, 1, 0)) == GradedDimension(3, (1, 1, 1))
    assert GradedDimension(1, (1,)) + GradedDimension(1, (1,)) == GradedDimension(2, (2,))


def test_graded_dimension_validation():
    with pytest.raises(ValueError):
        GradedDimension(1, (1, 1))
    with pytest.raises(ValueError):
        GradedDimension(-1, (0,))
    with pytest.raises(RankMismatch):
        GradedDimension(1, (1,)) + GradedDimension(1, (0, 0, 1))


def test_dimension_from_degrees():
    dim = GradedDimension.from_degrees(1, [d("01"), d("11"), d("01")], 2)
    assert dim == GradedDimension(1, (1, 2, 0))
