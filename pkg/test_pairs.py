"""
Tests for the indecomposable decomposition of matrix pairs f: V0 -> V1,
g: V1 -> V0.

Usage:
    pytest test_pairs.py
"""

import pytest
import sympy

from supergrass.services.pair_service import (
    IndecompMultiset,
    IndecompTag,
    MatrixPair,
    PairService,
    classify,
    contribution,
    parse_matrix,
    random_conjugate,
    random_multiset,
    reduced_charpoly,
    shift,
    synthesize,
    verify_counting_table,
    word_ranks,
)
from supergrass.utils.errors import InvalidInputError

A, A_inf, A_zero, B, Bshift = (
    IndecompTag.A,
    IndecompTag.A_inf,
    IndecompTag.A_zero,
    IndecompTag.B,
    IndecompTag.Bshift,
)


def _pair(f, g, n, m):
    return MatrixPair(parse_matrix(f, m, n), parse_matrix(g, n, m))


def test_invertible_scalar_pair():
    assert classify(_pair("1", "2", 1, 1)) == IndecompMultiset([A(1, (1, -2))])


def test_nilpotent_two_string():
    assert classify(_pair("0", "1", 1, 1)) == IndecompMultiset([A_inf(1)])
    assert classify(_pair("1", "0", 1, 1)) == IndecompMultiset([A_zero(1)])


def test_single_even_line():
    assert classify(_pair("", "", 1, 0)) == IndecompMultiset([B(0)])
    assert classify(_pair("", "", 0, 1)) == IndecompMultiset([Bshift(0)])
    assert classify(_pair("", "", 0, 0)) == IndecompMultiset()


def test_zero_maps_split_into_points():
    assert classify(_pair("0,0", "0;0", 2, 1)) == IndecompMultiset([B(0), B(0), Bshift(0)])


def test_repeated_elementary_divisor():
    ms = IndecompMultiset([A(2, (1, -1)), A(1, (1, -1)), A(1, (1, 0, 1))])
    assert classify(synthesize(ms)) == ms


@pytest.mark.parametrize(
    "tags",
    [
        [B(1)],
        [A(2, (1, -3)), B(1), Bshift(2)],
        [Bshift(2), A_zero(1)],
        [A_inf(2), B(0), Bshift(0)],
        [A(1, (1, 3)), A(3, (1, 3)), A_inf(1), A_zero(2)],
        [A(2, (1, 0, -2)), B(2)],
    ],
)
def test_synthesize_then_classify(tags, rng):
    ms = IndecompMultiset(tags)
    pair = synthesize(ms)
    assert (pair.n, pair.m) == ms.dims()
    assert classify(pair) == ms
    assert classify(random_conjugate(pair, rng)) == ms


def test_random_round_trips(rng):
    for _ in range(15):
        ms = random_multiset(rng)
        assert classify(random_conjugate(synthesize(ms), rng)) == ms


def test_shift_is_the_parity_swap(rng):
    for _ in range(10):
        ms = random_multiset(rng)
        assert shift(shift(ms)) == ms
        assert classify(synthesize(ms).swapped()) == shift(ms)
    assert shift(IndecompMultiset([A(1, (1, 5))])) == IndecompMultiset([A(1, (1, 5))])


def test_string_ranks():
    assert word_ranks(synthesize(IndecompMultiset([B(1)])), 3).to_dict() == {
        "even": [2, 1, 1, 0],
        "odd": [1, 1, 0, 0],
    }
    assert contribution(B(1), 1) == (1, 1)
    assert contribution(B(1), 2) == (1, 0)
    assert contribution(A(1, (1, -1)), 5) == (1, 1)


def test_counting_table_is_invertible():
    assert verify_counting_table(4)


def test_reduced_charpoly():
    pair = _pair("1,0;0,1", "0,0;0,3", 2, 2)
    reduced = reduced_charpoly(pair, 1)
    assert reduced.coeffs == (1, -3)
    assert reduced_charpoly(pair, 0).degree == 2
    with pytest.raises(InvalidInputError):
        reduced_charpoly(pair, 2)
    with pytest.raises(InvalidInputError):
        reduced_charpoly(pair, -1)


def test_tag_validation_and_dims():
    with pytest.raises(InvalidInputError):
        A(0, (1, 1))
    with pytest.raises(InvalidInputError):
        B(-1)
    with pytest.raises(InvalidInputError):
        IndecompTag("B", 1, (1, 0))
    with pytest.raises(InvalidInputError):
        A(1, (2, 1))
    assert A(2, (1, 0, 1)).dims() == (4, 4)
    assert B(1).dims() == (2, 1)
    assert Bshift(1).dims() == (1, 2)
    assert A_inf(2).is_nilpotent and A_zero(1).is_nilpotent and B(0).is_nilpotent
    assert not A(1, (1, -2)).is_nilpotent
    assert A_inf(1).to_dict() == {"type": "A", "k": 1, "poly": "inf"}
    assert A(1, (1, -2)).to_dict() == {"type": "A", "k": 1, "poly": [1, -2]}


def test_pair_validation():
    with pytest.raises(InvalidInputError):
        MatrixPair(sympy.zeros(2, 1), sympy.zeros(2, 1))
    with pytest.raises(InvalidInputError):
        MatrixPair(sympy.Matrix([[sympy.sqrt(2)]]), sympy.Matrix([[1]]))
    with pytest.raises(InvalidInputError):
        parse_matrix("1,0;0", 2, 2)
    with pytest.raises(InvalidInputError):
        parse_matrix("1", 0, 2)
    assert parse_matrix("1/2,0;0,1", 2, 2) == sympy.Matrix([[sympy.Rational(1, 2), 0], [0, 1]])


def test_service_classify_payload():
    payload = PairService().classify(_pair("1", "2", 1, 1))
    assert payload["blocks"] == [{"type": "A", "k": 1, "poly": [1, -2]}]
    assert payload["charpoly"] == "u - 2"
    assert payload["ranks"]["even"][:2] == [1, 1]


def test_service_round_trips_are_seeded():
    first = PairService().roundtrips(seed=3, trials=8)
    assert first["failures"] == []
    assert first == PairService().roundtrips(seed=3, trials=8)


def test_synthesize_examples():
    pair = synthesize(IndecompMultiset([A(1, (1, -5))]))
    assert (pair.f, pair.g) == (sympy.Matrix([[1]]), sympy.Matrix([[5]]))
    pair = synthesize(IndecompMultiset([B(1)]))
    assert pair.f == sympy.Matrix([[1, 0]])
    assert pair.g == sympy.Matrix([[0], [1]])
    empty = synthesize(IndecompMultiset())
    assert (empty.n, empty.m) == (0, 0)


def test_reduced_charpoly_of_the_zero_pair():
    pair = _pair("0,0;0,0", "0,0;0,0", 2, 2)
    assert reduced_charpoly(pair, 2).coeffs == (1,)


@pytest.mark.slow
def test_hundred_seeded_round_trips():
    report = PairService().roundtrips(seed=0, trials=100)
    assert report["trials"] == 100
    assert report["failures"] == []
