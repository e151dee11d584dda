"""
Tests for splitting and factorization rings, Sylvester matrices and
discriminants.

Usage:
    pytest test_rings.py
"""

from itertools import permutations

import pytest
import sympy
from sympy import symbols

from supergrass.services.partition_service import gaussian_poincare, q_factorial_dims
from supergrass.services.polynomial_service import MultiPoly, UniPolyOverRing, parse_univariate
from supergrass.services.ring_service import (
    RingService,
    coords_to_expr,
    discriminant,
    discriminant_trials,
    fact_graded_dims,
    fact_presentation,
    gcd_nullity_trials,
    planted_resultant,
    regular_representation_traces,
    split_graded_dims,
    split_normal_form,
    split_over_fact_check,
    split_presentation,
    substitute_back,
    sylvester,
    verify_free_rank,
)
from supergrass.utils.errors import InvalidInputError

u, a1, a2, a3, b1, b2 = symbols("u a1 a2 a3 b1 b2")


def test_split_normal_form_universal_quadratic():
    ring = split_presentation(UniPolyOverRing.universal(2))
    x1, x2 = ring.xi
    assert ring.staircase() == [(0, 0), (1, 0)]
    assert split_normal_form(ring, x2) == {(0, 0): -a1, (1, 0): -1}
    assert split_normal_form(ring, x1 ** 2) == {(0, 0): -a2, (1, 0): -a1}
    assert split_normal_form(ring, x1 * x2) == {(0, 0): a2}


def test_split_normal_form_of_a_power():
    ring = split_presentation(parse_univariate("u^2"))
    assert split_normal_form(ring, ring.xi[0] ** 2) == {}
    assert split_normal_form(ring, ring.xi[0] + ring.xi[1]) == {}


def test_split_normal_form_is_a_retraction():
    ring = split_presentation(UniPolyOverRing.universal(3))
    for mono in ring.basis_monomials():
        coords = split_normal_form(ring, mono)
        assert len(coords) == 1 and list(coords.values()) == [1]
        assert coords_to_expr(ring, coords) == mono


def test_split_relations_vanish_in_normal_form():
    ring = split_presentation(UniPolyOverRing.universal(3))
    for relation in ring.relations:
        assert split_normal_form(ring, relation) == {}


def test_fact_presentation_quadratic():
    ring = fact_presentation(UniPolyOverRing.universal(2), 1)
    assert ring.b == (b1,)
    assert sympy.expand(ring.cofactor.as_expr() - (u + a1 - b1)) == 0
    assert [sympy.expand(r - (b1 ** 2 - a1 * b1 + a2)) for r in ring.relations] == [0]
    assert substitute_back(ring)


def test_fact_presentation_edge_cases():
    f = parse_univariate("u^3")
    assert fact_presentation(f, 0).relations == ()
    assert [sympy.expand(r) for r in fact_presentation(f, 3).relations] == [-b1, -b2, -symbols("b3")]
    with pytest.raises(InvalidInputError):
        fact_presentation(f, 4)
    with pytest.raises(InvalidInputError):
        fact_presentation(UniPolyOverRing.universal(2), 1, prefix="a")


def test_substitute_back_on_the_universal_quartic():
    for p in range(5):
        assert substitute_back(fact_presentation(UniPolyOverRing.universal(4), p))


@pytest.mark.parametrize(
    "kind,text,p,expected",
    [
        ("split", "u^3", None, 6),
        ("split", "u^3 - 6*u^2 + 11*u - 6", None, 6),
        ("split", "u^2 + 1", None, 2),
        ("fact", "u^4", 2, 6),
        ("fact", "u^3 - 6*u^2 + 11*u - 6", 1, 3),
        ("fact", "u^5 - u", 2, 10),
        ("fact", "u^3", 0, 1),
        ("fact", "u^3", 3, 1),
    ],
)
def test_free_rank(kind, text, p, expected):
    report = verify_free_rank(kind, parse_univariate(text), p)
    assert report.expected == expected
    assert report.computed == expected
    assert report.ok


def test_free_rank_needs_rational_coefficients():
    with pytest.raises(InvalidInputError):
        verify_free_rank("split", UniPolyOverRing.universal(2))
    with pytest.raises(InvalidInputError):
        verify_free_rank("fact", parse_univariate("u^2"))
    with pytest.raises(InvalidInputError):
        verify_free_rank("flag", parse_univariate("u^2"))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_split_of_a_power_is_the_flag_variety(n):
    assert split_graded_dims(n).trimmed() == q_factorial_dims(n).halved().as_list()


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_fact_of_a_power_is_the_grassmannian(N):
    for s in range(N + 1):
        assert fact_graded_dims(N, s).trimmed() == gaussian_poincare(s, N).halved().as_list()


def test_split_factors_over_fact():
    for n, p in [(2, 1), (3, 1), (3, 2), (4, 2)]:
        assert split_over_fact_check(n, p)["ok"]
    with pytest.raises(InvalidInputError):
        split_over_fact_check(3, 3)


def test_sylvester_common_root():
    f = UniPolyOverRing.from_roots([1, 2])
    g = UniPolyOverRing.from_roots([1, 3])
    syl = sylvester(f, g)
    assert syl.matrix.shape == (4, 4)
    assert syl.nullity == 1
    assert syl.det == 0


def test_sylvester_coprime():
    f = UniPolyOverRing.from_roots([1])
    g = UniPolyOverRing.from_roots([2])
    syl = sylvester(f, g)
    assert syl.nullity == 0
    assert syl.det == planted_resultant([1], [2]) == -1


def test_sylvester_determinant_is_the_resultant_for_unequal_degrees():
    f = UniPolyOverRing.from_roots([1])
    g = UniPolyOverRing.from_roots([2, 3, 4])
    assert sylvester(f, g).det == planted_resultant([1], [2, 3, 4]) == -6
    assert sylvester(g, f).det == planted_resultant([2, 3, 4], [1]) == 6
    assert planted_resultant([sympy.Rational(1, 2)], [0]) == sympy.Rational(1, 2)
    assert planted_resultant([1, 2], []) == 1


def test_sylvester_coprime_quadratic():
    assert sylvester(parse_univariate("u^2 + 1"), parse_univariate("u - 1")).det != 0


def test_sylvester_pads_and_validates():
    syl = sylvester([1, 0, -1], [1], 2, 1)
    assert syl.matrix.row(0).tolist() == [[1, 0, -1]]
    assert syl.matrix.row(1).tolist() == [[0, 1, 0]]
    assert syl.matrix.row(2).tolist() == [[0, 0, 1]]
    assert sylvester([1], [5]).det == 1
    with pytest.raises(InvalidInputError):
        sylvester([0, 1], [1])
    with pytest.raises(InvalidInputError):
        sylvester([1, 1], [1, 1, 1], 1, 1)


def test_universal_resultant_is_homogeneous():
    f = UniPolyOverRing.universal(2)
    g = UniPolyOverRing.universal(2, prefix="b")
    syl = sylvester(f, g)
    assert syl.nullity is None
    poly = MultiPoly.from_expr(syl.det, (a1, a2, b1, b2), (1, 2, 1, 2))
    assert poly.degrees() == [4]


def test_discriminant_examples():
    assert discriminant(parse_univariate("u^2 - 1")) == 4
    assert discriminant(parse_univariate("u - 7")) == 1
    for n in range(2, 6):
        assert discriminant(UniPolyOverRing((1,) + (0,) * n)) == 0
    assert sympy.expand(discriminant(UniPolyOverRing.universal(2)) - (a1 ** 2 - 4 * a2)) == 0
    cubic = a1 ** 2 * a2 ** 2 - 4 * a2 ** 3 - 4 * a1 ** 3 * a3 - 27 * a3 ** 2 + 18 * a1 * a2 * a3
    assert sympy.expand(discriminant(UniPolyOverRing.universal(3)) - cubic) == 0


def test_randomized_trials():
    assert gcd_nullity_trials(0, 20)["ok"]
    assert discriminant_trials(0, 20)["ok"]
    report = RingService().gcd_trials(seed=7, trials=5)
    assert report["seed"] == 7 and report["trials"] == 5 and not report["failures"]


def test_split_of_distinct_roots_is_the_regular_representation():
    for roots in ([0, 1], [1, 2, 3]):
        n = len(roots)
        traces = regular_representation_traces(roots)
        identity = tuple(range(n))
        assert set(traces) == set(permutations(range(n)))
        assert traces[identity] == sympy.factorial(n)
        assert all(trace == 0 for perm, trace in traces.items() if perm != identity)


def test_service_reports():
    service = RingService()
    split = service.split_report(parse_univariate("u^3"))
    assert split["flag_poincare"] == [1, 2, 2, 1]
    assert split["free_rank"]["ok"]
    fact = service.fact_report(parse_univariate("u^4"), 2)
    assert fact["grassmann_poincare"] == [1, 1, 2, 1, 1]
    symbolic = service.fact_report(UniPolyOverRing.universal(3), 1)
    assert "free_rank" not in symbolic
    assert symbolic["vars"] == ["b1"]


@pytest.mark.slow
def test_larger_chow_ring_specializations():
    for s in range(7):
        assert fact_graded_dims(6, s).trimmed() == gaussian_poincare(s, 6).halved().as_list()
    assert split_graded_dims(5).trimmed() == q_factorial_dims(5).halved().as_list()


@pytest.mark.slow
def test_free_ranks_on_the_full_grid(rng):
    for n in range(1, 5):
        assert verify_free_rank("split", parse_univariate(f"u^{n}")).ok
        coeffs = [1] + [int(c) for c in rng.integers(-5, 6, size=n)]
        assert verify_free_rank("split", UniPolyOverRing.from_coeffs(coeffs)).ok
    for n in range(1, 6):
        for p in range(n + 1):
            assert verify_free_rank("fact", parse_univariate(f"u^{n}"), p).ok


@pytest.mark.slow
def test_full_size_randomized_trials():
    assert gcd_nullity_trials(0, 200)["ok"]
    assert discriminant_trials(0, 50)["ok"]
